//! The decay model c_n ≈ c0·e^{-P·n^A} and everything fitted from it.
//!
//! Four estimators for the multiplier P are provided, mirroring the different
//! ways the curve can be pinned to observable quantities:
//!
//! - ratio of the top two counts: P = -ln(c_1/c_0)
//! - sharpness: P = ln(c_0)/sqrt(i_1)
//! - area (total citations): P = (c_0·Γ(1 + 1/A)/S)^A, which reduces to
//!   sqrt(2·c_0/S) at A = 0.5 because Γ(3) = 2
//! - log-log regression intercept: P = e^b from the straight line fitted to
//!   ln(ln(c_0/c_n)) against ln n, whose slope estimates A
//!
//! The regression uses ordinary least squares (slope = cov/var). The plain
//! covariance variant used by the Monte Carlo slope tables lives in
//! [`crate::sim::covariance_slope`].

use serde::{Deserialize, Serialize};

use crate::core::{i_index, total_citations, CitationList};
use crate::{Error, Result};

/// Fitted parameters of the decay law c_n = c0·e^{-P·n^A}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawModel {
    c0: f64,
    p: f64,
    a: f64,
}

impl PowerLawModel {
    /// Requires c0 >= 1, P > 0 and A in (0, 1).
    pub fn new(c0: f64, p: f64, a: f64) -> Result<Self> {
        if !c0.is_finite() || c0 < 1.0 {
            return Err(Error::Domain(format!("model c0 must be >= 1, got {c0}")));
        }
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::Domain(format!("model P must be > 0, got {p}")));
        }
        if !a.is_finite() || a <= 0.0 || a >= 1.0 {
            return Err(Error::Domain(format!("model A must lie in (0, 1), got {a}")));
        }
        Ok(PowerLawModel { c0, p, a })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

/// Every applicable P estimate at one fixed exponent A, plus the free
/// (A, P) regression. Estimators that do not apply to the data are absent
/// rather than zero or NaN so reports stay machine-readable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_sharpness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_area: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_loglog: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_loglog: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loglog_rms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_constant: Option<f64>,
    /// Number of points the regression used (0 when the regression is absent).
    pub points_used: u64,
}

/// Evaluates the model: c0·e^{-P·n^A}, exactly c0 at n = 0.
pub fn predict_count(model: &PowerLawModel, n: u64) -> f64 {
    if n == 0 {
        return model.c0;
    }
    model.c0 * (-model.p * (n as f64).powf(model.a)).exp()
}

/// P from the ratio of the two largest counts: -ln(c_1/c_0).
pub fn estimate_p_ratio(list: &CitationList) -> Result<f64> {
    let counts = list.counts();
    if counts.len() < 2 {
        return Err(Error::Degenerate(
            "ratio estimate needs at least 2 publications".into(),
        ));
    }
    let (c0, c1) = (counts[0], counts[1]);
    if c0 < 1 || c1 < 1 {
        return Err(Error::Degenerate(
            "ratio estimate needs the top two counts to be cited".into(),
        ));
    }
    Ok(-((c1 as f64 / c0 as f64).ln()))
}

/// P from the sharpness of the triangular shape: ln(c_0)/sqrt(i_1).
pub fn estimate_p_sharpness(list: &CitationList) -> Result<f64> {
    let c0 = list.top();
    if c0 < 2 {
        return Err(Error::Degenerate(
            "sharpness estimate needs c_0 >= 2".into(),
        ));
    }
    let i1 = i_index(list, 1)?;
    if i1 == 0 {
        return Err(Error::Degenerate(
            "sharpness estimate needs at least one cited publication".into(),
        ));
    }
    Ok((c0 as f64).ln() / (i1 as f64).sqrt())
}

/// The area estimator evaluated from raw scalars: (c0·Γ(1 + 1/A)/S)^A.
pub fn p_area_from(c0: f64, s: f64, a: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a) || a == 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("A must lie in (0, 1), got {a}")));
    }
    if c0 < 1.0 || s < 1.0 {
        return Err(Error::Degenerate(
            "area estimate needs c_0 >= 1 and S >= 1".into(),
        ));
    }
    let gamma = gamma_function(1.0 + 1.0 / a)?;
    Ok((c0 * gamma / s).powf(a))
}

/// P from the total number of citations S at exponent A.
pub fn estimate_p_area(list: &CitationList, a: f64) -> Result<f64> {
    p_area_from(list.top() as f64, total_citations(list) as f64, a)
}

const LANCZOS_G: f64 = 7.0;
// Coefficients for g = 7, n = 9 from the GNU Scientific Library.
const LANCZOS_COEFFICIENTS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0 by the Lanczos approximation (relative error below 1e-10
/// across (0, 30]); the reflection formula covers x < 0.5.
pub fn gamma_function(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(lanczos_gamma(x))
}

fn lanczos_gamma(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos_gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut sum = LANCZOS_COEFFICIENTS[0];
    for (i, &c) in LANCZOS_COEFFICIENTS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * sum
}

/// Log-log points from real-valued counts ranked descending, keeping rank
/// n >= 1 entries that satisfy `keep` and lie strictly below the top count.
pub(crate) fn loglog_points_filtered(
    values: &[f64],
    keep: impl Fn(f64) -> bool,
) -> Result<Vec<(f64, f64)>> {
    let c0 = match values.first() {
        Some(&c0) if c0 > 0.0 => c0,
        _ => return Err(Error::Degenerate("no cited publications".into())),
    };
    let mut points = Vec::new();
    for (n, &c) in values.iter().enumerate().skip(1) {
        if c < c0 && keep(c) {
            points.push(((n as f64).ln(), (c0 / c).ln().ln()));
        }
    }
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "regression needs at least 2 log-log points, found {}",
            points.len()
        )));
    }
    Ok(points)
}

/// Log-log transform of real-valued counts (ranked descending): for each
/// rank n >= 1 with 1 <= c_n < c_0, the point (ln n, ln(ln(c_0/c_n))).
pub fn loglog_points_values(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.len() < 3 {
        return Err(Error::Degenerate(
            "log-log transform needs at least 3 publications".into(),
        ));
    }
    if values.first().copied().unwrap_or(0.0) < 2.0 {
        return Err(Error::Degenerate(
            "log-log transform needs c_0 >= 2".into(),
        ));
    }
    loglog_points_filtered(values, |c| c >= 1.0)
}

/// Log-log transform of a citation list. Uncited entries (c_n = 0) and
/// entries tied with the top count are skipped; so is rank 0 itself.
pub fn loglog_points(list: &CitationList) -> Result<Vec<(f64, f64)>> {
    let values: Vec<f64> = list.counts().iter().map(|&c| c as f64).collect();
    loglog_points_values(&values)
}

/// Ordinary least squares over (x, y) points: returns (slope, intercept, rms
/// residual). Population moments throughout.
fn ols_line(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(x, y) in points {
        cov += (x - mean_x) * (y - mean_y);
        var += (x - mean_x) * (x - mean_x);
    }
    if var == 0.0 {
        return Err(Error::Degenerate(
            "all regression points share one rank".into(),
        ));
    }
    let slope = cov / var;
    let intercept = mean_y - slope * mean_x;
    let rms = (points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok((slope, intercept, rms))
}

/// Joint (A, P) fit: least squares on the log-log points. Returns
/// (A, P, rms residual); A is the slope, P = e^intercept.
pub fn fit_loglog(list: &CitationList) -> Result<(f64, f64, f64)> {
    let points = loglog_points(list)?;
    let (slope, intercept, rms) = ols_line(&points)?;
    Ok((slope, intercept.exp(), rms))
}

/// [`fit_loglog`] over real-valued counts ranked descending.
pub fn fit_loglog_values(values: &[f64]) -> Result<(f64, f64, f64)> {
    let points = loglog_points_values(values)?;
    let (slope, intercept, rms) = ols_line(&points)?;
    Ok((slope, intercept.exp(), rms))
}

/// Populates every applicable estimator at the given A plus the free
/// regression. Errors only when no estimator applies at all.
pub fn fixed_a_fit(list: &CitationList, a: f64) -> Result<FitReport> {
    if !a.is_finite() || a <= 0.0 || a >= 1.0 {
        return Err(Error::Domain(format!("A must lie in (0, 1), got {a}")));
    }
    let p_ratio = estimate_p_ratio(list).ok();
    let p_sharpness = estimate_p_sharpness(list).ok();
    let p_area = estimate_p_area(list, a).ok();
    let regression = loglog_points(list).ok().and_then(|points| {
        ols_line(&points)
            .ok()
            .map(|(slope, intercept, rms)| (slope, intercept.exp(), rms, points.len() as u64))
    });
    if p_ratio.is_none() && p_sharpness.is_none() && p_area.is_none() && regression.is_none() {
        return Err(Error::Degenerate("no estimator applies to this list".into()));
    }
    let i10 = i_index(list, 10)?;
    let hc = if i10 >= 1 {
        h_constant(list.top() as f64, a, 10, i10).ok()
    } else {
        None
    };
    Ok(FitReport {
        p_ratio,
        p_sharpness,
        p_area,
        p_loglog: regression.map(|(_, p, _, _)| p),
        a_loglog: regression.map(|(a, _, _, _)| a),
        loglog_rms: regression.map(|(_, _, rms, _)| rms),
        h_constant: hc,
        points_used: regression.map_or(0, |(_, _, _, n)| n),
    })
}

/// Predicted i_j/i_k ratio: (ln(c0/j)/ln(c0/k))^{1/A}.
pub fn predict_i_ratio(c0: f64, a: f64, j: u64, k: u64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 || a >= 1.0 {
        return Err(Error::Domain(format!("A must lie in (0, 1), got {a}")));
    }
    if j < 1 || k < 1 {
        return Err(Error::Domain("thresholds j, k must be >= 1".into()));
    }
    if !(c0 > j as f64) || !(c0 > k as f64) {
        return Err(Error::Domain(format!(
            "c0 = {c0} must exceed both thresholds j = {j}, k = {k}"
        )));
    }
    Ok(((c0 / j as f64).ln() / (c0 / k as f64).ln()).powf(1.0 / a))
}

/// The right side of the h-index relation: (c0/i_k)^A·ln(c0/k).
pub fn h_constant(c0: f64, a: f64, k: u64, ik: u64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 || a >= 1.0 {
        return Err(Error::Domain(format!("A must lie in (0, 1), got {a}")));
    }
    if ik < 1 {
        return Err(Error::Domain("i_k must be >= 1".into()));
    }
    if !(c0 > k as f64) {
        return Err(Error::Domain(format!(
            "c0 = {c0} must exceed the threshold k = {k}"
        )));
    }
    Ok((c0 / ik as f64).powf(a) * (c0 / k as f64).ln())
}

/// Solves (c0/h)^A·ln(c0/h) = target for h by bracketed bisection on
/// h in [1, c0). The left side is strictly decreasing there, so the root is
/// unique; tolerance is |f(h) - target| <= 1e-9·target with a 200-iteration
/// cap.
pub fn solve_h_for_constant(c0: f64, a: f64, target: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 || a >= 1.0 {
        return Err(Error::Domain(format!("A must lie in (0, 1), got {a}")));
    }
    if !c0.is_finite() || c0 <= 1.0 {
        return Err(Error::Domain(format!("c0 must exceed 1, got {c0}")));
    }
    if !target.is_finite() || target <= 0.0 {
        return Err(Error::Domain(format!(
            "the constant must be positive, got {target}"
        )));
    }
    let f = |h: f64| (c0 / h).powf(a) * (c0 / h).ln();
    let (mut lo, mut hi) = (1.0, c0 * (1.0 - 1e-12));
    let (f_lo, f_hi) = (f(lo), f(hi));
    if target > f_lo || target < f_hi {
        return Err(Error::Domain(format!(
            "no root: target {target} outside [f({hi:.6}) = {f_hi:.3e}, f(1) = {f_lo:.6}]"
        )));
    }
    let tolerance = 1e-9 * target;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if (f_mid - target).abs() <= tolerance {
            return Ok(mid);
        }
        if f_mid > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Predicted real-valued h-index from c0, A and the observed i_10.
pub fn predict_h(c0: f64, a: f64, i10: u64) -> Result<f64> {
    if !(c0 > 10.0) {
        return Err(Error::Domain(format!("c0 must exceed 10, got {c0}")));
    }
    let target = h_constant(c0, a, 10, i10)?;
    solve_h_for_constant(c0, a, target)
}
