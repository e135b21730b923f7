//! Distributional diagnostics: Benford's first-digit law, the log-normal
//! view of citation counts, and the normal quantile machinery both rely on.
//!
//! The log-normal connection: if ln(c)/ln(c0) is normal with mean and spread
//! both near lambda, the ranked counts follow c_n ≈ c0·e^{-P·sqrt(n)} and the
//! log-log slope drifts toward ln(2 ln N)/ln N as the sample grows.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::core::{first_digit_histogram, CitationList};
use crate::{Error, Result};

/// Observed vs. expected first-digit frequencies over the cited entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenfordReport {
    /// Pearson chi-square statistic over the nine digit bins.
    pub chi_square: f64,
    /// Expected frequency per digit 1..=9 under Benford's law.
    pub expected: BTreeMap<u8, f64>,
    /// Largest |observed - expected| across the digits.
    pub max_abs_deviation: f64,
    /// Observed frequency per digit 1..=9 (fractions of the cited entries).
    pub observed: BTreeMap<u8, f64>,
}

/// Moments of x = ln(c)/ln(c0) over the cited entries, plus the lambda
/// estimates they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogNormalSummary {
    /// (mu + sigma)/2, the direct lambda estimate.
    pub lambda_direct: f64,
    /// Lambda recovered from the raw count moments, absent when the counts
    /// carry no spread.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_moments: Option<f64>,
    /// Mean of x.
    pub mu: f64,
    /// Population standard deviation of x.
    pub sigma: f64,
    /// Mean of the raw cited counts.
    pub sample_mean: f64,
    /// Population standard deviation of the raw cited counts.
    pub sample_sd: f64,
}

/// Benford's expected frequency for a leading digit: log10(1 + 1/d).
pub fn benford_expected(digit: u8) -> Result<f64> {
    if !(1..=9).contains(&digit) {
        return Err(Error::Domain(format!(
            "leading digits run 1..=9, got {digit}"
        )));
    }
    Ok((1.0 + 1.0 / digit as f64).log10())
}

/// First-digit frequencies with the Pearson chi-square against Benford's law.
/// Uncited entries are ignored; errors when nothing is cited.
pub fn benford_report(list: &CitationList) -> Result<BenfordReport> {
    let histogram = first_digit_histogram(list);
    let total: u64 = histogram.values().sum();
    if total == 0 {
        return Err(Error::Degenerate(
            "Benford test needs at least one cited publication".into(),
        ));
    }
    let mut observed = BTreeMap::new();
    let mut expected = BTreeMap::new();
    let mut chi_square = 0.0;
    let mut max_abs_deviation: f64 = 0.0;
    for digit in 1..=9u8 {
        let count = histogram.get(&digit).copied().unwrap_or(0) as f64;
        let obs = count / total as f64;
        let exp = benford_expected(digit)?;
        let exp_count = total as f64 * exp;
        chi_square += (count - exp_count) * (count - exp_count) / exp_count;
        max_abs_deviation = max_abs_deviation.max((obs - exp).abs());
        observed.insert(digit, obs);
        expected.insert(digit, exp);
    }
    Ok(BenfordReport {
        chi_square,
        expected,
        max_abs_deviation,
        observed,
    })
}

/// Lambda from the mean and standard deviation of the raw counts:
/// sigma_of_ln = sqrt(ln(1 + (sd/mean)^2)), lambda = sigma_of_ln/ln(c0).
pub fn lambda_from_moments(mean: f64, sd: f64, c0: f64) -> Result<f64> {
    if !mean.is_finite() || mean <= 0.0 {
        return Err(Error::Domain(format!("mean must be positive, got {mean}")));
    }
    if !sd.is_finite() || sd < 0.0 {
        return Err(Error::Domain(format!(
            "standard deviation must be non-negative, got {sd}"
        )));
    }
    if !c0.is_finite() || c0 <= 1.0 {
        return Err(Error::Domain(format!("c0 must exceed 1, got {c0}")));
    }
    let ratio = sd / mean;
    Ok((ratio * ratio).ln_1p().sqrt() / c0.ln())
}

/// The sd/mean ratio a log-normal with parameter lambda implies:
/// sqrt(e^{(lambda ln c0)^2} - 1). Inverse of [`lambda_from_moments`].
pub fn lognormal_sd_over_mean(lambda: f64, c0: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Domain(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    if !c0.is_finite() || c0 <= 1.0 {
        return Err(Error::Domain(format!("c0 must exceed 1, got {c0}")));
    }
    let t = lambda * c0.ln();
    Ok((t * t).exp_m1().sqrt())
}

/// Moments of x = ln(c)/ln(c0) over cited entries (population convention).
/// Needs c0 >= 2 and at least two cited publications.
pub fn normalized_log_stats(list: &CitationList) -> Result<LogNormalSummary> {
    let c0 = list.top();
    if c0 < 2 {
        return Err(Error::Degenerate(
            "log-normal summary needs c_0 >= 2".into(),
        ));
    }
    let cited: Vec<f64> = list
        .counts()
        .iter()
        .take_while(|&&c| c >= 1)
        .map(|&c| c as f64)
        .collect();
    if cited.len() < 2 {
        return Err(Error::Degenerate(
            "log-normal summary needs at least 2 cited publications".into(),
        ));
    }
    let ln_c0 = (c0 as f64).ln();
    let n = cited.len() as f64;
    let xs: Vec<f64> = cited.iter().map(|c| c.ln() / ln_c0).collect();
    let mu = xs.iter().sum::<f64>() / n;
    let sigma = (xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / n).sqrt();
    let sample_mean = cited.iter().sum::<f64>() / n;
    let sample_sd = (cited
        .iter()
        .map(|c| (c - sample_mean) * (c - sample_mean))
        .sum::<f64>()
        / n)
        .sqrt();
    let lambda_moments = if sample_sd > 0.0 {
        Some(lambda_from_moments(sample_mean, sample_sd, c0 as f64)?)
    } else {
        None
    };
    Ok(LogNormalSummary {
        lambda_direct: 0.5 * (mu + sigma),
        lambda_moments,
        mu,
        sigma,
        sample_mean,
        sample_sd,
    })
}

// Coefficients of Acklam's rational approximation to the normal quantile.
const ACKLAM_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const ACKLAM_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const ACKLAM_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const ACKLAM_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const ACKLAM_P_LOW: f64 = 0.02425;

/// Inverse standard normal CDF. Acklam's approximation polished with one
/// Halley step against an erfc-based CDF; absolute error stays below 1e-9.
pub fn normal_quantile(rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho <= 0.0 || rho >= 1.0 {
        return Err(Error::Domain(format!(
            "quantile argument must lie in (0, 1), got {rho}"
        )));
    }
    // The upper half maps to the lower half exactly: 1 - rho is exact for
    // rho >= 0.5 (Sterbenz), so symmetry costs no precision.
    if rho > 0.5 {
        Ok(-quantile_lower(1.0 - rho))
    } else {
        Ok(quantile_lower(rho))
    }
}

fn quantile_lower(rho: f64) -> f64 {
    let x = if rho < ACKLAM_P_LOW {
        let q = (-2.0 * rho.ln()).sqrt();
        (((((ACKLAM_C[0] * q + ACKLAM_C[1]) * q + ACKLAM_C[2]) * q + ACKLAM_C[3]) * q
            + ACKLAM_C[4])
            * q
            + ACKLAM_C[5])
            / ((((ACKLAM_D[0] * q + ACKLAM_D[1]) * q + ACKLAM_D[2]) * q + ACKLAM_D[3]) * q + 1.0)
    } else {
        let q = rho - 0.5;
        let r = q * q;
        (((((ACKLAM_A[0] * r + ACKLAM_A[1]) * r + ACKLAM_A[2]) * r + ACKLAM_A[3]) * r
            + ACKLAM_A[4])
            * r
            + ACKLAM_A[5])
            * q
            / (((((ACKLAM_B[0] * r + ACKLAM_B[1]) * r + ACKLAM_B[2]) * r + ACKLAM_B[3]) * r
                + ACKLAM_B[4])
                * r
                + 1.0)
    };
    // One Halley step against Phi(x) = erfc(-x/sqrt(2))/2.
    let err = 0.5 * erfc(-x / SQRT_2) - rho;
    let u = err * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Complementary error function, accurate over the whole line: Maclaurin
/// series below 1, a Lentz-evaluated continued fraction above.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x < 1.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) * sum (-1)^n x^{2n+1} / (n! (2n+1)).
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0;
    while n < 200.0 {
        term *= -x * x / n;
        let contribution = term / (2.0 * n + 1.0);
        sum += contribution;
        if contribution.abs() <= 1e-18 * sum.abs() {
            break;
        }
        n += 1.0;
    }
    FRAC_2_SQRT_PI * sum
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // sqrt(pi) e^{x^2} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
    // evaluated by the modified Lentz algorithm.
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..200 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Expected value of the n-th largest of `n_total` standard normal draws,
/// by the quantile midpoint rule: q(1 - (n + 1/2)/N).
pub fn expected_order_statistic(n: u64, n_total: u64) -> Result<f64> {
    if n >= n_total {
        return Err(Error::Domain(format!(
            "rank {n} out of range for {n_total} draws"
        )));
    }
    normal_quantile(1.0 - (n as f64 + 0.5) / n_total as f64)
}

/// Where the log-log slope drifts for log-normal data: ln(2 ln N)/ln N.
pub fn slope_asymptote(n_articles: u64) -> Result<f64> {
    if n_articles < 3 {
        return Err(Error::Domain(format!(
            "asymptote needs N >= 3, got {n_articles}"
        )));
    }
    let ln_n = (n_articles as f64).ln();
    Ok((2.0 * ln_n).ln() / ln_n)
}

/// The same numerator over ln(N^2) instead of ln N, i.e. half of
/// [`slope_asymptote`]. Kept separate because reference tables show this
/// variant alongside the ratio column.
pub fn slope_asymptote_printed(n_articles: u64) -> Result<f64> {
    slope_asymptote(n_articles).map(|v| 0.5 * v)
}
