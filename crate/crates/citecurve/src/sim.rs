//! Seeded Monte Carlo: synthetic citation records drawn from the log-normal
//! picture, plus the slope-table runners built on them.
//!
//! Reproducibility is load-bearing here. Every dataset draws from its own
//! splitmix-style substream keyed by (seed, dataset index), so results do not
//! depend on thread count or scheduling, and the same seed yields the same
//! bytes on every run.
//!
//! The table runners measure the plain covariance slope of the log-log
//! points, cov(ln n, ln ln(c0/c_n)), not the least-squares slope; that is the
//! convention the reference tables use (the regression variant divides by
//! var(ln n), which sits near 0.85-0.9 for N = 200 and drifts with N). The
//! free regression in [`crate::fit::fit_loglog`] is unaffected.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::CitationList;
use crate::dist::normal_quantile;
use crate::fit::{self, loglog_points_filtered};
use crate::{Error, Result};

/// Lambda grid used by the reference lambda table (N = 200 articles).
pub const LAMBDA_TABLE_LAMBDAS: [f64; 6] = [0.2, 0.25, 0.3, 0.35, 0.4, 0.45];

/// Article-count grid used by the reference N table.
pub const N_TABLE_SIZES: [u64; 5] = [100, 1_000, 10_000, 100_000, 1_000_000];

/// c0 parameter both tables are quoted at.
pub const DEFAULT_C0_PARAM: f64 = 100.0;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and an index.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ index)
}

/// Splitmix-style generator: a Weyl sequence pushed through a finalizer.
/// Small state, full 64-bit output, cheap jump-ahead via [`substream_seed`].
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw strictly inside (0, 1): top 53 bits, centered on the
    /// lattice so neither endpoint is reachable.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal draw by inverse-CDF of a uniform.
    pub fn next_normal(&mut self) -> f64 {
        normal_quantile(self.next_uniform()).expect("uniform draws lie in (0, 1)")
    }
}

/// Parameters of one synthetic ensemble. Construct through [`SimConfig::new`];
/// deserialization re-validates, so a stored config is always usable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigFields", into = "ConfigFields")]
pub struct SimConfig {
    lambda: f64,
    c0_param: f64,
    n_articles: u64,
    n_datasets: u64,
    seed: u64,
    integer_rounding: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ConfigFields {
    lambda: f64,
    c0_param: f64,
    n_articles: u64,
    n_datasets: u64,
    seed: u64,
    integer_rounding: bool,
}

impl From<SimConfig> for ConfigFields {
    fn from(c: SimConfig) -> Self {
        ConfigFields {
            lambda: c.lambda,
            c0_param: c.c0_param,
            n_articles: c.n_articles,
            n_datasets: c.n_datasets,
            seed: c.seed,
            integer_rounding: c.integer_rounding,
        }
    }
}

impl TryFrom<ConfigFields> for SimConfig {
    type Error = Error;

    fn try_from(f: ConfigFields) -> Result<Self> {
        SimConfig::new(
            f.lambda,
            f.c0_param,
            f.n_articles,
            f.n_datasets,
            f.seed,
            f.integer_rounding,
        )
    }
}

impl SimConfig {
    /// Requires 0 < lambda < 1, c0 parameter > 1, at least 10 articles and at
    /// least 1 dataset.
    pub fn new(
        lambda: f64,
        c0_param: f64,
        n_articles: u64,
        n_datasets: u64,
        seed: u64,
        integer_rounding: bool,
    ) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 || lambda >= 1.0 {
            return Err(Error::Config(format!(
                "lambda must lie in (0, 1), got {lambda}"
            )));
        }
        if !c0_param.is_finite() || c0_param <= 1.0 {
            return Err(Error::Config(format!(
                "c0 parameter must exceed 1, got {c0_param}"
            )));
        }
        if n_articles < 10 {
            return Err(Error::Config(format!(
                "need at least 10 articles per dataset, got {n_articles}"
            )));
        }
        if n_datasets < 1 {
            return Err(Error::Config("need at least 1 dataset".into()));
        }
        Ok(SimConfig {
            lambda,
            c0_param,
            n_articles,
            n_datasets,
            seed,
            integer_rounding,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c0_param(&self) -> f64 {
        self.c0_param
    }

    pub fn n_articles(&self) -> u64 {
        self.n_articles
    }

    pub fn n_datasets(&self) -> u64 {
        self.n_datasets
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn integer_rounding(&self) -> bool {
        self.integer_rounding
    }
}

/// Aggregate of one ensemble run. Per-dataset slopes keep dataset order, so
/// equal seeds compare equal field by field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config_echo: SimConfig,
    /// Datasets whose slope was undefined (fewer than two usable points).
    pub failed_datasets: u64,
    pub mean_slope: f64,
    pub per_dataset_slopes: Vec<f64>,
    pub sd_slope: f64,
}

/// Draws one dataset of real-valued citation counts, ranked descending:
/// c = c0^{lambda(1 + z)} with z standard normal. Rounding to integers is
/// applied when the config asks for it.
pub fn generate_values(config: &SimConfig, dataset_index: u64) -> Result<Vec<f64>> {
    if dataset_index >= config.n_datasets {
        return Err(Error::Config(format!(
            "dataset index {dataset_index} out of range for {} datasets",
            config.n_datasets
        )));
    }
    let mut stream = Stream::new(substream_seed(config.seed, dataset_index));
    let ln_c0 = config.c0_param.ln();
    let mut values: Vec<f64> = (0..config.n_articles)
        .map(|_| {
            let z = stream.next_normal();
            (config.lambda * (1.0 + z) * ln_c0).exp()
        })
        .collect();
    if config.integer_rounding {
        for v in &mut values {
            *v = v.round();
        }
    }
    values.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Same draw materialized as an integer citation list (always rounded).
pub fn generate_dataset(config: &SimConfig, dataset_index: u64) -> Result<CitationList> {
    let values = generate_values(config, dataset_index)?;
    let counts = values.into_iter().map(|v| v.round() as u64).collect();
    Ok(CitationList::from_counts(counts))
}

/// Which low-count entries stay in the log-log cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Keep 1 <= c < c0: sub-unit values drop out, the convention behind the
    /// lambda table.
    ExcludeBelowUnit,
    /// Keep 0 < c < c0: the pure order-statistic convention behind the
    /// N table.
    KeepPositive,
}

/// Population covariance cov(ln n, ln ln(c0/c_n)) over the surviving points.
/// This is the slope statistic the reference tables report.
pub fn covariance_slope(values: &[f64], tail: TailRule) -> Result<f64> {
    let points = match tail {
        TailRule::ExcludeBelowUnit => loglog_points_filtered(values, |c| c >= 1.0),
        TailRule::KeepPositive => loglog_points_filtered(values, |c| c > 0.0),
    }?;
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    Ok(points
        .iter()
        .map(|&(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<f64>()
        / n)
}

/// Least-squares exponent of one integer dataset (the A of
/// [`fit::fit_loglog`]), for inspecting single draws.
pub fn dataset_slope(list: &CitationList) -> Result<f64> {
    fit::fit_loglog(list).map(|(a, _, _)| a)
}

/// Runs every dataset of the config in parallel and aggregates the
/// covariance slopes. Datasets whose slope is undefined are counted, not
/// fatal; errors only when every dataset fails.
pub fn run_config(config: &SimConfig, tail: TailRule) -> Result<SimResult> {
    let outcomes: Vec<Result<f64>> = (0..config.n_datasets)
        .into_par_iter()
        .map(|i| {
            let values = generate_values(config, i)?;
            covariance_slope(&values, tail)
        })
        .collect();
    let mut slopes = Vec::with_capacity(outcomes.len());
    let mut failed = 0u64;
    for outcome in outcomes {
        match outcome {
            Ok(slope) => slopes.push(slope),
            Err(_) => failed += 1,
        }
    }
    if slopes.is_empty() {
        return Err(Error::Degenerate(
            "every dataset in the ensemble was degenerate".into(),
        ));
    }
    let n = slopes.len() as f64;
    let mean = slopes.iter().sum::<f64>() / n;
    let sd = (slopes.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n).sqrt();
    Ok(SimResult {
        config_echo: *config,
        failed_datasets: failed,
        mean_slope: mean,
        per_dataset_slopes: slopes,
        sd_slope: sd,
    })
}

/// One row per lambda at fixed N: continuous draws, sub-unit tail excluded.
/// Row r runs under substream r of the master seed.
pub fn run_lambda_table(
    lambdas: &[f64],
    n_articles: u64,
    n_datasets: u64,
    seed: u64,
) -> Result<Vec<SimResult>> {
    lambdas
        .iter()
        .enumerate()
        .map(|(row, &lambda)| {
            let config = SimConfig::new(
                lambda,
                DEFAULT_C0_PARAM,
                n_articles,
                n_datasets,
                substream_seed(seed, row as u64),
                false,
            )?;
            run_config(&config, TailRule::ExcludeBelowUnit)
        })
        .collect()
}

/// One row per article count at fixed lambda: continuous draws, every
/// positive value kept. Rows at N >= 100_000 cap the ensemble at 20 datasets
/// to bound runtime; row r runs under substream r of the master seed.
pub fn run_n_table(
    n_sizes: &[u64],
    n_datasets: u64,
    seed: u64,
    lambda: f64,
) -> Result<Vec<SimResult>> {
    n_sizes
        .iter()
        .enumerate()
        .map(|(row, &n_articles)| {
            let datasets = if n_articles >= 100_000 {
                n_datasets.min(20)
            } else {
                n_datasets
            };
            let config = SimConfig::new(
                lambda,
                DEFAULT_C0_PARAM,
                n_articles,
                datasets,
                substream_seed(seed, row as u64),
                false,
            )?;
            run_config(&config, TailRule::KeepPositive)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::benford_report;

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: got {actual}, expected {expected} +/- {tol}"
        );
    }

    #[test]
    fn mix64_and_substream_anchors() {
        assert_eq!(mix64(1), 0x5692161d100b05e5);
        assert_eq!(mix64(GOLDEN), 0xe220a8397b1dcdaf);
        assert_eq!(substream_seed(7, 3), 0x46f250de03ec3614);
        assert_eq!(substream_seed(42, 0), 0x97ea87f7e45c00a5);
        assert_ne!(substream_seed(7, 0), substream_seed(7, 1));
        assert_ne!(substream_seed(7, 0), substream_seed(8, 0));
    }

    #[test]
    fn stream_anchors() {
        let mut s = Stream::new(42);
        assert_eq!(s.next_u64(), 0xbdd732262feb6e95);
        assert_eq!(s.next_u64(), 0x28efe333b266f103);

        let mut s = Stream::new(42);
        assert_eq!(s.next_uniform(), 0.7415648787718234);

        let mut s = Stream::new(42);
        assert_close(s.next_normal(), 0.6481773613288522, 1e-9, "first normal");
    }

    #[test]
    fn uniforms_stay_strictly_inside_unit_interval() {
        let mut s = Stream::new(123);
        let mut sum = 0.0;
        for _ in 0..10_000 {
            let u = s.next_uniform();
            assert!(u > 0.0 && u < 1.0);
            sum += u;
        }
        assert_close(sum / 10_000.0, 0.5, 0.02, "uniform mean");
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0.25, 100.0, 200, 10, 1, false).is_ok());
        assert!(SimConfig::new(0.0, 100.0, 200, 10, 1, false).is_err());
        assert!(SimConfig::new(1.0, 100.0, 200, 10, 1, false).is_err());
        assert!(SimConfig::new(0.25, 1.0, 200, 10, 1, false).is_err());
        assert!(SimConfig::new(0.25, 100.0, 9, 10, 1, false).is_err());
        assert!(SimConfig::new(0.25, 100.0, 200, 0, 1, false).is_err());
    }

    #[test]
    fn config_serde_roundtrip_revalidates() {
        let config = SimConfig::new(0.3, 100.0, 200, 5, 17, true).unwrap();
        let text = serde_json::to_string(&config).unwrap();
        let back: SimConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);

        let bad = r#"{"lambda":1.5,"c0_param":100.0,"n_articles":200,"n_datasets":5,"seed":17,"integer_rounding":true}"#;
        assert!(serde_json::from_str::<SimConfig>(bad).is_err());
    }

    #[test]
    fn generated_values_are_ranked_and_positive() {
        let config = SimConfig::new(0.3, 100.0, 500, 2, 8, false).unwrap();
        let values = generate_values(&config, 0).unwrap();
        assert_eq!(values.len(), 500);
        for window in values.windows(2) {
            assert!(window[0] >= window[1], "not descending");
        }
        assert!(values.iter().all(|&v| v > 0.0));
        assert!(generate_values(&config, 2).is_err());

        let rounded = SimConfig::new(0.3, 100.0, 500, 2, 8, true).unwrap();
        let values = generate_values(&rounded, 0).unwrap();
        assert!(values.iter().all(|&v| v == v.round()));
    }

    #[test]
    fn generation_is_deterministic_and_streams_are_separated() {
        let config = SimConfig::new(0.25, 100.0, 100, 3, 5, false).unwrap();
        assert_eq!(
            generate_values(&config, 1).unwrap(),
            generate_values(&config, 1).unwrap()
        );
        assert_ne!(
            generate_values(&config, 0).unwrap(),
            generate_values(&config, 1).unwrap()
        );
        let dataset = generate_dataset(&config, 0).unwrap();
        let values = generate_values(&config, 0).unwrap();
        let rounded: Vec<u64> = values.iter().map(|&v| v.round() as u64).collect();
        let mut sorted = rounded.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(dataset.counts(), &sorted[..]);
    }

    #[test]
    fn log_mean_obeys_large_numbers() {
        // E[ln c] = lambda ln c0; at N = 10_000 the sample mean sits within 2%.
        let config = SimConfig::new(0.25, 100.0, 10_000, 1, 42, false).unwrap();
        let values = generate_values(&config, 0).unwrap();
        let mean_ln = values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64;
        let expected = 0.25 * 100.0f64.ln();
        assert!(
            (mean_ln / expected - 1.0).abs() <= 0.02,
            "mean ln = {mean_ln}, expected about {expected}"
        );
    }

    #[test]
    fn covariance_slope_matches_hand_computation() {
        let values = [100.0, 20.0, 5.0, 0.4];
        // ExcludeBelowUnit keeps (ln 1, lnln(100/20)) and (ln 2, lnln(100/5)).
        let x = [0.0, 2.0f64.ln()];
        let y = [5.0f64.ln().ln(), 20.0f64.ln().ln()];
        let mean_x = (x[0] + x[1]) / 2.0;
        let mean_y = (y[0] + y[1]) / 2.0;
        let expected = ((x[0] - mean_x) * (y[0] - mean_y) + (x[1] - mean_x) * (y[1] - mean_y)) / 2.0;
        assert_close(
            covariance_slope(&values, TailRule::ExcludeBelowUnit).unwrap(),
            expected,
            1e-12,
            "two-point covariance",
        );
        // KeepPositive admits the 0.4 entry as a third point.
        let x2 = [0.0, 2.0f64.ln(), 3.0f64.ln()];
        let y2 = [
            5.0f64.ln().ln(),
            20.0f64.ln().ln(),
            250.0f64.ln().ln(),
        ];
        let mx = x2.iter().sum::<f64>() / 3.0;
        let my = y2.iter().sum::<f64>() / 3.0;
        let expected = x2
            .iter()
            .zip(&y2)
            .map(|(a, b)| (a - mx) * (b - my))
            .sum::<f64>()
            / 3.0;
        assert_close(
            covariance_slope(&values, TailRule::KeepPositive).unwrap(),
            expected,
            1e-12,
            "three-point covariance",
        );
    }

    #[test]
    fn single_dataset_regression_slope_is_plausible() {
        let config = SimConfig::new(0.25, 100.0, 200, 1, 42, true).unwrap();
        let dataset = generate_dataset(&config, 0).unwrap();
        let slope = dataset_slope(&dataset).unwrap();
        assert!(
            (0.2..0.6).contains(&slope),
            "regression slope {slope} outside the plausible band"
        );
    }

    #[test]
    fn run_config_aggregates_in_dataset_order() {
        let config = SimConfig::new(0.3, 100.0, 50, 8, 9, false).unwrap();
        let result = run_config(&config, TailRule::ExcludeBelowUnit).unwrap();
        assert_eq!(result.per_dataset_slopes.len(), 8);
        assert_eq!(result.failed_datasets, 0);
        for (i, &slope) in result.per_dataset_slopes.iter().enumerate() {
            let values = generate_values(&config, i as u64).unwrap();
            assert_eq!(
                slope,
                covariance_slope(&values, TailRule::ExcludeBelowUnit).unwrap(),
                "dataset {i} out of order"
            );
        }
        let n = result.per_dataset_slopes.len() as f64;
        let mean = result.per_dataset_slopes.iter().sum::<f64>() / n;
        assert_close(result.mean_slope, mean, 1e-15, "mean");
        assert_eq!(result.config_echo, config);

        let again = run_config(&config, TailRule::ExcludeBelowUnit).unwrap();
        assert_eq!(again, result);
    }

    #[test]
    fn run_config_reports_total_degeneracy() {
        // lambda so small that every rounded value is 1: no usable points.
        let config = SimConfig::new(0.05, 3.0, 10, 4, 11, true).unwrap();
        assert!(matches!(
            run_config(&config, TailRule::ExcludeBelowUnit),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn lambda_table_slopes_are_insensitive_to_lambda() {
        let rows = run_lambda_table(&LAMBDA_TABLE_LAMBDAS, 200, 100, 7).unwrap();
        assert_eq!(rows.len(), 6);
        let means: Vec<f64> = rows.iter().map(|r| r.mean_slope).collect();
        let spread = means.iter().cloned().fold(f64::MIN, f64::max)
            - means.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            spread < 0.05,
            "slope means {means:?} spread {spread} across lambda"
        );
    }

    #[test]
    fn n_table_slopes_decrease_with_n() {
        let rows = run_n_table(&[100, 1_000, 10_000], 60, 7, 0.25).unwrap();
        let means: Vec<f64> = rows.iter().map(|r| r.mean_slope).collect();
        assert!(
            means[0] > means[1] && means[1] > means[2],
            "means not decreasing: {means:?}"
        );
    }

    #[test]
    fn n_table_caps_large_rows_at_twenty_datasets() {
        let rows = run_n_table(&[100_000], 100, 3, 0.25).unwrap();
        assert_eq!(rows[0].config_echo.n_datasets(), 20);
        assert_eq!(rows[0].per_dataset_slopes.len(), 20);
    }

    #[test]
    fn generated_dataset_is_roughly_benford() {
        let config = SimConfig::new(0.3, 100.0, 10_000, 1, 42, true).unwrap();
        let dataset = generate_dataset(&config, 0).unwrap();
        let report = benford_report(&dataset).unwrap();
        assert!(
            report.max_abs_deviation < 0.05,
            "digit deviation {}",
            report.max_abs_deviation
        );
    }
}
