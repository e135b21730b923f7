//! The full analysis report and its plot-ready companions.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use citecurve::core::{i_index, metrics_summary, CitationList, MetricsSummary};
use citecurve::dist::{benford_report, normalized_log_stats, BenfordReport, LogNormalSummary};
use citecurve::fit::{self, FitReport, PowerLawModel};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub input: String,
    pub timestamp: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    pub a: f64,
    pub c0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_predicted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i10_i20_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_constant: Option<f64>,
    /// Where the model parameters came from: "free_fit" or "anchor_a_0.5".
    pub model_source: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub benford: BenfordReport,
    /// Keyed "a_0.40", "a_0.50" and "free".
    pub fits: BTreeMap<String, FitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lognormal: Option<LogNormalSummary>,
    pub metrics: MetricsSummary,
    pub predictions: Predictions,
    pub provenance: Provenance,
    pub schema_version: u32,
    pub warnings: Vec<String>,
}

/// Assembles the report. Fails with the data exit code when nothing is
/// cited; individual analyses that do not apply become warnings instead.
pub fn build_analysis_report(
    list: &CitationList,
    input_name: &str,
) -> Result<(AnalysisReport, PowerLawModel), CliError> {
    let metrics = metrics_summary(list);
    let benford = benford_report(list).map_err(|e| CliError::Data(e.to_string()))?;
    let mut warnings = Vec::new();

    let lognormal = match normalized_log_stats(list) {
        Ok(summary) => Some(summary),
        Err(e) => {
            warnings.push(format!("log-normal summary unavailable: {e}"));
            None
        }
    };

    let mut fits = BTreeMap::new();
    for a in [0.4, 0.5] {
        match fit::fixed_a_fit(list, a) {
            Ok(report) => {
                fits.insert(format!("a_{a:.2}"), report);
            }
            Err(e) => warnings.push(format!("fit at A = {a:.2} unavailable: {e}")),
        }
    }
    let free = fit::fit_loglog(list);
    match &free {
        Ok((a, _, _)) if *a > 0.0 && *a < 1.0 => match fit::fixed_a_fit(list, *a) {
            Ok(report) => {
                fits.insert("free".into(), report);
            }
            Err(e) => warnings.push(format!("free fit unavailable: {e}")),
        },
        Ok((a, _, _)) => warnings.push(format!(
            "free regression exponent {a:.4} lies outside (0, 1)"
        )),
        Err(e) => warnings.push(format!("log-log regression unavailable: {e}")),
    }

    let (model, model_source) = select_model(list, &free, &mut warnings)?;
    let predictions = build_predictions(list, &model, model_source);

    let report = AnalysisReport {
        benford,
        fits,
        lognormal,
        metrics,
        predictions,
        provenance: Provenance {
            input: input_name.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        schema_version: 1,
        warnings,
    };
    Ok((report, model))
}

/// The free fit when it lands in range; otherwise the A = 0.5 anchor with P
/// from the area estimator, which exists for any cited list.
fn select_model(
    list: &CitationList,
    free: &citecurve::Result<(f64, f64, f64)>,
    warnings: &mut Vec<String>,
) -> Result<(PowerLawModel, &'static str), CliError> {
    if let Ok((a, p, _)) = free {
        if let Ok(model) = PowerLawModel::new(list.top() as f64, *p, *a) {
            return Ok((model, "free_fit"));
        }
    }
    warnings.push("plots and predictions anchored at A = 0.5".into());
    let p = fit::estimate_p_area(list, 0.5)
        .map_err(|e| CliError::Data(format!("no usable model: {e}")))?;
    let model = PowerLawModel::new(list.top() as f64, p, 0.5)
        .map_err(|e| CliError::Data(format!("no usable model: {e}")))?;
    Ok((model, "anchor_a_0.5"))
}

fn build_predictions(list: &CitationList, model: &PowerLawModel, source: &str) -> Predictions {
    let (c0, a) = (model.c0(), model.a());
    let i10 = i_index(list, 10).expect("threshold 10 is valid");
    let (k_constant, h_predicted) = if i10 >= 1 {
        match fit::h_constant(c0, a, 10, i10) {
            Ok(k) => (Some(k), fit::solve_h_for_constant(c0, a, k).ok()),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    Predictions {
        a,
        c0,
        h_predicted,
        i10_i20_ratio: fit::predict_i_ratio(c0, a, 10, 20).ok(),
        k_constant,
        model_source: source.to_string(),
        p: model.p(),
    }
}

/// Writes report.json plus both TSVs into the directory, creating it first.
pub fn write_report_files(
    report: &AnalysisReport,
    list: &CitationList,
    model: &PowerLawModel,
    out_dir: &Path,
) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let value = serde_json::to_value(report)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_file(&out_dir.join("report.json"), &text)?;
    emit_plot_data(list, model, out_dir)
}

/// curve.tsv holds every rank with observed and predicted counts; loglog.tsv
/// holds the surviving transformed points with the fitted line. Tab
/// separators, '#' header, '\n' endings, 9 significant digits.
pub fn emit_plot_data(
    list: &CitationList,
    model: &PowerLawModel,
    out_dir: &Path,
) -> Result<(), CliError> {
    let mut curve = String::from("# rank\tobserved\tpredicted\n");
    for (n, &c) in list.counts().iter().enumerate() {
        curve.push_str(&format!(
            "{}\t{:.8e}\t{:.8e}\n",
            n,
            c as f64,
            fit::predict_count(model, n as u64)
        ));
    }
    write_file(&out_dir.join("curve.tsv"), &curve)?;

    let mut loglog = String::from("# ln_rank\tln_decay\tfit_line\n");
    if let Ok(points) = fit::loglog_points(list) {
        let ln_p = model.p().ln();
        for (x, y) in points {
            loglog.push_str(&format!(
                "{:.8e}\t{:.8e}\t{:.8e}\n",
                x,
                y,
                ln_p + model.a() * x
            ));
        }
    }
    write_file(&out_dir.join("loglog.tsv"), &loglog)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use citecurve::core::make_citation_list;

    fn sample_list() -> CitationList {
        let raw: Vec<i64> = (0..60)
            .map(|n| (150.0 * (-0.5 * (n as f64).sqrt()).exp()).round() as i64)
            .collect();
        make_citation_list(&raw).unwrap()
    }

    #[test]
    fn report_round_trips_through_json() {
        let list = sample_list();
        let (report, _) = build_analysis_report(&list, "sample.csv").unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn report_has_expected_fit_keys_and_schema() {
        let list = sample_list();
        let (report, model) = build_analysis_report(&list, "sample.csv").unwrap();
        assert_eq!(report.schema_version, 1);
        assert!(report.fits.contains_key("a_0.40"));
        assert!(report.fits.contains_key("a_0.50"));
        assert!(report.fits.contains_key("free"));
        assert!(report.lognormal.is_some());
        assert_eq!(report.predictions.c0, model.c0());
        assert_eq!(report.predictions.model_source, "free_fit");
        assert!(report.predictions.h_predicted.is_some());
        assert_eq!(report.provenance.input, "sample.csv");
    }

    #[test]
    fn degenerate_list_is_a_data_error() {
        let list = make_citation_list(&[0, 0, 0]).unwrap();
        let err = build_analysis_report(&list, "zeros.csv").unwrap_err();
        assert!(matches!(err, CliError::Data(_)), "{err:?}");
    }

    #[test]
    fn anchor_model_covers_regression_failures() {
        // [100, 100]: no regression possible, but the area anchor exists.
        let list = make_citation_list(&[100, 100]).unwrap();
        let (report, model) = build_analysis_report(&list, "pair.csv").unwrap();
        assert_eq!(model.a(), 0.5);
        assert_eq!(report.predictions.model_source, "anchor_a_0.5");
        assert!(report
            .warnings
            .iter()
            .any(|w| w.contains("anchored at A = 0.5")));
        assert!(report.fits.contains_key("a_0.50"));
        assert!(!report.fits.contains_key("free"));
    }
}
