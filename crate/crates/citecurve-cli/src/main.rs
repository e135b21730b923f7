//! citecurve: fit the decay law c_n = c0·e^{-P·n^A} to ranked citation
//! counts, compute the classical indices, test first-digit and log-normal
//! behaviour, and rerun the seeded simulation tables.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 degenerate
//! data. Analysis output is JSON on standard output with lexicographic key
//! order; `report` writes files instead.

mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use citecurve::core::{metrics_summary, CitationList};
use citecurve::dist::{benford_report, normalized_log_stats, slope_asymptote};
use citecurve::fit::{self, FitReport};
use citecurve::sim::{
    run_config, run_lambda_table, run_n_table, SimConfig, TailRule, DEFAULT_C0_PARAM,
    LAMBDA_TABLE_LAMBDAS, N_TABLE_SIZES,
};

use input::InputFormat;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Parse(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Parse(m) | CliError::Data(m) => m,
        }
    }
}

/// Analysis failures map to the data exit code unless the message points at
/// an argument the user controls.
fn data_error(e: citecurve::Error) -> CliError {
    CliError::Data(e.to_string())
}

fn usage_error(e: citecurve::Error) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser)]
#[command(name = "citecurve", version, about = "Citation-curve fitting and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Totals, h-index, i10/i20 and the first-digit histogram.
    Metrics {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
    },
    /// Decay-law estimates at a fixed exponent A or with A fitted freely.
    Fit {
        file: PathBuf,
        /// Rate exponent in (0, 1), or 'free' to take A from the regression.
        #[arg(long = "A", default_value = "free", value_name = "A|free")]
        a: String,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
    },
    /// First-digit frequencies against Benford's law.
    Benford {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
    },
    /// Moments of ln(c)/ln(c0) and the lambda estimates.
    Lognormal {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
    },
    /// Model predictions from given c0 and A: the i_j/i_k ratio or the
    /// h-index implied by an observed i10.
    Predict(PredictArgs),
    /// One seeded synthetic ensemble; reports the covariance-slope summary.
    Simulate(SimulateArgs),
    /// The reference slope tables, rerun under an explicit seed.
    Table(TableArgs),
    /// Full analysis report plus plot-ready TSVs, written to a directory.
    Report {
        file: PathBuf,
        /// Output directory for report.json, curve.tsv and loglog.tsv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
    },
}

#[derive(Args)]
struct PredictArgs {
    /// Top citation count of the model.
    #[arg(long)]
    c0: f64,
    /// Rate exponent in (0, 1).
    #[arg(long = "A")]
    a: f64,
    /// Predict i_J/i_K for thresholds J and K.
    #[arg(long, num_args = 2, value_names = ["J", "K"], conflicts_with_all = ["h", "i10"])]
    iratio: Option<Vec<u64>>,
    /// Predict the h-index; requires --i10.
    #[arg(long, requires = "i10")]
    h: bool,
    /// Observed number of publications with at least 10 citations.
    #[arg(long, requires = "h")]
    i10: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Mean and spread parameter of ln(c)/ln(c0), in (0, 1).
    #[arg(long)]
    lambda: f64,
    /// Articles per dataset (at least 10).
    #[arg(long)]
    n: u64,
    /// Number of datasets in the ensemble.
    #[arg(long)]
    datasets: u64,
    /// Master seed; equal seeds give byte-identical output.
    #[arg(long)]
    seed: u64,
    /// c0 parameter of the generator.
    #[arg(long, default_value_t = DEFAULT_C0_PARAM)]
    c0param: f64,
    /// Keep real-valued counts instead of rounding to integers.
    #[arg(long)]
    continuous: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Which table to rerun.
    #[arg(value_enum)]
    kind: TableKind,
    /// Master seed; row r derives substream r.
    #[arg(long)]
    seed: u64,
    /// Datasets per row (nscale rows at N >= 100000 are capped at 20).
    #[arg(long, default_value_t = 100)]
    datasets: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    /// Slope vs lambda at N = 200.
    Lambda,
    /// Slope vs article count at lambda = 0.25.
    Nscale,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("citecurve: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Metrics { file, format } => {
            let list = load_list(&file, format)?;
            print_json(&metrics_summary(&list))
        }
        Command::Fit { file, a, format } => {
            let list = load_list(&file, format)?;
            let output = fit_output(&list, &a)?;
            print_json(&output)
        }
        Command::Benford { file, format } => {
            let list = load_list(&file, format)?;
            print_json(&benford_report(&list).map_err(data_error)?)
        }
        Command::Lognormal { file, format } => {
            let list = load_list(&file, format)?;
            print_json(&normalized_log_stats(&list).map_err(data_error)?)
        }
        Command::Predict(args) => predict(args),
        Command::Simulate(args) => simulate(args),
        Command::Table(args) => table(args),
        Command::Report { file, out, format } => {
            let list = load_list(&file, format)?;
            let (analysis, model) = report::build_analysis_report(&list, &file.display().to_string())?;
            report::write_report_files(&analysis, &list, &model, &out)?;
            eprintln!(
                "wrote {}, {}, {}",
                out.join("report.json").display(),
                out.join("curve.tsv").display(),
                out.join("loglog.tsv").display()
            );
            Ok(())
        }
    }
}

fn load_list(path: &std::path::Path, format: InputFormat) -> Result<CitationList, CliError> {
    let records = input::parse_input(path, format)?;
    if records.is_empty() {
        return Err(CliError::Data(format!(
            "{}: input contains no records",
            path.display()
        )));
    }
    Ok(input::to_citation_list(&records))
}

#[derive(Serialize)]
struct FitOutput {
    a_used: f64,
    mode: &'static str,
    report: FitReport,
    warnings: Vec<String>,
}

fn fit_output(list: &CitationList, a_flag: &str) -> Result<FitOutput, CliError> {
    if a_flag == "free" {
        let mut warnings = Vec::new();
        let a_used = match fit::fit_loglog(list) {
            Ok((a, _, _)) if a > 0.0 && a < 1.0 => a,
            Ok((a, _, _)) => {
                warnings.push(format!(
                    "regression exponent {a:.4} lies outside (0, 1); estimates evaluated at A = 0.5"
                ));
                0.5
            }
            Err(e) => {
                warnings.push(format!(
                    "log-log regression unavailable ({e}); estimates evaluated at A = 0.5"
                ));
                0.5
            }
        };
        let report = fit::fixed_a_fit(list, a_used).map_err(data_error)?;
        Ok(FitOutput {
            a_used,
            mode: "free",
            report,
            warnings,
        })
    } else {
        let a: f64 = a_flag.parse().map_err(|_| {
            CliError::Usage(format!(
                "--A takes a real number in (0, 1) or 'free', got '{a_flag}'"
            ))
        })?;
        let report = match fit::fixed_a_fit(list, a) {
            Ok(r) => r,
            Err(e @ citecurve::Error::Domain(_)) => return Err(usage_error(e)),
            Err(e) => return Err(data_error(e)),
        };
        Ok(FitOutput {
            a_used: a,
            mode: "fixed",
            report,
            warnings: Vec::new(),
        })
    }
}

#[derive(Serialize)]
struct IRatioPrediction {
    a: f64,
    c0: f64,
    j: u64,
    k: u64,
    predicted_ratio: f64,
}

#[derive(Serialize)]
struct HPrediction {
    a: f64,
    c0: f64,
    i10: u64,
    k_constant: f64,
    predicted_h: f64,
}

fn predict(args: PredictArgs) -> Result<(), CliError> {
    match (&args.iratio, args.h) {
        (Some(thresholds), false) => {
            let (j, k) = (thresholds[0], thresholds[1]);
            let ratio = fit::predict_i_ratio(args.c0, args.a, j, k).map_err(usage_error)?;
            print_json(&IRatioPrediction {
                a: args.a,
                c0: args.c0,
                j,
                k,
                predicted_ratio: ratio,
            })
        }
        (None, true) => {
            let i10 = args.i10.expect("clap enforces --i10 with --h");
            let k_constant = fit::h_constant(args.c0, args.a, 10, i10).map_err(usage_error)?;
            let h = fit::predict_h(args.c0, args.a, i10).map_err(usage_error)?;
            print_json(&HPrediction {
                a: args.a,
                c0: args.c0,
                i10,
                k_constant,
                predicted_h: h,
            })
        }
        _ => Err(CliError::Usage(
            "choose exactly one of --iratio J K or --h --i10 IK".into(),
        )),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let config = SimConfig::new(
        args.lambda,
        args.c0param,
        args.n,
        args.datasets,
        args.seed,
        !args.continuous,
    )
    .map_err(usage_error)?;
    let result = run_config(&config, TailRule::ExcludeBelowUnit).map_err(data_error)?;
    print_json(&result)
}

#[derive(Serialize)]
struct LambdaRow {
    failed_datasets: u64,
    lambda: f64,
    mean_slope: f64,
    n_datasets: u64,
    sd_slope: f64,
}

#[derive(Serialize)]
struct LambdaTableOutput {
    n_articles: u64,
    rows: Vec<LambdaRow>,
    seed: u64,
    table: &'static str,
}

#[derive(Serialize)]
struct NscaleRow {
    asymptote: f64,
    failed_datasets: u64,
    mean_slope: f64,
    n_articles: u64,
    n_datasets: u64,
    ratio: f64,
    sd_slope: f64,
}

#[derive(Serialize)]
struct NscaleTableOutput {
    lambda: f64,
    rows: Vec<NscaleRow>,
    seed: u64,
    table: &'static str,
}

fn table(args: TableArgs) -> Result<(), CliError> {
    match args.kind {
        TableKind::Lambda => {
            let results =
                run_lambda_table(&LAMBDA_TABLE_LAMBDAS, 200, args.datasets, args.seed)
                    .map_err(data_error)?;
            let rows = results
                .iter()
                .map(|r| LambdaRow {
                    failed_datasets: r.failed_datasets,
                    lambda: r.config_echo.lambda(),
                    mean_slope: r.mean_slope,
                    n_datasets: r.config_echo.n_datasets(),
                    sd_slope: r.sd_slope,
                })
                .collect();
            print_json(&LambdaTableOutput {
                n_articles: 200,
                rows,
                seed: args.seed,
                table: "lambda",
            })
        }
        TableKind::Nscale => {
            let lambda = 0.25;
            let results =
                run_n_table(&N_TABLE_SIZES, args.datasets, args.seed, lambda).map_err(data_error)?;
            let rows = results
                .iter()
                .map(|r| {
                    let n_articles = r.config_echo.n_articles();
                    let asymptote =
                        slope_asymptote(n_articles).expect("table sizes are all >= 3");
                    NscaleRow {
                        asymptote,
                        failed_datasets: r.failed_datasets,
                        mean_slope: r.mean_slope,
                        n_articles,
                        n_datasets: r.config_echo.n_datasets(),
                        ratio: r.mean_slope / asymptote,
                        sd_slope: r.sd_slope,
                    }
                })
                .collect();
            print_json(&NscaleTableOutput {
                lambda,
                rows,
                seed: args.seed,
                table: "nscale",
            })
        }
    }
}

/// Serializes through Value first: serde_json maps are sorted, so key order
/// is lexicographic and stable.
fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let value = serde_json::to_value(value)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    let text = serde_json::to_string_pretty(&value)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    match writeln!(std::io::stdout(), "{text}") {
        Ok(()) => Ok(()),
        // A closed pipe (output truncated by head, jq -e, ...) is not an error.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(CliError::Io(format!("stdout: {e}"))),
    }
}
