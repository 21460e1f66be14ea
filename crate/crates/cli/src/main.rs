//! `pcakit`: adequacy-screened principal-component analysis of a CSV file.
//!
//! Exit status: 0 on success, 1 on input or usage errors, 2 when the data
//! itself fails the analysis (adequacy gates, over-exclusion, degenerate
//! correlation structure) — in that case the screening diagnostics are still
//! printed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pcakit::extraction::scree_data;
use pcakit::pipeline::{
    run_pipeline, ExclusionMode, PipelineConfig, Retention, RotatePolicy,
};
use pcakit::report::{render_failure, render_report, ReportFormat};
use pcakit::scoring::compute_scores;
use pcakit::stats::{standardize, DataMatrix};
use pcakit_cli::{ingest_csv, scores_csv, scree_csv, scree_svg};

/// Principal-component analysis with adequacy screening, varimax rotation,
/// and component scores.
#[derive(Debug, Parser)]
#[command(name = "pcakit", version, disable_help_flag = false)]
struct Cli {
    /// Input CSV: a header row of variable names, then one observation per
    /// row.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    /// Report format written to stdout: "text" or "json".
    #[arg(long, value_name = "FMT", default_value = "text", value_parser = parse_format)]
    format: ReportFormat,

    /// Exclude variables with MSA below this threshold.
    #[arg(long, value_name = "T", default_value_t = 0.50)]
    msa_threshold: f64,

    /// Require at least this overall KMO to proceed.
    #[arg(long, value_name = "T", default_value_t = 0.50)]
    kmo_threshold: f64,

    /// Significance level for Bartlett's sphericity test.
    #[arg(long, value_name = "A", default_value_t = 0.01)]
    alpha: f64,

    /// Component retention: "kaiser" or a fixed count.
    #[arg(long, value_name = "RULE", default_value = "kaiser", value_parser = parse_retain)]
    retain: Retention,

    /// Rotation policy: "always", "on-complex", or "never".
    #[arg(long, value_name = "WHEN", default_value = "always", value_parser = parse_rotate)]
    rotate: RotatePolicy,

    /// Exclusion mode for low-MSA variables: "batch" or "iterative".
    #[arg(long, value_name = "MODE", default_value = "batch", value_parser = parse_exclusion)]
    exclusion: ExclusionMode,

    /// Write scree data here; ".csv" for two columns, ".svg" for a chart.
    #[arg(long, value_name = "PATH")]
    scree_out: Option<PathBuf>,

    /// Write per-observation component scores here as CSV.
    #[arg(long, value_name = "PATH")]
    scores_out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_retain(s: &str) -> Result<Retention, String> {
    if s == "kaiser" {
        return Ok(Retention::Kaiser);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(Retention::Fixed(k)),
        _ => Err(format!(
            "expected \"kaiser\" or a positive component count, got {s:?}"
        )),
    }
}

fn parse_rotate(s: &str) -> Result<RotatePolicy, String> {
    match s {
        "always" => Ok(RotatePolicy::Always),
        "on-complex" => Ok(RotatePolicy::OnComplex),
        "never" => Ok(RotatePolicy::Never),
        other => Err(format!(
            "expected \"always\", \"on-complex\", or \"never\", got {other:?}"
        )),
    }
}

fn parse_exclusion(s: &str) -> Result<ExclusionMode, String> {
    match s {
        "batch" => Ok(ExclusionMode::Batch),
        "iterative" => Ok(ExclusionMode::Iterative),
        other => Err(format!(
            "expected \"batch\" or \"iterative\", got {other:?}"
        )),
    }
}

const USAGE_HINT: &str = "usage: pcakit --input <PATH> [--format text|json] [--msa-threshold T] \
                          [--kmo-threshold T] [--alpha A] [--retain kaiser|N] \
                          [--rotate always|on-complex|never] [--exclusion batch|iterative] \
                          [--scree-out PATH] [--scores-out PATH]";

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too; they are not errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}

fn run(cli: Cli) -> u8 {
    let data = match ingest_csv(&cli.input) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: input: {e}");
            eprintln!("{USAGE_HINT}");
            return 1;
        }
    };

    let config = PipelineConfig {
        msa_threshold: cli.msa_threshold,
        kmo_threshold: cli.kmo_threshold,
        bartlett_alpha: cli.alpha,
        retention: cli.retain,
        rotate: cli.rotate,
        exclusion: cli.exclusion,
        ..PipelineConfig::default()
    };

    let report = match run_pipeline(&data, &config) {
        Ok(report) => report,
        Err(err) => {
            // Bad thresholds or a malformed dataset are the caller's
            // mistake; everything else is the data failing the analysis.
            if err.stage == "configuration" || err.stage == "input validation" {
                eprintln!("error: {err}");
                eprintln!("{USAGE_HINT}");
                return 1;
            }
            print!("{}", render_failure(&err, cli.format));
            eprintln!("error: {err}");
            return 2;
        }
    };

    print!("{}", render_report(&report, cli.format));

    if let Some(path) = &cli.scree_out {
        let points = match scree_data(&report.eigen.eigenvalues) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: scree export: {e}");
                return 1;
            }
        };
        let rendered = match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => scree_csv(&points),
            Some("svg") => scree_svg(&points),
            _ => {
                eprintln!(
                    "error: scree export: {} must end in .csv or .svg",
                    path.display()
                );
                return 1;
            }
        };
        if let Err(e) = std::fs::write(path, rendered) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
    }

    if let Some(path) = &cli.scores_out {
        let scores = match final_scores(&data, &report) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: scores export: {e}");
                return 1;
            }
        };
        let rendered = scores_csv(report.coefficients.component_labels(), &scores);
        if let Err(e) = std::fs::write(path, rendered) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
    }

    0
}

/// Scores for every observation on the surviving variables: re-derive the
/// final variable set from the screening rounds, standardize, and apply the
/// report's coefficients.
fn final_scores(
    data: &DataMatrix,
    report: &pcakit::pipeline::PipelineReport,
) -> pcakit::Result<Vec<Vec<f64>>> {
    let excluded: Vec<String> = report
        .rounds
        .iter()
        .flat_map(|r| r.excluded.iter().cloned())
        .collect();
    let surviving = if excluded.is_empty() {
        data.clone()
    } else {
        data.without(&excluded)?
    };
    let standardized = standardize(&surviving)?;
    compute_scores(&standardized, &report.coefficients)
}
