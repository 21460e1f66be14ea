//! Report rendering: plain text for terminals, JSON for machines.
//!
//! Text output rounds every numeric cell to three decimals and normalizes
//! negative zero; JSON output serializes the report verbatim at full
//! precision so downstream tools can re-derive anything. Both renderings
//! are deterministic for a given report.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::adequacy::classify_msa;
use crate::error::Error;
use crate::extraction::LoadingMatrix;
use crate::pipeline::{PipelineError, PipelineReport, ScreeningRound};
use crate::scoring::ScoreCoefficients;

/// Output format for a rendered report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidInput(format!(
                "unknown report format {other:?}; expected \"text\" or \"json\""
            ))),
        }
    }
}

/// Three-decimal rendering with negative zero folded to "0.000".
fn fmt3(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn name_width<'a>(names: impl Iterator<Item = &'a str>, header: &str) -> usize {
    names.map(str::len).chain([header.len()]).max().unwrap_or(0)
}

fn section(out: &mut String, title: &str) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{}", "-".repeat(title.len()));
}

fn write_rounds(out: &mut String, rounds: &[ScreeningRound]) {
    section(out, "Adequacy");
    for (idx, round) in rounds.iter().enumerate() {
        let _ = writeln!(
            out,
            "Round {}: {} variables ({})",
            idx + 1,
            round.variables.len(),
            round.variables.join(", ")
        );
        let w = name_width(round.variables.iter().map(String::as_str), "variable");
        let _ = writeln!(out, "  {:<w$}  {:>7}  rating", "variable", "MSA");
        for (name, &msa) in round.variables.iter().zip(&round.adequacy.msa) {
            let rating = classify_msa(msa).expect("MSA lies in [0, 1]");
            let _ = writeln!(out, "  {name:<w$}  {:>7}  {rating}", fmt3(msa));
        }
        if round.excluded.is_empty() {
            let _ = writeln!(out, "  excluded: none");
        } else {
            let _ = writeln!(out, "  excluded: {}", round.excluded.join(", "));
        }
        let kmo_rating = classify_msa(round.adequacy.kmo).expect("KMO lies in [0, 1]");
        let _ = writeln!(out, "  KMO: {} ({kmo_rating})", fmt3(round.adequacy.kmo));
        let _ = writeln!(out, "  verdict: {}", round.adequacy.kmo_verdict.message);
        let _ = writeln!(
            out,
            "  Bartlett: chi-square {}, df {}, p {}",
            fmt3(round.adequacy.bartlett_stat),
            round.adequacy.bartlett_df,
            fmt3(round.adequacy.bartlett_p)
        );
        let _ = writeln!(out, "  verdict: {}", round.adequacy.bartlett_verdict.message);
        let _ = writeln!(out);
    }
}

fn write_loading_table(out: &mut String, l: &LoadingMatrix) {
    let w = name_width(l.variable_names().iter().map(String::as_str), "variable");
    let mut header = format!("  {:<w$}", "variable");
    for label in l.component_labels() {
        let _ = write!(header, "  {label:>8}");
    }
    let _ = writeln!(out, "{header}");
    for (j, name) in l.variable_names().iter().enumerate() {
        let mut line = format!("  {name:<w$}");
        for k in 0..l.m() {
            let _ = write!(line, "  {:>8}", fmt3(l.get(j, k)));
        }
        let _ = writeln!(out, "{line}");
    }
}

fn write_coefficient_table(out: &mut String, c: &ScoreCoefficients) {
    let w = name_width(c.variable_names().iter().map(String::as_str), "variable");
    let mut header = format!("  {:<w$}", "variable");
    for label in c.component_labels() {
        let _ = write!(header, "  {label:>8}");
    }
    let _ = writeln!(out, "{header}");
    for (j, name) in c.variable_names().iter().enumerate() {
        let mut line = format!("  {name:<w$}");
        for k in 0..c.m() {
            let _ = write!(line, "  {:>8}", fmt3(c.get(j, k)));
        }
        let _ = writeln!(out, "{line}");
    }
}

fn render_text(report: &PipelineReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pcakit {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out);

    write_rounds(&mut out, &report.rounds);

    section(&mut out, "Eigenvalues");
    let _ = writeln!(out, "  {:>9}  {:>10}", "component", "eigenvalue");
    for (k, &lambda) in report.eigen.eigenvalues.iter().enumerate() {
        let _ = writeln!(out, "  {:>9}  {:>10}", k + 1, fmt3(lambda));
    }
    let _ = writeln!(out);

    section(&mut out, "Variance");
    let _ = writeln!(
        out,
        "  {:>9}  {:>10}  {:>13}  {:>12}",
        "component", "eigenvalue", "% of variance", "cumulative %"
    );
    for row in &report.variance.rows {
        let _ = writeln!(
            out,
            "  {:>9}  {:>10}  {:>13}  {:>12}",
            row.component,
            fmt3(row.eigenvalue),
            fmt3(row.percent_of_variance),
            fmt3(row.cumulative_percent)
        );
    }
    let _ = writeln!(out);

    section(&mut out, "Loadings");
    let _ = writeln!(out, "  components retained: {}", report.retained);
    write_loading_table(&mut out, &report.unrotated);
    if report.complex_variables.is_empty() {
        let _ = writeln!(out, "  complex structure: none");
    } else {
        let _ = writeln!(
            out,
            "  complex structure: {}",
            report.complex_variables.join(", ")
        );
    }
    let _ = writeln!(out);

    section(&mut out, "Rotated Loadings");
    match (&report.rotated, &report.rotation) {
        (Some(rotated), Some(rotation)) => {
            let _ = writeln!(
                out,
                "  varimax with Kaiser normalization, {} sweep(s)",
                rotation.sweeps
            );
            write_loading_table(&mut out, rotated);
        }
        _ => {
            let _ = writeln!(out, "  (not performed)");
        }
    }
    let _ = writeln!(out);

    section(&mut out, "Score Coefficients");
    write_coefficient_table(&mut out, &report.coefficients);

    if !report.warnings.is_empty() {
        let _ = writeln!(out);
        section(&mut out, "Warnings");
        for w in &report.warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    out
}

/// Renders a successful pipeline report.
///
/// Text output carries a version banner and three-decimal tables; JSON is
/// the full-precision serialization of the report and never includes the
/// banner.
pub fn render_report(report: &PipelineReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .expect("pipeline reports contain only finite numbers and strings");
            s.push('\n');
            s
        }
    }
}

/// Renders a pipeline failure together with whatever screening rounds
/// completed, so a gate failure still shows its diagnostics.
pub fn render_failure(error: &PipelineError, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "pcakit {}", env!("CARGO_PKG_VERSION"));
            let _ = writeln!(out);
            let _ = writeln!(out, "error: {error}");
            if !error.rounds.is_empty() {
                let _ = writeln!(out);
                write_rounds(&mut out, &error.rounds);
            }
            out
        }
        ReportFormat::Json => {
            let value = serde_json::json!({
                "error": {
                    "stage": error.stage,
                    "message": error.kind.to_string(),
                },
                "rounds": error.rounds,
            });
            let mut s = serde_json::to_string_pretty(&value)
                .expect("failure reports contain only finite numbers and strings");
            s.push('\n');
            s
        }
    }
}
