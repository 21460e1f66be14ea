//! Plumbing for the `pcakit` binary: CSV ingestion and artifact rendering
//! (scree CSV/SVG, scores CSV). Kept in a library so the pieces are testable
//! without spawning the binary.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use pcakit::stats::DataMatrix;
use thiserror::Error;

/// Why an input file could not be turned into a [`DataMatrix`].
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Malformed(String),
}

/// Reads a CSV file into a [`DataMatrix`].
///
/// The first row names the variables; every following row is one
/// observation of decimal numbers. Comma delimiter, optional double-quote
/// quoting, LF or CRLF line endings. Errors cite the file row (the header
/// is row 1) and the offending column.
pub fn ingest_csv(path: &Path) -> Result<DataMatrix, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    let headers: Vec<String> = match reader.headers() {
        Ok(h) => h.iter().map(str::to_string).collect(),
        Err(e) => return Err(IngestError::Malformed(format!("cannot read header row: {e}"))),
    };
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(IngestError::Malformed(
            "empty input: the file has no header row".into(),
        ));
    }
    if headers.len() < 2 {
        return Err(IngestError::Malformed(format!(
            "at least 2 variables are required, got {}",
            headers.len()
        )));
    }
    for (j, name) in headers.iter().enumerate() {
        if name.is_empty() {
            return Err(IngestError::Malformed(format!(
                "header column {} has an empty name",
                j + 1
            )));
        }
        if headers[..j].contains(name) {
            return Err(IngestError::Malformed(format!(
                "duplicate header: {name:?}"
            )));
        }
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                return Err(IngestError::Malformed(match e.kind() {
                    csv::ErrorKind::UnequalLengths { pos, expected_len, len } => {
                        let line = pos.as_ref().map(|p| p.line()).unwrap_or(0);
                        format!("row {line} has {len} fields, expected {expected_len}")
                    }
                    _ => e.to_string(),
                }))
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let mut row = Vec::with_capacity(headers.len());
        for (j, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                IngestError::Malformed(format!(
                    "row {line}, column {} ({}): cannot parse {cell:?} as a number",
                    j + 1,
                    headers[j]
                ))
            })?;
            if !value.is_finite() {
                return Err(IngestError::Malformed(format!(
                    "row {line}, column {} ({}): non-finite value {cell:?}",
                    j + 1,
                    headers[j]
                )));
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IngestError::Malformed(
            "empty input: the file has a header but no observations".into(),
        ));
    }

    DataMatrix::from_rows(headers, &rows).map_err(|e| IngestError::Malformed(e.to_string()))
}

/// Scree data as a two-column CSV at full precision.
pub fn scree_csv(points: &[(usize, f64)]) -> String {
    let mut out = String::from("component,eigenvalue\n");
    for &(k, v) in points {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

/// Component scores as CSV: one labelled column per component, one row per
/// observation, full precision.
pub fn scores_csv(labels: &[String], scores: &[Vec<f64>]) -> String {
    let mut out = labels.join(",");
    out.push('\n');
    for row in scores {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn fmt3(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// Scree data as a self-contained SVG line chart: axes, one marker per
/// component, a dashed guide at eigenvalue 1.
pub fn scree_svg(points: &[(usize, f64)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 64.0;
    const RIGHT: f64 = 24.0;
    const TOP: f64 = 24.0;
    const BOTTOM: f64 = 48.0;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let p = points.len();
    let y_top = points
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0f64, f64::max)
        .max(1e-9)
        * 1.05;
    let x = |k: usize| {
        if p <= 1 {
            LEFT + plot_w / 2.0
        } else {
            LEFT + plot_w * (k - 1) as f64 / (p - 1) as f64
        }
    };
    let y = |v: f64| TOP + plot_h * (1.0 - v.max(0.0) / y_top);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{:.2}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        TOP + plot_h
    ));
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    ));
    // Y ticks at quarters of the range.
    for i in 0..=4 {
        let v = y_top * i as f64 / 4.0;
        let yy = y(v);
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{yy:.2}\" x2=\"{LEFT}\" y2=\"{yy:.2}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
            LEFT - 4.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">{}</text>\n",
            LEFT - 7.0,
            yy + 4.0,
            fmt3(v)
        ));
    }
    // Kaiser guide at eigenvalue 1.
    if y_top >= 1.0 {
        let yy = y(1.0);
        svg.push_str(&format!(
            "  <line x1=\"{LEFT}\" y1=\"{yy:.2}\" x2=\"{:.2}\" y2=\"{yy:.2}\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n",
            LEFT + plot_w
        ));
    }
    // X tick labels: one per component.
    for &(k, _) in points {
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{k}</text>\n",
            x(k),
            TOP + plot_h + 16.0
        ));
    }
    // Axis titles.
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">component</text>\n",
        LEFT + plot_w / 2.0,
        H - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 16 {:.2})\">eigenvalue</text>\n",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    ));
    // The line itself, then one marker per point.
    if p > 1 {
        let coords: Vec<String> = points
            .iter()
            .map(|&(k, v)| format!("{:.2},{:.2}", x(k), y(v)))
            .collect();
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1a56a0\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
    }
    for &(k, v) in points {
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#1a56a0\"/>\n",
            x(k),
            y(v)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
