//! Component extraction: Kaiser retention, the explained-variance table,
//! scree-plot data, and unrotated component loadings.
//!
//! Extraction works on the eigensystem of a correlation matrix, so each
//! eigenvalue is the variance (in standardized units) captured by its
//! component and the eigenvalue total equals the number of variables.

use serde::Serialize;

use crate::error::Error;
use crate::matrix::EigenSolution;
use crate::Result;

fn require_sorted_descending(eigenvalues: &[f64]) -> Result<()> {
    if eigenvalues.is_empty() {
        return Err(Error::InvalidInput("eigenvalue list is empty".into()));
    }
    for (k, v) in eigenvalues.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row: k, col: 0 });
        }
    }
    if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(
            "eigenvalues must be sorted in descending order".into(),
        ));
    }
    Ok(())
}

/// Number of components retained under the Kaiser criterion: eigenvalues
/// strictly greater than 1. Errors when nothing qualifies.
pub fn kaiser_retain(eigenvalues: &[f64]) -> Result<usize> {
    require_sorted_descending(eigenvalues)?;
    let m = eigenvalues.iter().filter(|&&v| v > 1.0).count();
    if m == 0 {
        return Err(Error::NoComponentRetained {
            largest: eigenvalues[0],
        });
    }
    Ok(m)
}

/// One row of the explained-variance table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    /// 1-based component index.
    pub component: usize,
    pub eigenvalue: f64,
    /// Share of total variance, as a percentage of the variable count.
    pub percent_of_variance: f64,
    /// Running total of the percentage column.
    pub cumulative_percent: f64,
}

/// Explained-variance table, one row per supplied eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceTable {
    pub rows: Vec<VarianceRow>,
}

/// Builds the explained-variance table for the leading eigenvalues of a
/// `p`-variable correlation matrix: each row reports `100 * lambda / p` and
/// the cumulative percentage so far.
pub fn variance_table(eigenvalues: &[f64], p: usize) -> Result<VarianceTable> {
    require_sorted_descending(eigenvalues)?;
    if eigenvalues.len() > p {
        return Err(Error::InvalidInput(format!(
            "{} eigenvalues for {p} variables",
            eigenvalues.len()
        )));
    }
    let mut cumulative = 0.0;
    let rows = eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let percent = 100.0 * lambda / p as f64;
            cumulative += percent;
            VarianceRow {
                component: k + 1,
                eigenvalue: lambda,
                percent_of_variance: percent,
                cumulative_percent: cumulative,
            }
        })
        .collect();
    Ok(VarianceTable { rows })
}

/// Scree-plot data: `(component index, eigenvalue)` pairs, 1-based, in the
/// order the eigenvalues were extracted.
pub fn scree_data(eigenvalues: &[f64]) -> Result<Vec<(usize, f64)>> {
    require_sorted_descending(eigenvalues)?;
    Ok(eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &v)| (k + 1, v))
        .collect())
}

/// Component loadings: variables down the rows, components across the
/// columns.
///
/// Construction validates shape, distinct names and labels, finiteness, and
/// that no loading exceeds 1 in magnitude beyond rounding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadingMatrix {
    variable_names: Vec<String>,
    component_labels: Vec<String>,
    loadings: Vec<Vec<f64>>,
    rotated: bool,
}

impl LoadingMatrix {
    /// Loading magnitudes may exceed 1 by at most this much (rounding slack).
    pub const MAX_ABS_SLACK: f64 = 1e-8;

    /// Validates and wraps a `p x m` loading matrix.
    pub fn new(
        variable_names: Vec<String>,
        component_labels: Vec<String>,
        loadings: Vec<Vec<f64>>,
        rotated: bool,
    ) -> Result<Self> {
        let p = variable_names.len();
        let m = component_labels.len();
        if p == 0 || m == 0 {
            return Err(Error::InvalidInput(
                "loading matrix needs at least one variable and one component".into(),
            ));
        }
        for (i, name) in variable_names.iter().enumerate() {
            if variable_names[..i].contains(name) {
                return Err(Error::InvalidInput(format!("duplicate variable name: {name}")));
            }
        }
        for (i, label) in component_labels.iter().enumerate() {
            if component_labels[..i].contains(label) {
                return Err(Error::InvalidInput(format!("duplicate component label: {label}")));
            }
        }
        if loadings.len() != p {
            return Err(Error::InvalidInput(format!(
                "{} loading rows for {p} variables",
                loadings.len()
            )));
        }
        for (j, row) in loadings.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInput(format!(
                    "loading row {j} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (k, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: j, col: k });
                }
                if v.abs() > 1.0 + Self::MAX_ABS_SLACK {
                    return Err(Error::InvalidInput(format!(
                        "loading ({j}, {k}) = {v} exceeds magnitude 1"
                    )));
                }
            }
        }
        Ok(Self {
            variable_names,
            component_labels,
            loadings,
            rotated,
        })
    }

    /// Number of variables (rows).
    pub fn p(&self) -> usize {
        self.variable_names.len()
    }

    /// Number of components (columns).
    pub fn m(&self) -> usize {
        self.component_labels.len()
    }

    /// Variable names, one per row.
    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    /// Component labels, one per column.
    pub fn component_labels(&self) -> &[String] {
        &self.component_labels
    }

    /// Loading of variable `j` on component `k`.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.loadings[j][k]
    }

    /// Row of loadings for variable `j`.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.loadings[j]
    }

    /// Column of loadings for component `k`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.loadings.iter().map(|row| row[k]).collect()
    }

    /// Whether this matrix has been through a rotation.
    pub fn is_rotated(&self) -> bool {
        self.rotated
    }

    /// Per-variable communality: the sum of squared loadings in each row.
    pub fn communalities(&self) -> Vec<f64> {
        self.loadings
            .iter()
            .map(|row| row.iter().map(|v| v * v).sum())
            .collect()
    }
}

/// Unrotated loadings for the first `m` components: eigenvector entries
/// scaled by the square root of their eigenvalue, so each column's squared
/// sum reproduces its eigenvalue.
pub fn unrotated_loadings(
    eigen: &EigenSolution,
    m: usize,
    variable_names: &[String],
) -> Result<LoadingMatrix> {
    let p = eigen.eigenvalues.len();
    if m == 0 || m > p {
        return Err(Error::InvalidInput(format!(
            "cannot retain {m} of {p} components"
        )));
    }
    if eigen.eigenvectors.len() != p || eigen.eigenvectors.iter().any(|v| v.len() != p) {
        return Err(Error::InvalidInput(
            "eigenvector matrix shape does not match the eigenvalue count".into(),
        ));
    }
    if variable_names.len() != p {
        return Err(Error::VariableAlignment {
            detail: format!("{} names for {p} eigenvector entries", variable_names.len()),
        });
    }
    let scale: Vec<f64> = eigen.eigenvalues[..m]
        .iter()
        .map(|&lambda| {
            if lambda < 0.0 {
                Err(Error::InvalidInput(format!(
                    "cannot form loadings from negative eigenvalue {lambda}"
                )))
            } else {
                Ok(lambda.sqrt())
            }
        })
        .collect::<Result<_>>()?;
    let loadings: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..m).map(|k| eigen.eigenvectors[k][j] * scale[k]).collect())
        .collect();
    let labels = (1..=m).map(|k| format!("PC{k}")).collect();
    LoadingMatrix::new(variable_names.to_vec(), labels, loadings, false)
}
