//! Component-score coefficients and observation scores.
//!
//! Coefficients follow the regression-style convention used throughout this
//! workflow: each loading column is divided by the square root of the
//! eigenvalue of the component it was extracted from. Scores are then plain
//! linear combinations of standardized variables.

use serde::Serialize;

use crate::error::Error;
use crate::extraction::LoadingMatrix;
use crate::stats::DataMatrix;
use crate::Result;

/// Tolerance for the standardization check in [`compute_scores`]: column
/// means must be within this of 0 and sample deviations within this of 1.
pub const STANDARDIZATION_TOL: f64 = 1e-8;

/// Weights that map standardized variables onto component scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreCoefficients {
    variable_names: Vec<String>,
    component_labels: Vec<String>,
    coefficients: Vec<Vec<f64>>,
}

impl ScoreCoefficients {
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

    /// Weight of variable `j` in component `k`'s score.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.coefficients[j][k]
    }
}

/// Builds score coefficients by scaling each loading column with
/// `1 / sqrt(eigenvalue)`. One strictly positive eigenvalue is required per
/// loading column.
pub fn score_coefficients(l: &LoadingMatrix, eigenvalues: &[f64]) -> Result<ScoreCoefficients> {
    let m = l.m();
    if eigenvalues.len() != m {
        return Err(Error::InvalidInput(format!(
            "{} eigenvalues for {m} loading columns",
            eigenvalues.len()
        )));
    }
    let scale: Vec<f64> = eigenvalues
        .iter()
        .map(|&lambda| {
            if lambda > 0.0 {
                Ok(lambda.sqrt())
            } else {
                Err(Error::InvalidInput(format!(
                    "score coefficients need positive eigenvalues, got {lambda}"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let coefficients = (0..l.p())
        .map(|j| (0..m).map(|k| l.get(j, k) / scale[k]).collect())
        .collect();
    Ok(ScoreCoefficients {
        variable_names: l.variable_names().to_vec(),
        component_labels: l.component_labels().to_vec(),
        coefficients,
    })
}

/// Component scores for each observation: `scores[i][k]` is the score of
/// observation `i` on component `k`.
///
/// The data must already be standardized (checked to [`STANDARDIZATION_TOL`])
/// and its variables must match the coefficient rows by name and order.
pub fn compute_scores(
    standardized: &DataMatrix,
    coefficients: &ScoreCoefficients,
) -> Result<Vec<Vec<f64>>> {
    if standardized.variable_names() != coefficients.variable_names() {
        return Err(Error::VariableAlignment {
            detail: format!(
                "data has [{}], coefficients have [{}]",
                standardized.variable_names().join(", "),
                coefficients.variable_names().join(", ")
            ),
        });
    }
    let n = standardized.n();
    for j in 0..standardized.p() {
        let col = standardized.column(j);
        let mean: f64 = col.iter().sum::<f64>() / n as f64;
        let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0))
            .sqrt();
        if mean.abs() > STANDARDIZATION_TOL || (sd - 1.0).abs() > STANDARDIZATION_TOL {
            return Err(Error::NotStandardized {
                name: standardized.variable_names()[j].clone(),
                detail: format!("mean {mean:e}, sd {sd}"),
            });
        }
    }
    let m = coefficients.m();
    let scores = (0..n)
        .map(|i| {
            (0..m)
                .map(|k| {
                    (0..standardized.p())
                        .map(|j| standardized.column(j)[i] * coefficients.get(j, k))
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(scores)
}
