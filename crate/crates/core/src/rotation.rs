//! Varimax rotation and complex-structure detection.
//!
//! The rotation is the classic cyclic pairwise scheme: every pair of
//! component columns is rotated in its own plane by the closed-form angle
//! that maximizes the varimax criterion for that pair, and sweeps repeat
//! until a full pass no longer improves the criterion. Kaiser normalization
//! (rescaling each variable's loading row to unit length before rotating,
//! undone afterwards) keeps high-communality variables from dominating the
//! criterion.

use serde::Serialize;

use crate::error::Error;
use crate::extraction::LoadingMatrix;
use crate::Result;

/// A full sweep must improve the criterion by at least this much (relative
/// to its magnitude, floored at 1) to keep iterating.
pub const SWEEP_TOL: f64 = 1e-7;

/// Hard cap on rotation sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Outcome of a varimax rotation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationResult {
    /// The rotated loadings. Skipped during serialization: the pipeline
    /// report already carries them in its own `rotated` field.
    #[serde(skip_serializing)]
    pub rotated: LoadingMatrix,
    /// Accumulated `m x m` orthogonal rotation matrix (row-major), so that
    /// `rotated = unrotated * rotation`.
    pub rotation: Vec<Vec<f64>>,
    /// Varimax criterion of the working matrix before iteration and after
    /// each sweep. With Kaiser normalization on, this is the criterion of
    /// the row-normalized matrix the sweeps actually optimize.
    pub criterion_history: Vec<f64>,
    /// Number of sweeps performed.
    pub sweeps: usize,
}

/// Names of variables that load above `threshold` in magnitude on two or
/// more components, in row order. An empty result means simple structure.
pub fn detect_complex_structure(l: &LoadingMatrix, threshold: f64) -> Result<Vec<String>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidInput(format!(
            "loading threshold must lie in (0, 1), got {threshold}"
        )));
    }
    Ok(l.variable_names()
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            l.row(*j).iter().filter(|v| v.abs() > threshold).count() >= 2
        })
        .map(|(_, name)| name.clone())
        .collect())
}

/// Varimax criterion: the summed variance of squared loadings within each
/// column, in the `1/p^2` normalization. Higher is simpler structure.
pub fn varimax_criterion(l: &LoadingMatrix) -> f64 {
    criterion_of(&row_copy(l), l.p(), l.m())
}

fn row_copy(l: &LoadingMatrix) -> Vec<Vec<f64>> {
    (0..l.p()).map(|j| l.row(j).to_vec()).collect()
}

fn criterion_of(rows: &[Vec<f64>], p: usize, m: usize) -> f64 {
    let pf = p as f64;
    let mut total = 0.0;
    for k in 0..m {
        let mut sum2 = 0.0;
        let mut sum4 = 0.0;
        for row in rows {
            let b2 = row[k] * row[k];
            sum2 += b2;
            sum4 += b2 * b2;
        }
        total += (pf * sum4 - sum2 * sum2) / (pf * pf);
    }
    total
}

/// Closed-form optimal plane-rotation angle for one column pair.
fn pair_angle(rows: &[Vec<f64>], p: usize, i: usize, j: usize) -> f64 {
    let pf = p as f64;
    let mut a = 0.0;
    let mut b = 0.0;
    let mut c = 0.0;
    let mut d = 0.0;
    for row in rows {
        let x = row[i];
        let y = row[j];
        let u = x * x - y * y;
        let v = 2.0 * x * y;
        a += u;
        b += v;
        c += u * u - v * v;
        d += 2.0 * u * v;
    }
    let num = d - 2.0 * a * b / pf;
    let den = c - (a * a - b * b) / pf;
    0.25 * num.atan2(den)
}

/// Varimax rotation of a loading matrix with at least two components.
///
/// With `kaiser_normalize` each loading row is scaled to unit length before
/// the sweeps and unscaled afterwards; rows with zero communality make that
/// scaling undefined and are rejected. After convergence each column's sign
/// is fixed so its largest-magnitude loading is positive, and the returned
/// rotation matrix absorbs every flip, preserving
/// `rotated = unrotated * rotation` exactly.
pub fn varimax(l: &LoadingMatrix, kaiser_normalize: bool) -> Result<RotationResult> {
    let p = l.p();
    let m = l.m();
    if m < 2 {
        return Err(Error::InvalidInput(
            "varimax rotation requires at least two components".into(),
        ));
    }

    let mut work = row_copy(l);
    let mut weights = vec![1.0; p];
    if kaiser_normalize {
        for (j, row) in work.iter_mut().enumerate() {
            let h = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if h == 0.0 {
                return Err(Error::DegenerateVariable {
                    name: l.variable_names()[j].clone(),
                });
            }
            for v in row.iter_mut() {
                *v /= h;
            }
            weights[j] = h;
        }
    }

    let mut rotation: Vec<Vec<f64>> = (0..m)
        .map(|r| (0..m).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();

    let mut history = vec![criterion_of(&work, p, m)];
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for i in 0..m - 1 {
            for j in i + 1..m {
                let phi = pair_angle(&work, p, i, j);
                if phi == 0.0 {
                    continue;
                }
                let (s, c) = phi.sin_cos();
                for row in work.iter_mut() {
                    let (x, y) = (row[i], row[j]);
                    row[i] = c * x + s * y;
                    row[j] = -s * x + c * y;
                }
                for row in rotation.iter_mut() {
                    let (x, y) = (row[i], row[j]);
                    row[i] = c * x + s * y;
                    row[j] = -s * x + c * y;
                }
            }
        }
        sweeps += 1;
        let current = criterion_of(&work, p, m);
        let previous = *history.last().expect("history starts non-empty");
        history.push(current);
        converged = current - previous < SWEEP_TOL * previous.abs().max(1.0);
    }
    if !converged {
        return Err(Error::RotationNonConvergence { sweeps: MAX_SWEEPS });
    }

    let mut rotated = work;
    for (row, &h) in rotated.iter_mut().zip(&weights) {
        for v in row.iter_mut() {
            *v *= h;
        }
    }
    for k in 0..m {
        let mut peak = 0;
        for j in 0..p {
            if rotated[j][k].abs() > rotated[peak][k].abs() {
                peak = j;
            }
        }
        if rotated[peak][k] < 0.0 {
            for row in rotated.iter_mut() {
                row[k] = -row[k];
            }
            for row in rotation.iter_mut() {
                row[k] = -row[k];
            }
        }
    }

    let rotated = LoadingMatrix::new(
        l.variable_names().to_vec(),
        l.component_labels().to_vec(),
        rotated,
        true,
    )?;
    Ok(RotationResult {
        rotated,
        rotation,
        criterion_history: history,
        sweeps,
    })
}
