//! Dense symmetric-matrix kernels: Jacobi eigendecomposition, SPD inversion,
//! and log-determinant.
//!
//! Storage is the packed lower triangle, so symmetry is structural rather
//! than a runtime promise. The eigensolver is a cyclic Jacobi sweep: not the
//! fastest choice for large matrices, but deterministic, accurate to near
//! machine precision, and easy to audit at the problem sizes this crate
//! targets (tens of variables, occasionally a few hundred).

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::Result;

/// Convergence tolerance for the Jacobi sweep, relative to the Frobenius
/// norm of the input: iteration stops once the off-diagonal Frobenius norm
/// falls below `JACOBI_TOL * ||A||_F`.
pub const JACOBI_TOL: f64 = 1e-12;

/// Hard cap on Jacobi sweeps. Convergence for symmetric input is typically
/// reached in well under 20 sweeps; hitting the cap is reported as an error.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Relative singularity threshold for [`invert_spd`]: the matrix is rejected
/// when `lambda_min < SINGULARITY_TOL * lambda_max`.
pub const SINGULARITY_TOL: f64 = 1e-10;

/// A real symmetric matrix held as a packed lower triangle.
///
/// Entry `(i, j)` with `j <= i` lives at `i * (i + 1) / 2 + j`; reads of the
/// upper triangle are served by the mirrored element, so the matrix cannot
/// drift out of symmetry after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds from full square rows, requiring exact symmetry and finite
    /// entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::InvalidInput(
                "symmetric matrix must have order >= 1".into(),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &below) in row.iter().enumerate().take(i) {
                if below != rows[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        let mut data = Vec::with_capacity(order * (order + 1) / 2);
        for (i, row) in rows.iter().enumerate() {
            data.extend_from_slice(&row[..=i]);
        }
        Ok(Self { order, data })
    }

    /// Builds by evaluating `f(i, j)` once per lower-triangle position
    /// (`j <= i`). The result is symmetric by construction; `f` must return
    /// finite values.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput(
                "symmetric matrix must have order >= 1".into(),
            ));
        }
        let mut data = Vec::with_capacity(order * (order + 1) / 2);
        for i in 0..order {
            for j in 0..=i {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data.push(v);
            }
        }
        Ok(Self { order, data })
    }

    /// The identity matrix of the given order.
    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { 1.0 } else { 0.0 })
            .expect("identity entries are finite")
    }

    /// Matrix order (number of rows = number of columns).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry `(i, j)`; either triangle may be addressed.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.data[r * (r + 1) / 2 + c]
    }

    /// Expands to full square rows.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }
}

impl Serialize for SymmetricMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SymmetricMatrix", 2)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("rows", &self.to_rows())?;
        st.end()
    }
}

/// Eigenvalues and eigenvectors of a symmetric matrix.
///
/// `eigenvalues` is sorted in descending order; `eigenvectors[k]` is the
/// unit-length eigenvector paired with `eigenvalues[k]`. Each vector is
/// sign-fixed so that its largest-magnitude entry (first such entry on ties)
/// is positive, which makes the decomposition deterministic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Off-diagonal Frobenius norm of a full `p x p` buffer.
fn off_diagonal_norm(a: &[f64], p: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..p {
        for j in 0..i {
            s += 2.0 * a[i * p + j] * a[i * p + j];
        }
    }
    s.sqrt()
}

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps row-by-row over the strict upper triangle, annihilating each
/// off-diagonal entry with a plane rotation, until the off-diagonal
/// Frobenius norm drops below [`JACOBI_TOL`] relative to the input norm.
pub fn eigen_symmetric(m: &SymmetricMatrix) -> Result<EigenSolution> {
    let p = m.order();
    let mut a: Vec<f64> = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            a[i * p + j] = m.get(i, j);
        }
    }
    let mut v: Vec<f64> = vec![0.0; p * p];
    for i in 0..p {
        v[i * p + i] = 1.0;
    }

    let frobenius = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOL * frobenius;

    let mut converged = off_diagonal_norm(&a, p) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = a[i * p + j];
                if apq == 0.0 {
                    continue;
                }
                // Rotation angle from the stable half-angle form: t is the
                // smaller-magnitude root of t^2 + 2*theta*t - 1 = 0.
                let theta = (a[j * p + j] - a[i * p + i]) / (2.0 * apq);
                let t = if theta.abs() > 1e154 {
                    // Guard against overflow in theta^2; the limit of the
                    // exact expression.
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[i * p + i] -= t * apq;
                a[j * p + j] += t * apq;
                a[i * p + j] = 0.0;
                a[j * p + i] = 0.0;
                for k in 0..p {
                    if k == i || k == j {
                        continue;
                    }
                    let aki = a[k * p + i];
                    let akj = a[k * p + j];
                    a[k * p + i] = aki - s * (akj + tau * aki);
                    a[i * p + k] = a[k * p + i];
                    a[k * p + j] = akj + s * (aki - tau * akj);
                    a[j * p + k] = a[k * p + j];
                }
                for k in 0..p {
                    let vki = v[k * p + i];
                    let vkj = v[k * p + j];
                    v[k * p + i] = vki - s * (vkj + tau * vki);
                    v[k * p + j] = vkj + s * (vki - tau * vkj);
                }
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a, p) <= threshold;
    }
    if !converged {
        return Err(Error::EigenNonConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..p).collect();
    // Stable descending sort; ties keep their pre-sort order so repeated
    // eigenvalues come out in a reproducible arrangement.
    order.sort_by(|&x, &y| {
        a[y * p + y]
            .partial_cmp(&a[x * p + x])
            .expect("eigenvalues are finite")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * p + k]).collect();
    let mut eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..p).map(|r| v[r * p + k]).collect())
        .collect();
    for vec in &mut eigenvectors {
        let mut arg = 0;
        for (j, x) in vec.iter().enumerate() {
            if x.abs() > vec[arg].abs() {
                arg = j;
            }
        }
        if vec[arg] < 0.0 {
            for x in vec.iter_mut() {
                *x = -*x;
            }
        }
    }

    Ok(EigenSolution {
        eigenvalues,
        eigenvectors,
    })
}

/// Inverse of a symmetric positive-definite matrix via its eigensystem:
/// `M^{-1} = V diag(1/lambda) V^T`.
///
/// Rejects the input as singular/near-singular when the smallest eigenvalue
/// falls below [`SINGULARITY_TOL`] times the largest (or the largest is not
/// positive).
pub fn invert_spd(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let e = eigen_symmetric(m)?;
    let lambda_max = e.eigenvalues[0];
    let lambda_min = *e.eigenvalues.last().expect("order >= 1");
    if lambda_max <= 0.0 || lambda_min < SINGULARITY_TOL * lambda_max {
        return Err(Error::SingularMatrix {
            lambda_min,
            lambda_max,
        });
    }
    let p = m.order();
    SymmetricMatrix::from_fn(p, |i, j| {
        (0..p)
            .map(|k| e.eigenvectors[k][i] * e.eigenvectors[k][j] / e.eigenvalues[k])
            .sum()
    })
}

/// Natural log of the determinant of a symmetric positive-definite matrix,
/// computed as the sum of eigenvalue logs. Stays finite where forming the
/// determinant itself would underflow.
pub fn log_determinant(m: &SymmetricMatrix) -> Result<f64> {
    let e = eigen_symmetric(m)?;
    let mut sum = 0.0;
    for &lambda in &e.eigenvalues {
        if lambda <= 0.0 {
            return Err(Error::NotPositiveDefinite { lambda });
        }
        sum += lambda.ln();
    }
    Ok(sum)
}
