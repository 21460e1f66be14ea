//! Error taxonomy shared across the crate.
//!
//! Every fallible operation returns [`crate::Result`]. Variants carry enough
//! context (variable names, offending indices, eigenvalues) for a caller to
//! report the failure without re-deriving it.

use thiserror::Error;

/// Unified error type for all analysis operations.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// A matrix constructor received entries with `m[i][j] != m[j][i]`.
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    /// NaN or infinity encountered where a finite value is required.
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    /// The Jacobi eigensolver failed to reduce the off-diagonal mass in time.
    /// Does not occur for finite symmetric input; kept as a guard.
    #[error("eigendecomposition did not converge within {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },

    /// Inversion was requested for a matrix that is singular to working
    /// precision (smallest eigenvalue below tolerance relative to largest).
    #[error("singular/near-singular matrix: eigenvalue {lambda_min:e} is below tolerance against {lambda_max:e}")]
    SingularMatrix { lambda_min: f64, lambda_max: f64 },

    /// A log-determinant was requested for a matrix with a non-positive
    /// eigenvalue.
    #[error("matrix is not positive definite: eigenvalue {lambda:e} <= 0")]
    NotPositiveDefinite { lambda: f64 },

    /// A variable has (near-)zero sample variance, so it cannot be
    /// standardized or correlated.
    #[error("constant variable: {name} has no variance")]
    ConstantVariable { name: String },

    /// A variable is uncorrelated with every other variable, which leaves the
    /// sampling-adequacy ratio 0/0.
    #[error("MSA undefined for isolated variable {name}")]
    MsaUndefined { name: String },

    /// Every off-diagonal correlation is zero, so the overall adequacy ratio
    /// is undefined.
    #[error("KMO undefined: all off-diagonal correlations are zero")]
    KmoUndefined,

    /// The sphericity test needs more observations than variables.
    #[error("insufficient observations: n = {n} must exceed p = {p}")]
    InsufficientObservations { n: usize, p: usize },

    /// Kaiser retention found no eigenvalue above 1.
    #[error("no component retained under Kaiser rule: largest eigenvalue is {largest}")]
    NoComponentRetained { largest: f64 },

    /// The pairwise varimax sweep failed to converge. Not observed in
    /// practice; kept as a guard.
    #[error("rotation did not converge within {sweeps} sweeps")]
    RotationNonConvergence { sweeps: usize },

    /// Kaiser normalization cannot rescale a loading row whose communality
    /// is zero.
    #[error("variable {name} has zero communality; Kaiser normalization is undefined")]
    DegenerateVariable { name: String },

    /// Two artifacts that must describe the same variables disagree.
    #[error("variable names do not align: {detail}")]
    VariableAlignment { detail: String },

    /// Scores were requested on data that is not standardized.
    #[error("variable {name} is not standardized: {detail}")]
    NotStandardized { name: String, detail: String },

    /// Catch-all for precondition violations (bad dimensions, thresholds out
    /// of range, malformed requests).
    #[error("{0}")]
    InvalidInput(String),
}
