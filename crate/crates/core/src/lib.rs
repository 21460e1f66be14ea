//! Exploratory principal-component analysis, end to end.
//!
//! The crate covers the complete workflow an analyst runs on raw
//! observations-by-variables data:
//!
//! 1. **Adequacy screening** ([`adequacy`]): anti-image matrix with
//!    per-variable measures of sampling adequacy (MSA), the overall KMO
//!    index, and Bartlett's test of sphericity. Variables that sample
//!    poorly are excluded and the screen repeats.
//! 2. **Extraction** ([`extraction`]): eigendecomposition of the surviving
//!    correlation matrix, Kaiser retention (eigenvalues above 1), the
//!    explained-variance table, and unrotated loadings.
//! 3. **Rotation** ([`rotation`]): varimax with Kaiser normalization, plus
//!    detection of variables that load heavily on several components.
//! 4. **Scoring** ([`scoring`]): component-score coefficients and scores
//!    for standardized observations.
//!
//! [`pipeline::run_pipeline`] chains the stages and records every screening
//! round; [`report::render_report`] turns the result into text or JSON.
//! The numeric kernels ([`matrix`], [`stats`]) are deliberately
//! self-contained: a cyclic Jacobi eigensolver, eigensystem-based SPD
//! inversion, and an incomplete-gamma chi-square tail.
//!
//! ```
//! use pcakit::pipeline::{run_pipeline, PipelineConfig};
//! use pcakit::report::{render_report, ReportFormat};
//! use pcakit::stats::DataMatrix;
//!
//! // Three indicators of one underlying trait, eight observations.
//! let rows: Vec<Vec<f64>> = vec![
//!     vec![1.0, 1.2, 0.9], vec![2.1, 2.0, 2.2], vec![3.0, 3.2, 2.8],
//!     vec![4.2, 3.9, 4.1], vec![5.0, 5.3, 4.9], vec![6.1, 5.8, 6.2],
//!     vec![7.0, 7.3, 6.8], vec![8.2, 7.9, 8.1],
//! ];
//! let data = DataMatrix::from_rows(
//!     vec!["a".into(), "b".into(), "c".into()],
//!     &rows,
//! ).unwrap();
//! let report = run_pipeline(&data, &PipelineConfig::default()).unwrap();
//! assert_eq!(report.retained, 1);
//! println!("{}", render_report(&report, ReportFormat::Text));
//! ```

pub mod adequacy;
pub mod error;
pub mod extraction;
pub mod matrix;
pub mod pipeline;
pub mod report;
pub mod rotation;
pub mod scoring;
pub mod stats;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use adequacy::{AdequacyReport, AntiImageMatrix, MsaRating, Verdict};
pub use extraction::{LoadingMatrix, VarianceTable};
pub use matrix::{EigenSolution, SymmetricMatrix};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, PipelineReport};
pub use report::{render_failure, render_report, ReportFormat};
pub use rotation::RotationResult;
pub use scoring::ScoreCoefficients;
pub use stats::{CorrelationMatrix, DataMatrix};
