//! End-to-end workflow: iterative adequacy screening, gate checks,
//! extraction, optional varimax rotation, and score coefficients.
//!
//! The pipeline mirrors how an analyst works through an exploratory PCA:
//! screen the correlation matrix, throw out variables that sample poorly,
//! re-screen, stop when the data is adequate (or give up), then extract and
//! rotate. Every screening round is kept in the report so the exclusion
//! history is auditable.

use serde::Serialize;
use thiserror::Error as ThisError;

use crate::adequacy::{assess, AdequacyReport, AntiImageMatrix};
use crate::error::Error;
use crate::extraction::{
    kaiser_retain, unrotated_loadings, variance_table, LoadingMatrix, VarianceTable,
};
use crate::matrix::{eigen_symmetric, EigenSolution};
use crate::rotation::{detect_complex_structure, varimax, RotationResult};
use crate::scoring::{score_coefficients, ScoreCoefficients};
use crate::stats::{correlation_matrix, DataMatrix};

/// How many components to keep after extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retention {
    /// Keep every component with eigenvalue strictly greater than 1.
    Kaiser,
    /// Keep exactly this many components.
    Fixed(usize),
}

/// When to rotate the retained components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotatePolicy {
    /// Rotate whenever two or more components are retained.
    Always,
    /// Rotate only when the unrotated loadings show complex structure.
    OnComplex,
    /// Never rotate.
    Never,
}

/// How aggressively to drop low-MSA variables each screening round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionMode {
    /// Drop every flagged variable at once.
    Batch,
    /// Drop only the worst offender, then re-screen.
    Iterative,
}

/// Tunable thresholds and policies for [`run_pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Variables with MSA below this are excluded (default 0.50).
    pub msa_threshold: f64,
    /// Overall KMO must reach this for extraction to proceed (default 0.50).
    pub kmo_threshold: f64,
    /// Bartlett significance level; sphericity must be rejected at this
    /// alpha (default 0.01).
    pub bartlett_alpha: f64,
    /// Loadings above this magnitude count toward complex structure
    /// (default 0.50).
    pub loading_threshold: f64,
    /// Component retention rule (default Kaiser).
    pub retention: Retention,
    /// Rotation policy (default always).
    pub rotate: RotatePolicy,
    /// Exclusion mode for low-MSA variables (default batch).
    pub exclusion: ExclusionMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            msa_threshold: 0.50,
            kmo_threshold: 0.50,
            bartlett_alpha: 0.01,
            loading_threshold: 0.50,
            retention: Retention::Kaiser,
            rotate: RotatePolicy::Always,
            exclusion: ExclusionMode::Batch,
        }
    }
}

impl PipelineConfig {
    /// Checks every threshold range and the retention count.
    pub fn validate(&self) -> crate::Result<()> {
        if !(0.0..=1.0).contains(&self.msa_threshold) {
            return Err(Error::InvalidInput(format!(
                "MSA threshold must lie in [0, 1], got {}",
                self.msa_threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.kmo_threshold) {
            return Err(Error::InvalidInput(format!(
                "KMO threshold must lie in [0, 1], got {}",
                self.kmo_threshold
            )));
        }
        if !(self.bartlett_alpha > 0.0 && self.bartlett_alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, 1), got {}",
                self.bartlett_alpha
            )));
        }
        if !(self.loading_threshold > 0.0 && self.loading_threshold < 1.0) {
            return Err(Error::InvalidInput(format!(
                "loading threshold must lie in (0, 1), got {}",
                self.loading_threshold
            )));
        }
        if let Retention::Fixed(0) = self.retention {
            return Err(Error::InvalidInput(
                "fixed retention must keep at least one component".into(),
            ));
        }
        Ok(())
    }
}

/// One round of adequacy screening: who was assessed, what the diagnostics
/// said, and who was excluded before the next round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningRound {
    /// Variables assessed this round, in data order.
    pub variables: Vec<String>,
    pub adequacy: AdequacyReport,
    pub anti_image: AntiImageMatrix,
    /// Variables dropped at the end of this round (empty on the final one).
    pub excluded: Vec<String>,
}

/// Complete result of a successful pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    /// Screening history; the last round is the one that passed.
    pub rounds: Vec<ScreeningRound>,
    /// Eigensystem of the final correlation matrix.
    pub eigen: EigenSolution,
    /// Explained-variance table over all components.
    pub variance: VarianceTable,
    /// Number of components retained.
    pub retained: usize,
    pub unrotated: LoadingMatrix,
    /// Rotated loadings, when rotation ran.
    pub rotated: Option<LoadingMatrix>,
    /// Variables loading above the threshold on two or more unrotated
    /// components.
    pub complex_variables: Vec<String>,
    /// Rotation diagnostics, when rotation ran.
    pub rotation: Option<RotationResult>,
    /// Score coefficients from the rotated loadings (unrotated when no
    /// rotation ran).
    pub coefficients: ScoreCoefficients,
    pub warnings: Vec<String>,
}

/// Why a pipeline run stopped.
#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum PipelineErrorKind {
    /// The overall KMO fell short of the configured threshold.
    #[error("KMO {kmo:.3} is below threshold {threshold:.3}; data inappropriate for PCA")]
    KmoGate { kmo: f64, threshold: f64 },
    /// Bartlett's test could not reject sphericity at the configured alpha.
    #[error("Bartlett p-value {p_value:.3e} is not below alpha {alpha}; variables not interrelated")]
    BartlettGate { p_value: f64, alpha: f64 },
    /// MSA screening would leave fewer than three variables.
    #[error("over-exclusion: only {remaining} variable(s) would remain after MSA screening")]
    OverExclusion { remaining: usize },
    /// A lower-level computation failed.
    #[error(transparent)]
    Core(#[from] Error),
}

/// A pipeline failure, carrying the screening rounds completed before the
/// stop so diagnostics can still be reported.
#[derive(Debug, Clone, PartialEq, ThisError)]
#[error("{stage}: {kind}")]
pub struct PipelineError {
    /// Which stage stopped, e.g. "adequacy screening (round 2)".
    pub stage: String,
    pub kind: PipelineErrorKind,
    pub rounds: Vec<ScreeningRound>,
}

impl PipelineError {
    fn new(stage: impl Into<String>, kind: PipelineErrorKind, rounds: &[ScreeningRound]) -> Self {
        Self {
            stage: stage.into(),
            kind,
            rounds: rounds.to_vec(),
        }
    }
}

/// Runs the full workflow on raw (unstandardized) data.
///
/// Screening rounds repeat until no variable falls below the MSA threshold:
/// batch mode drops all offenders per round, iterative mode drops only the
/// lowest. Dropping below three surviving variables, failing the KMO gate,
/// or failing the sphericity gate stops the run with the rounds recorded so
/// far. Extraction then retains components (Kaiser or fixed), rotation runs
/// per policy (skipped with a warning when only one component is retained),
/// and score coefficients are built from the rotated loadings with the
/// retained components' eigenvalues.
pub fn run_pipeline(
    data: &DataMatrix,
    config: &PipelineConfig,
) -> std::result::Result<PipelineReport, PipelineError> {
    config
        .validate()
        .map_err(|e| PipelineError::new("configuration", e.into(), &[]))?;
    if data.p() < 3 {
        return Err(PipelineError::new(
            "input validation",
            Error::InvalidInput(format!(
                "the pipeline needs at least 3 variables, got {}",
                data.p()
            ))
            .into(),
            &[],
        ));
    }

    let mut current = data.clone();
    let mut rounds: Vec<ScreeningRound> = Vec::new();
    let final_correlation = loop {
        let stage = format!("adequacy screening (round {})", rounds.len() + 1);
        let r = correlation_matrix(&current)
            .map_err(|e| PipelineError::new(&stage, e.into(), &rounds))?;
        let (adequacy, anti_image) = assess(
            &r,
            current.n(),
            config.msa_threshold,
            config.kmo_threshold,
            config.bartlett_alpha,
        )
        .map_err(|e| PipelineError::new(&stage, e.into(), &rounds))?;

        let flagged = adequacy.msa_flags.clone();
        if flagged.is_empty() {
            rounds.push(ScreeningRound {
                variables: current.variable_names().to_vec(),
                adequacy,
                anti_image,
                excluded: Vec::new(),
            });
            break r;
        }

        let excluded = match config.exclusion {
            ExclusionMode::Batch => flagged,
            ExclusionMode::Iterative => {
                // Lowest MSA among the flagged; first wins a tie.
                let worst = current
                    .variable_names()
                    .iter()
                    .zip(&adequacy.msa)
                    .filter(|(name, _)| flagged.contains(name))
                    .min_by(|a, b| a.1.partial_cmp(b.1).expect("MSA values are finite"))
                    .map(|(name, _)| name.clone())
                    .expect("flagged is non-empty");
                vec![worst]
            }
        };
        rounds.push(ScreeningRound {
            variables: current.variable_names().to_vec(),
            adequacy,
            anti_image,
            excluded: excluded.clone(),
        });

        let remaining = current.p() - excluded.len();
        if remaining < 3 {
            return Err(PipelineError::new(
                &stage,
                PipelineErrorKind::OverExclusion { remaining },
                &rounds,
            ));
        }
        current = current
            .without(&excluded)
            .expect("excluded names come from the current variable set");
    };

    let last = rounds.last().expect("at least one screening round ran");
    if !last.adequacy.kmo_verdict.pass {
        return Err(PipelineError::new(
            "adequacy gate",
            PipelineErrorKind::KmoGate {
                kmo: last.adequacy.kmo,
                threshold: config.kmo_threshold,
            },
            &rounds,
        ));
    }
    if !last.adequacy.bartlett_verdict.pass {
        return Err(PipelineError::new(
            "adequacy gate",
            PipelineErrorKind::BartlettGate {
                p_value: last.adequacy.bartlett_p,
                alpha: config.bartlett_alpha,
            },
            &rounds,
        ));
    }

    let p = current.p();
    let eigen = eigen_symmetric(final_correlation.values())
        .map_err(|e| PipelineError::new("extraction", e.into(), &rounds))?;
    let retained = match config.retention {
        Retention::Kaiser => kaiser_retain(&eigen.eigenvalues)
            .map_err(|e| PipelineError::new("extraction", e.into(), &rounds))?,
        Retention::Fixed(k) => {
            if k == 0 || k > p {
                return Err(PipelineError::new(
                    "extraction",
                    Error::InvalidInput(format!(
                        "fixed retention of {k} components is out of range 1..={p}"
                    ))
                    .into(),
                    &rounds,
                ));
            }
            k
        }
    };
    let variance = variance_table(&eigen.eigenvalues, p)
        .map_err(|e| PipelineError::new("extraction", e.into(), &rounds))?;
    let unrotated = unrotated_loadings(&eigen, retained, current.variable_names())
        .map_err(|e| PipelineError::new("extraction", e.into(), &rounds))?;
    let complex_variables = detect_complex_structure(&unrotated, config.loading_threshold)
        .map_err(|e| PipelineError::new("structure analysis", e.into(), &rounds))?;

    let mut warnings = Vec::new();
    if config.rotate == RotatePolicy::Never && !complex_variables.is_empty() {
        warnings.push(format!(
            "complex structure detected ({}) but rotation is disabled",
            complex_variables.join(", ")
        ));
    }
    let wants_rotation = match config.rotate {
        RotatePolicy::Always => true,
        RotatePolicy::OnComplex => !complex_variables.is_empty(),
        RotatePolicy::Never => false,
    };
    let rotation = if wants_rotation {
        if retained < 2 {
            warnings.push(
                "a single component was retained; varimax rotation was skipped".to_string(),
            );
            None
        } else {
            Some(
                varimax(&unrotated, true)
                    .map_err(|e| PipelineError::new("rotation", e.into(), &rounds))?,
            )
        }
    } else {
        None
    };
    let rotated = rotation.as_ref().map(|r| r.rotated.clone());

    let scoring_basis = rotated.as_ref().unwrap_or(&unrotated);
    let coefficients = score_coefficients(scoring_basis, &eigen.eigenvalues[..retained])
        .map_err(|e| PipelineError::new("scoring", e.into(), &rounds))?;

    Ok(PipelineReport {
        rounds,
        eigen,
        variance,
        retained,
        unrotated,
        rotated,
        complex_variables,
        rotation,
        coefficients,
        warnings,
    })
}
