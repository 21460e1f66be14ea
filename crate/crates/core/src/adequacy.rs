//! Sampling-adequacy diagnostics run before extraction: the anti-image
//! matrix with per-variable measures of sampling adequacy (MSA), the overall
//! KMO index, and Bartlett's test of sphericity.
//!
//! All three decide the same question from different angles: whether the
//! correlation structure is compact enough for components to summarize it.

use serde::Serialize;

use crate::error::Error;
use crate::matrix::{invert_spd, log_determinant, SymmetricMatrix};
use crate::stats::{chi_square_sf, CorrelationMatrix};
use crate::Result;

/// Anti-image correlation matrix: off-diagonal entries are the negated,
/// rescaled entries of the inverse correlation matrix (equal to the partial
/// correlations given all other variables, up to sign), and the diagonal
/// holds each variable's MSA.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiImageMatrix {
    variable_names: Vec<String>,
    values: SymmetricMatrix,
}

impl AntiImageMatrix {
    /// Variable names, aligned with row/column indices.
    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    /// Per-variable MSA values (the diagonal).
    pub fn msa(&self) -> Vec<f64> {
        (0..self.values.order())
            .map(|i| self.values.get(i, i))
            .collect()
    }

    /// Anti-image (partial) correlation between variables `i != j`.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    /// The full matrix: MSA on the diagonal, partials off it.
    pub fn values(&self) -> &SymmetricMatrix {
        &self.values
    }
}

/// Per-pair squared sums needed by both MSA and KMO: for each variable the
/// sum of squared off-diagonal correlations and squared partials.
struct PartialSums {
    /// Anti-image correlations with a zero diagonal.
    partials: SymmetricMatrix,
    sum_r2: Vec<f64>,
    sum_q2: Vec<f64>,
}

fn squared_sums(r: &CorrelationMatrix) -> Result<PartialSums> {
    let p = r.order();
    let s = invert_spd(r.values())?;
    let partials = SymmetricMatrix::from_fn(p, |i, j| {
        if i == j {
            0.0
        } else {
            (-s.get(i, j) / (s.get(i, i) * s.get(j, j)).sqrt()).clamp(-1.0, 1.0)
        }
    })?;
    let mut sum_r2 = vec![0.0; p];
    let mut sum_q2 = vec![0.0; p];
    for (i, (r2, q2)) in sum_r2.iter_mut().zip(sum_q2.iter_mut()).enumerate() {
        for j in (0..p).filter(|&j| j != i) {
            *r2 += r.get(i, j) * r.get(i, j);
            *q2 += partials.get(i, j) * partials.get(i, j);
        }
    }
    Ok(PartialSums {
        partials,
        sum_r2,
        sum_q2,
    })
}

/// Builds the anti-image matrix for a correlation matrix.
///
/// Fails with a named variable when that variable has no nonzero correlation
/// with any other (its MSA ratio is 0/0), and propagates singularity from
/// the inversion.
pub fn anti_image(r: &CorrelationMatrix) -> Result<AntiImageMatrix> {
    let PartialSums {
        partials,
        sum_r2,
        sum_q2,
    } = squared_sums(r)?;
    for (i, &s) in sum_r2.iter().enumerate() {
        if s == 0.0 {
            return Err(Error::MsaUndefined {
                name: r.variable_names()[i].clone(),
            });
        }
    }
    let values = SymmetricMatrix::from_fn(r.order(), |i, j| {
        if i == j {
            sum_r2[i] / (sum_r2[i] + sum_q2[i])
        } else {
            partials.get(i, j)
        }
    })?;
    Ok(AntiImageMatrix {
        variable_names: r.variable_names().to_vec(),
        values,
    })
}

/// Overall Kaiser-Meyer-Olkin index: squared correlations over squared
/// correlations plus squared partials, summed across every variable pair.
pub fn kmo(r: &CorrelationMatrix) -> Result<f64> {
    let PartialSums {
        sum_r2, sum_q2, ..
    } = squared_sums(r)?;
    let total_r2: f64 = sum_r2.iter().sum();
    let total_q2: f64 = sum_q2.iter().sum();
    if total_r2 == 0.0 {
        return Err(Error::KmoUndefined);
    }
    Ok(total_r2 / (total_r2 + total_q2))
}

/// Bartlett's test of sphericity: `(statistic, degrees of freedom, p-value)`.
///
/// The statistic is `-(n - 1 - (2p + 5) / 6) * ln(det R)`, referred to a
/// chi-square distribution with `p (p - 1) / 2` degrees of freedom. Requires
/// more observations than variables.
pub fn bartlett_test(r: &CorrelationMatrix, n: usize) -> Result<(f64, usize, f64)> {
    let p = r.order();
    if n <= p {
        return Err(Error::InsufficientObservations { n, p });
    }
    let log_det = log_determinant(r.values())?;
    let multiplier = (n - 1) as f64 - (2 * p + 5) as f64 / 6.0;
    let stat = (-multiplier * log_det).max(0.0);
    let df = p * (p - 1) / 2;
    let p_value = chi_square_sf(stat, df)?;
    Ok((stat, df, p_value))
}

/// Adjective scale for an MSA or KMO value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MsaRating {
    Marvellous,
    Meritorious,
    Middling,
    Mediocre,
    Miserable,
    Unacceptable,
}

impl std::fmt::Display for MsaRating {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MsaRating::Marvellous => "marvellous",
            MsaRating::Meritorious => "meritorious",
            MsaRating::Middling => "middling",
            MsaRating::Mediocre => "mediocre",
            MsaRating::Miserable => "miserable",
            MsaRating::Unacceptable => "unacceptable",
        };
        f.write_str(s)
    }
}

/// Maps an adequacy value in [0, 1] onto the conventional adjective scale:
/// 0.90 and up is marvellous, then meritorious, middling, mediocre, and
/// miserable in 0.10 steps, with everything below 0.50 unacceptable.
pub fn classify_msa(value: f64) -> Result<MsaRating> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidInput(format!(
            "adequacy value must lie in [0, 1], got {value}"
        )));
    }
    Ok(if value >= 0.90 {
        MsaRating::Marvellous
    } else if value >= 0.80 {
        MsaRating::Meritorious
    } else if value >= 0.70 {
        MsaRating::Middling
    } else if value >= 0.60 {
        MsaRating::Mediocre
    } else if value >= 0.50 {
        MsaRating::Miserable
    } else {
        MsaRating::Unacceptable
    })
}

/// Pass/fail outcome of one adequacy gate, with a printable explanation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub message: String,
}

/// Everything the screening stage reports for one correlation matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdequacyReport {
    pub kmo: f64,
    pub bartlett_stat: f64,
    pub bartlett_df: usize,
    pub bartlett_p: f64,
    /// Per-variable MSA, aligned with the correlation matrix's names.
    pub msa: Vec<f64>,
    pub kmo_verdict: Verdict,
    pub bartlett_verdict: Verdict,
    /// Names of variables whose MSA falls below the configured threshold.
    pub msa_flags: Vec<String>,
}

/// Runs the full adequacy assessment: KMO and Bartlett with pass/fail
/// verdicts against the supplied thresholds, plus per-variable MSA flags.
///
/// Both gates pass on equality: a KMO exactly at the threshold is accepted,
/// and sphericity is rejected only when `p_value < alpha`.
pub fn assess(
    r: &CorrelationMatrix,
    n: usize,
    msa_threshold: f64,
    kmo_threshold: f64,
    alpha: f64,
) -> Result<(AdequacyReport, AntiImageMatrix)> {
    if !(0.0..=1.0).contains(&msa_threshold) || !(0.0..=1.0).contains(&kmo_threshold) {
        return Err(Error::InvalidInput(
            "MSA and KMO thresholds must lie in [0, 1]".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let anti = anti_image(r)?;
    let overall = kmo(r)?;
    let (stat, df, p_value) = bartlett_test(r, n)?;

    let kmo_verdict = if overall >= kmo_threshold {
        Verdict {
            pass: true,
            message: format!(
                "KMO {overall:.3} >= {kmo_threshold:.3}; sampling is adequate"
            ),
        }
    } else {
        Verdict {
            pass: false,
            message: format!(
                "KMO {overall:.3} < {kmo_threshold:.3}; data inappropriate for PCA"
            ),
        }
    };
    let bartlett_verdict = if p_value < alpha {
        Verdict {
            pass: true,
            message: format!(
                "Bartlett chi-square {stat:.3} (df {df}), p {p_value:.3e} < alpha {alpha}; variables are sufficiently interrelated"
            ),
        }
    } else {
        Verdict {
            pass: false,
            message: format!(
                "Bartlett chi-square {stat:.3} (df {df}), p {p_value:.3e} >= alpha {alpha}; variables not interrelated"
            ),
        }
    };

    let msa = anti.msa();
    let msa_flags: Vec<String> = r
        .variable_names()
        .iter()
        .zip(&msa)
        .filter(|(_, &m)| m < msa_threshold)
        .map(|(name, _)| name.clone())
        .collect();

    Ok((
        AdequacyReport {
            kmo: overall,
            bartlett_stat: stat,
            bartlett_df: df,
            bartlett_p: p_value,
            msa,
            kmo_verdict,
            bartlett_verdict,
            msa_flags,
        },
        anti,
    ))
}
