//! Sample statistics: data container, z-score standardization, Pearson
//! correlation matrix, and the chi-square survival function used by the
//! sphericity test.
//!
//! Means are computed with a one-pass mean plus a residual-refinement pass,
//! which keeps centering accurate even when values share a large offset.

use serde::Serialize;

use crate::error::Error;
use crate::matrix::SymmetricMatrix;
use crate::Result;

/// A variable is treated as constant when its sample standard deviation
/// falls below this tolerance relative to `1 + |mean|`.
const CONSTANT_TOL: f64 = 1e-12;

/// Observations-by-variables data with named columns.
///
/// Stored column-major: analysis is column-centric (means, variances,
/// cross-products), so each variable's values stay contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    variable_names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n: usize,
}

impl DataMatrix {
    /// Builds from row-major observations. Requires at least two
    /// observations, one named variable per column, distinct names,
    /// rectangular shape, and finite values.
    pub fn from_rows(variable_names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let p = variable_names.len();
        if p == 0 {
            return Err(Error::InvalidInput("data must have at least one variable".into()));
        }
        for (i, name) in variable_names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidInput(format!("variable {i} has an empty name")));
            }
            if variable_names[..i].contains(name) {
                return Err(Error::InvalidInput(format!("duplicate variable name: {name}")));
            }
        }
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "data must have at least 2 observations, got {n}"
            )));
        }
        let mut columns = vec![Vec::with_capacity(n); p];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidInput(format!(
                    "observation {i} has {} values, expected {p}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                columns[j].push(v);
            }
        }
        Ok(Self {
            variable_names,
            columns,
            n,
        })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of variables.
    pub fn p(&self) -> usize {
        self.columns.len()
    }

    /// Column names, in column order.
    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    /// Values of variable `j`.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    /// Observation `i` as a row vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// A copy with the named variables removed, preserving column order.
    /// Every name must exist, and at least one variable must survive.
    pub fn without(&self, drop: &[String]) -> Result<Self> {
        for name in drop {
            if !self.variable_names.contains(name) {
                return Err(Error::VariableAlignment {
                    detail: format!("cannot drop unknown variable {name}"),
                });
            }
        }
        let keep: Vec<usize> = (0..self.p())
            .filter(|&j| !drop.contains(&self.variable_names[j]))
            .collect();
        if keep.is_empty() {
            return Err(Error::InvalidInput("cannot drop every variable".into()));
        }
        Ok(Self {
            variable_names: keep.iter().map(|&j| self.variable_names[j].clone()).collect(),
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            n: self.n,
        })
    }
}

/// Mean of a column with one refinement pass: the mean of the centering
/// residuals is folded back in, which removes most of the cancellation error
/// when values share a large common offset.
fn refined_mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean: f64 = values.iter().sum::<f64>() / n;
    let residual: f64 = values.iter().map(|v| v - mean).sum::<f64>() / n;
    mean + residual
}

/// Centers one column and returns `(centered, mean, sum_of_squares)`,
/// rejecting (near-)constant columns.
fn center_column(name: &str, values: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    let n = values.len() as f64;
    let mean = refined_mean(values);
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let ss: f64 = centered.iter().map(|c| c * c).sum();
    let sd = (ss / (n - 1.0)).sqrt();
    if sd <= CONSTANT_TOL * (1.0 + mean.abs()) {
        return Err(Error::ConstantVariable { name: name.into() });
    }
    Ok((centered, mean, ss))
}

/// Z-score standardization: each column is centered on its mean and scaled
/// by its sample standard deviation (the `n - 1` form).
pub fn standardize(data: &DataMatrix) -> Result<DataMatrix> {
    let n = data.n() as f64;
    let mut columns = Vec::with_capacity(data.p());
    for j in 0..data.p() {
        let (centered, _, ss) = center_column(&data.variable_names[j], data.column(j))?;
        let sd = (ss / (n - 1.0)).sqrt();
        columns.push(centered.into_iter().map(|c| c / sd).collect());
    }
    Ok(DataMatrix {
        variable_names: data.variable_names.clone(),
        columns,
        n: data.n,
    })
}

/// A Pearson correlation matrix tied to its variable names.
///
/// The diagonal is exactly 1 and off-diagonal entries lie in [-1, 1];
/// construction rejects anything else.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    variable_names: Vec<String>,
    values: SymmetricMatrix,
}

impl CorrelationMatrix {
    /// Wraps a symmetric matrix as a correlation matrix after validating
    /// the unit diagonal, off-diagonal range, and name alignment.
    pub fn new(values: SymmetricMatrix, variable_names: Vec<String>) -> Result<Self> {
        let p = values.order();
        if p < 2 {
            return Err(Error::InvalidInput(
                "correlation matrix needs at least 2 variables".into(),
            ));
        }
        if variable_names.len() != p {
            return Err(Error::VariableAlignment {
                detail: format!("{} names for a matrix of order {p}", variable_names.len()),
            });
        }
        for (i, name) in variable_names.iter().enumerate() {
            if variable_names[..i].contains(name) {
                return Err(Error::InvalidInput(format!("duplicate variable name: {name}")));
            }
        }
        for i in 0..p {
            if values.get(i, i) != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "correlation diagonal must be exactly 1, got {} at {i}",
                    values.get(i, i)
                )));
            }
            for j in 0..i {
                let r = values.get(i, j);
                if !(-1.0..=1.0).contains(&r) {
                    return Err(Error::InvalidInput(format!(
                        "correlation out of range at ({i}, {j}): {r}"
                    )));
                }
            }
        }
        Ok(Self {
            variable_names,
            values,
        })
    }

    /// Number of variables.
    pub fn order(&self) -> usize {
        self.values.order()
    }

    /// Variable names, aligned with row/column indices.
    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    /// Correlation between variables `i` and `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    /// The underlying symmetric matrix.
    pub fn values(&self) -> &SymmetricMatrix {
        &self.values
    }
}

/// Pearson correlation matrix of the data columns.
///
/// Correlations are computed from centered cross-products, clamped into
/// [-1, 1] to absorb roundoff, with the diagonal set to exactly 1.
pub fn correlation_matrix(data: &DataMatrix) -> Result<CorrelationMatrix> {
    let p = data.p();
    if p < 2 {
        return Err(Error::InvalidInput(
            "correlation matrix needs at least 2 variables".into(),
        ));
    }
    let mut centered = Vec::with_capacity(p);
    let mut ss = Vec::with_capacity(p);
    for j in 0..p {
        let (c, _, s) = center_column(&data.variable_names[j], data.column(j))?;
        centered.push(c);
        ss.push(s);
    }
    let values = SymmetricMatrix::from_fn(p, |i, j| {
        if i == j {
            1.0
        } else {
            let dot: f64 = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum();
            (dot / (ss[i] * ss[j]).sqrt()).clamp(-1.0, 1.0)
        }
    })?;
    CorrelationMatrix::new(values, data.variable_names.to_vec())
}

// --- Chi-square survival function -----------------------------------------
//
// sf(x; k) = Q(k/2, x/2), the regularized upper incomplete gamma function,
// evaluated by the series expansion of P for x < a + 1 and by a Lentz
// continued fraction for Q otherwise. Accurate to better than 1e-10 absolute
// over df <= 200, stat <= 2000.

/// Lanczos g = 7, n = 9 coefficients, quoted at their customary precision.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive argument (Lanczos).
fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x) by power series; valid and
/// fast for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    for n in 1..=1000 {
        term *= x / (a + n as f64);
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x) by modified Lentz continued
/// fraction; valid and fast for x >= a + 1.
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Survival function of the chi-square distribution: `P(X > stat)` for `df`
/// degrees of freedom.
pub fn chi_square_sf(stat: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidInput(
            "chi-square degrees of freedom must be >= 1".into(),
        ));
    }
    if !stat.is_finite() || stat < 0.0 {
        return Err(Error::InvalidInput(format!(
            "chi-square statistic must be finite and non-negative, got {stat}"
        )));
    }
    if stat == 0.0 {
        return Ok(1.0);
    }
    let a = df as f64 / 2.0;
    let x = stat / 2.0;
    let q = if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    };
    Ok(q.clamp(0.0, 1.0))
}
