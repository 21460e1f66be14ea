//! Acceptance suite: twelve numbered end-to-end checks that gate a release.
//!
//! Each check prints one `criterion NN <title>: pass/FAIL` line (visible with
//! `cargo test --test acceptance -- --nocapture`) and fails the build when its
//! pinned tolerance is exceeded. Criteria 1-6 replay a fixed eight-variable,
//! three-component reference analysis; 7-10 drive the kernels against
//! independent oracles on random inputs; 11 runs the full pipeline on seeded
//! synthetic data; 12 records what the reference analysis cannot cover.

use pcakit::adequacy::{anti_image, bartlett_test, kmo};
use pcakit::extraction::{kaiser_retain, variance_table};
use pcakit::matrix::eigen_symmetric;
use pcakit::pipeline::{run_pipeline, PipelineConfig};
use pcakit::rotation::{detect_complex_structure, varimax, varimax_criterion};
use pcakit::scoring::score_coefficients;
use pcakit::stats::{chi_square_sf, correlation_matrix};
use pcakit::{CorrelationMatrix, DataMatrix, LoadingMatrix, SymmetricMatrix};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

// --- Pinned tolerances ------------------------------------------------------

/// Reference coefficients and communalities are printed to three decimals.
const TOL_THREE_DECIMALS: f64 = 0.002;
/// Variance percentages are printed to three decimals but accumulate rounding.
const TOL_VARIANCE: f64 = 0.01;
/// Column sums of squares of the reference loadings.
const TOL_COLUMN_SSQ: f64 = 0.001;
/// Row sums of squares preserved by rotation.
const TOL_ROW_SSQ: f64 = 1e-8;
/// Orthogonality of the accumulated rotation matrix.
const TOL_ORTHOGONAL: f64 = 1e-10;
/// Slack for float noise in the nondecreasing criterion history.
const TOL_HISTORY: f64 = 1e-12;
/// Converged varimax criterion vs. brute-force angle grid.
const TOL_GRID: f64 = 1e-6;
/// Eigen reconstruction error.
const TOL_RECONSTRUCT: f64 = 1e-8;
/// Eigenvalue sum vs. matrix trace.
const TOL_TRACE: f64 = 1e-10;
/// Jacobi eigenvalues vs. characteristic-polynomial bisection.
const TOL_BISECTION: f64 = 1e-8;
/// Two-variable closed-form adequacy values.
const TOL_ANALYTIC: f64 = 1e-12;
/// Anti-image partials vs. the regression-residual definition.
const TOL_PARTIAL: f64 = 1e-8;
/// Tabulated 0.05 critical point of the chi-square with two degrees of freedom.
const TOL_CRITICAL: f64 = 0.0005;

// --- Reference analysis fixtures --------------------------------------------
//
// A fixed eight-variable, three-component exploratory analysis used as ground
// truth: eigenvalues of the correlation matrix, loadings before and after a
// varimax rotation with Kaiser normalization, and the score coefficients
// implied by dividing each rotated loading by the root of its eigenvalue.
// All values carry three printed decimals.

const VARS: [&str; 8] = ["x1", "x2", "x3", "x4", "x5", "x7", "x8", "x9"];

const EIGENVALUES: [f64; 8] = [3.520, 1.209, 1.112, 0.710, 0.613, 0.540, 0.216, 0.081];

const UNROTATED: [[f64; 3]; 8] = [
    [-0.416, 0.575, 0.302],
    [0.799, 0.267, -0.386],
    [0.832, 0.154, 0.123],
    [0.861, 0.016, 0.080],
    [0.465, -0.417, 0.514],
    [0.342, 0.514, 0.685],
    [0.461, -0.610, 0.129],
    [0.854, 0.255, -0.317],
];

const ROTATED: [[f64; 3]; 8] = [
    [-0.273, -0.564, 0.450],
    [0.924, 0.028, -0.059],
    [0.725, 0.307, 0.334],
    [0.718, 0.419, 0.239],
    [0.066, 0.732, 0.339],
    [0.183, 0.053, 0.849],
    [0.139, 0.758, -0.085],
    [0.942, 0.087, 0.005],
];

const COEFFICIENTS: [[f64; 3]; 8] = [
    [-0.145, -0.513, 0.427],
    [0.492, 0.025, -0.056],
    [0.386, 0.279, 0.317],
    [0.382, 0.381, 0.227],
    [0.035, 0.666, 0.321],
    [0.098, 0.048, 0.805],
    [0.074, 0.689, -0.080],
    [0.502, 0.079, 0.005],
];

// --- Harness -----------------------------------------------------------------

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion(number: usize, title: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) => println!("criterion {number:02} {title}: pass ({detail})"),
        Err(why) => {
            println!("criterion {number:02} {title}: FAIL ({why})");
            panic!("criterion {number:02} {title}: {why}");
        }
    }
}

fn reference_loadings(values: &[[f64; 3]; 8], rotated: bool) -> LoadingMatrix {
    LoadingMatrix::new(
        VARS.iter().map(|s| s.to_string()).collect(),
        (1..=3).map(|k| format!("PC{k}")).collect(),
        values.iter().map(|row| row.to_vec()).collect(),
        rotated,
    )
    .expect("reference loadings are valid")
}

fn identity_correlation(p: usize) -> CorrelationMatrix {
    CorrelationMatrix::new(
        SymmetricMatrix::identity(p),
        (1..=p).map(|j| format!("v{j}")).collect(),
    )
    .expect("identity is a valid correlation matrix")
}

// --- Criteria 1-6: reference analysis reproduction ---------------------------

#[test]
fn c01_score_coefficient_reproduction() {
    criterion(1, "score-coefficient reproduction", || {
        let rotated = reference_loadings(&ROTATED, true);
        let coef = score_coefficients(&rotated, &EIGENVALUES[..3])
            .map_err(|e| format!("score_coefficients failed: {e}"))?;
        let mut worst = 0.0f64;
        for (j, row) in COEFFICIENTS.iter().enumerate() {
            for (k, &want) in row.iter().enumerate() {
                let got = coef.get(j, k);
                let err = (got - want).abs();
                worst = worst.max(err);
                ensure!(
                    err <= TOL_THREE_DECIMALS,
                    "{} on PC{}: got {got:.4}, want {want:.3} (err {err:.4} > {TOL_THREE_DECIMALS})",
                    VARS[j],
                    k + 1
                );
            }
        }
        Ok(format!(
            "all 24 coefficients within +/-{TOL_THREE_DECIMALS}, worst error {worst:.5}"
        ))
    });
}

#[test]
fn c02_variance_accounting() {
    criterion(2, "variance accounting", || {
        let table = variance_table(&EIGENVALUES, 8)
            .map_err(|e| format!("variance_table failed: {e}"))?;
        let want_percent = [43.996, 15.113, 13.902];
        for (k, &want) in want_percent.iter().enumerate() {
            let got = table.rows[k].percent_of_variance;
            ensure!(
                (got - want).abs() <= TOL_VARIANCE,
                "component {} share: got {got:.4}, want {want}",
                k + 1
            );
        }
        let cumulative = table.rows[2].cumulative_percent;
        ensure!(
            (cumulative - 73.01).abs() <= TOL_VARIANCE,
            "three-component cumulative share: got {cumulative:.4}, want 73.01"
        );
        Ok(format!(
            "shares {:.3}/{:.3}/{:.3}, cumulative {:.3}, all within +/-{TOL_VARIANCE}",
            table.rows[0].percent_of_variance,
            table.rows[1].percent_of_variance,
            table.rows[2].percent_of_variance,
            cumulative
        ))
    });
}

#[test]
fn c03_kaiser_retention() {
    criterion(3, "Kaiser retention", || {
        let m = kaiser_retain(&EIGENVALUES).map_err(|e| format!("kaiser_retain failed: {e}"))?;
        ensure!(m == 3, "retained {m} components, want exactly 3");
        Ok("eigenvalues above 1 retained: exactly 3".into())
    });
}

#[test]
fn c04_cross_loading_detection() {
    criterion(4, "cross-loading detection", || {
        let unrotated = reference_loadings(&UNROTATED, false);
        let complex = detect_complex_structure(&unrotated, 0.5)
            .map_err(|e| format!("detect_complex_structure failed: {e}"))?;
        ensure!(
            complex == ["x7"],
            "flagged {complex:?}, want exactly [\"x7\"]"
        );
        Ok("exactly x7 loads above 0.5 on two components".into())
    });
}

#[test]
fn c05_loading_convention_consistency() {
    criterion(5, "loading-convention consistency", || {
        let unrotated = reference_loadings(&UNROTATED, false);
        // The squared sum of a loading column reproduces its eigenvalue.
        // Column 2's reference total is inconsistent with its own printed
        // entries, so only columns 1 and 3 are checked.
        for (k, want) in [(0usize, 3.520f64), (2, 1.112)] {
            let ssq: f64 = unrotated.column(k).iter().map(|v| v * v).sum();
            ensure!(
                (ssq - want).abs() <= TOL_COLUMN_SSQ,
                "column {} sum of squares: got {ssq:.4}, want {want}",
                k + 1
            );
        }
        Ok(format!(
            "columns 1 and 3 reproduce their eigenvalues within +/-{TOL_COLUMN_SSQ}"
        ))
    });
}

#[test]
fn c06_communality_conservation_reference() {
    criterion(6, "communality conservation (reference)", || {
        let before = reference_loadings(&UNROTATED, false).communalities();
        let after = reference_loadings(&ROTATED, true).communalities();
        for (j, name) in VARS.iter().enumerate() {
            let diff = (before[j] - after[j]).abs();
            if *name == "x7" {
                // The one variable whose reference rows genuinely disagree;
                // requiring agreement here would hide the discrepancy.
                ensure!(
                    diff > TOL_THREE_DECIMALS,
                    "x7 communalities unexpectedly agree (diff {diff:.5})"
                );
            } else {
                ensure!(
                    diff <= TOL_THREE_DECIMALS,
                    "{name}: communality {:.4} vs {:.4} (diff {diff:.4})",
                    before[j],
                    after[j]
                );
            }
        }
        Ok(format!(
            "7 of 8 variables agree within +/-{TOL_THREE_DECIMALS}; x7 diverges as documented"
        ))
    });
}

// --- Criteria 7-8: rotation properties and oracle ----------------------------

/// Random loading matrix with rows scaled to communality well inside (0, 1).
fn random_loadings(rng: &mut ChaCha8Rng, p: usize, m: usize) -> LoadingMatrix {
    let values: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            let raw: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-6);
            let target = 0.3 + 0.65 * rng.random::<f64>();
            raw.iter().map(|v| v / norm * target).collect()
        })
        .collect();
    LoadingMatrix::new(
        (1..=p).map(|j| format!("v{j}")).collect(),
        (1..=m).map(|k| format!("PC{k}")).collect(),
        values,
        false,
    )
    .expect("scaled rows stay within loading bounds")
}

#[test]
fn c07_communality_conservation_property() {
    criterion(7, "communality conservation (property)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for i in 0..100 {
            let p = 4 + (i % 9); // 4..=12
            let m = 2 + (i % 3); // 2..=4
            let l = random_loadings(&mut rng, p, m);
            let r = varimax(&l, true).map_err(|e| format!("case {i}: varimax failed: {e}"))?;

            let before = l.communalities();
            let after = r.rotated.communalities();
            for j in 0..p {
                ensure!(
                    (before[j] - after[j]).abs() <= TOL_ROW_SSQ,
                    "case {i}: row {j} sum of squares drifted by {:.2e}",
                    (before[j] - after[j]).abs()
                );
            }

            for a in 0..m {
                for b in 0..m {
                    let dot: f64 = (0..m).map(|k| r.rotation[k][a] * r.rotation[k][b]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    ensure!(
                        (dot - want).abs() <= TOL_ORTHOGONAL,
                        "case {i}: rotation columns {a},{b} dot {dot:.2e}"
                    );
                }
            }

            for w in r.criterion_history.windows(2) {
                ensure!(
                    w[1] >= w[0] - TOL_HISTORY,
                    "case {i}: criterion history decreased {:.17} -> {:.17}",
                    w[0],
                    w[1]
                );
            }
        }
        Ok(format!(
            "100 random rotations: row sums within {TOL_ROW_SSQ:.0e}, \
             orthogonality within {TOL_ORTHOGONAL:.0e}, history nondecreasing"
        ))
    });
}

/// Varimax criterion of a two-column matrix rotated by `theta`, computed on
/// raw rows so the oracle shares no code with the iterative rotation.
fn criterion_at_angle(rows: &[(f64, f64)], theta: f64) -> f64 {
    let p = rows.len() as f64;
    let (c, s) = (theta.cos(), theta.sin());
    let mut total = 0.0;
    for (ca, sa) in [(c, s), (-s, c)] {
        let mut sum2 = 0.0;
        let mut sum4 = 0.0;
        for &(x, y) in rows {
            let b = ca * x + sa * y;
            let b2 = b * b;
            sum2 += b2;
            sum4 += b2 * b2;
        }
        total += (p * sum4 - sum2 * sum2) / (p * p);
    }
    total
}

#[test]
fn c08_varimax_two_component_oracle() {
    criterion(8, "varimax two-component oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let step = 0.001f64.to_radians();
        let mut worst = 0.0f64;
        for i in 0..25 {
            let p = 4 + (i % 7); // 4..=10
            let l = random_loadings(&mut rng, p, 2);
            let rows: Vec<(f64, f64)> = (0..p).map(|j| (l.get(j, 0), l.get(j, 1))).collect();

            // Brute force over a quarter turn at 0.001 degree resolution;
            // beyond 90 degrees the columns only swap or flip sign.
            let mut best = f64::NEG_INFINITY;
            for k in 0..90_000u32 {
                best = best.max(criterion_at_angle(&rows, f64::from(k) * step));
            }

            let r = varimax(&l, false).map_err(|e| format!("case {i}: varimax failed: {e}"))?;
            let converged = varimax_criterion(&r.rotated);
            let diff = (converged - best).abs();
            worst = worst.max(diff);
            ensure!(
                diff <= TOL_GRID,
                "case {i}: converged {converged:.12} vs grid best {best:.12} (diff {diff:.2e})"
            );
        }
        Ok(format!(
            "25 random two-component rotations within {TOL_GRID:.0e} of grid search, \
             worst gap {worst:.2e}"
        ))
    });
}

// --- Criterion 9: eigen kernel ------------------------------------------------

fn random_symmetric(rng: &mut ChaCha8Rng, p: usize) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(p, |_, _| rng.random_range(-3.0..3.0))
        .expect("uniform draws are finite")
}

/// Bisection root finding; falls back to the endpoint with the smaller
/// residual when a bracket carries no sign change (a repeated root).
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return if flo.abs() < fhi.abs() { lo } else { hi };
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo) <= 1e-15 * (1.0 + mid.abs()) {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

/// Eigenvalues of a symmetric 3x3 via bisection on its characteristic
/// polynomial, bracketed by the critical points of the cubic. Descending.
fn eigen3_bisection_oracle(m: &SymmetricMatrix) -> Vec<f64> {
    let a = |i: usize, j: usize| m.get(i, j);
    let tr = a(0, 0) + a(1, 1) + a(2, 2);
    let minors = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1) + a(0, 0) * a(2, 2)
        - a(0, 2) * a(0, 2)
        + a(1, 1) * a(2, 2)
        - a(1, 2) * a(1, 2);
    let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(1, 2))
        - a(0, 1) * (a(0, 1) * a(2, 2) - a(1, 2) * a(0, 2))
        + a(0, 2) * (a(0, 1) * a(1, 2) - a(1, 1) * a(0, 2));
    // det(M - xI) = -x^3 + tr x^2 - minors x + det, evaluated by Horner.
    let poly = move |x: f64| ((tr - x) * x - minors) * x + det;

    let radius = (0..3)
        .map(|i| (0..3).map(|j| a(i, j).abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let (lo, hi) = (-radius - 1.0, radius + 1.0);

    // All roots are real, so the derivative's discriminant cannot be negative;
    // when it vanishes the root is triple.
    let disc = tr * tr - 3.0 * minors;
    let mut roots = if disc <= 0.0 {
        vec![tr / 3.0; 3]
    } else {
        let spread = disc.sqrt();
        let t1 = (tr - spread) / 3.0;
        let t2 = (tr + spread) / 3.0;
        vec![
            bisect(&poly, lo, t1),
            bisect(&poly, t1, t2),
            bisect(&poly, t2, hi),
        ]
    };
    roots.sort_by(|x, y| y.partial_cmp(x).expect("roots are finite"));
    roots
}

#[test]
fn c09_eigen_kernel() {
    criterion(9, "eigen kernel", || {
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        for i in 0..100 {
            let p = 2 + (i % 9); // 2..=10
            let m = random_symmetric(&mut rng, p);
            let e = eigen_symmetric(&m).map_err(|err| format!("case {i}: {err}"))?;

            let mut recon_err = 0.0f64;
            for r in 0..p {
                for c in 0..=r {
                    let recon: f64 = (0..p)
                        .map(|k| e.eigenvalues[k] * e.eigenvectors[k][r] * e.eigenvectors[k][c])
                        .sum();
                    recon_err = recon_err.max((recon - m.get(r, c)).abs());
                }
            }
            ensure!(
                recon_err <= TOL_RECONSTRUCT,
                "case {i}: reconstruction error {recon_err:.2e}"
            );

            let trace: f64 = (0..p).map(|j| m.get(j, j)).sum();
            let sum: f64 = e.eigenvalues.iter().sum();
            ensure!(
                (trace - sum).abs() <= TOL_TRACE,
                "case {i}: eigenvalue sum {sum:.15} vs trace {trace:.15}"
            );
        }

        let mut worst = 0.0f64;
        for i in 0..30 {
            let m = random_symmetric(&mut rng, 3);
            let got = eigen_symmetric(&m)
                .map_err(|err| format!("3x3 case {i}: {err}"))?
                .eigenvalues;
            let want = eigen3_bisection_oracle(&m);
            for k in 0..3 {
                let err = (got[k] - want[k]).abs();
                worst = worst.max(err);
                ensure!(
                    err <= TOL_BISECTION,
                    "3x3 case {i}: eigenvalue {k}: {:.12} vs bisection {:.12}",
                    got[k],
                    want[k]
                );
            }
        }
        Ok(format!(
            "100 reconstructions within {TOL_RECONSTRUCT:.0e}, traces within {TOL_TRACE:.0e}, \
             30 bisection cross-checks within {TOL_BISECTION:.0e} (worst {worst:.2e})"
        ))
    });
}

// --- Criterion 10: adequacy analytics ----------------------------------------

/// Solves `a x = b` by Gauss elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("nonempty range");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for r in col + 1..n {
            let f = a[r][col] / pivot_row[col];
            for (c, pv) in pivot_row.iter().enumerate().skip(col) {
                a[r][c] -= f * pv;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    x
}

/// Partial correlation of variables `i` and `j` given all others, by the
/// regression-residual definition: correlate what is left of each variable
/// after regressing both on the remaining ones.
fn partial_correlation_oracle(r: &CorrelationMatrix, i: usize, j: usize) -> f64 {
    let rest: Vec<usize> = (0..r.order()).filter(|&k| k != i && k != j).collect();
    let sub: Vec<Vec<f64>> = rest
        .iter()
        .map(|&a| rest.iter().map(|&b| r.get(a, b)).collect())
        .collect();
    let ri: Vec<f64> = rest.iter().map(|&a| r.get(a, i)).collect();
    let rj: Vec<f64> = rest.iter().map(|&a| r.get(a, j)).collect();
    let beta_i = solve(sub.clone(), ri.clone());
    let beta_j = solve(sub, rj.clone());
    let cov = r.get(i, j) - ri.iter().zip(&beta_j).map(|(x, y)| x * y).sum::<f64>();
    let var_i = 1.0 - ri.iter().zip(&beta_i).map(|(x, y)| x * y).sum::<f64>();
    let var_j = 1.0 - rj.iter().zip(&beta_j).map(|(x, y)| x * y).sum::<f64>();
    cov / (var_i * var_j).sqrt()
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DataMatrix {
    let names = (1..=p).map(|j| format!("v{j}")).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    DataMatrix::from_rows(names, &rows).expect("random rows are finite")
}

#[test]
fn c10_adequacy_analytics() {
    criterion(10, "adequacy analytics", || {
        // Two variables: the lone partial equals the lone correlation, so
        // every adequacy index collapses to exactly one half.
        let two = CorrelationMatrix::new(
            SymmetricMatrix::from_rows(&[vec![1.0, 0.6], vec![0.6, 1.0]])
                .expect("valid 2x2 matrix"),
            vec!["a".into(), "b".into()],
        )
        .expect("valid correlation matrix");
        let k = kmo(&two).map_err(|e| format!("kmo failed: {e}"))?;
        ensure!((k - 0.5).abs() <= TOL_ANALYTIC, "two-variable KMO {k:.15}");
        for (j, msa) in anti_image(&two)
            .map_err(|e| format!("anti_image failed: {e}"))?
            .msa()
            .iter()
            .enumerate()
        {
            ensure!(
                (msa - 0.5).abs() <= TOL_ANALYTIC,
                "two-variable MSA {j}: {msa:.15}"
            );
        }

        // Anti-image partials vs. the regression-residual definition.
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let mut worst = 0.0f64;
        for case in 0..20 {
            let p = 4 + (case % 3); // 4..=6
            let r = correlation_matrix(&random_dataset(&mut rng, 40, p))
                .map_err(|e| format!("case {case}: correlation failed: {e}"))?;
            let anti = anti_image(&r).map_err(|e| format!("case {case}: {e}"))?;
            for i in 0..p {
                for j in 0..i {
                    let want = partial_correlation_oracle(&r, i, j);
                    let got = anti.partial(i, j);
                    let err = (got - want).abs();
                    worst = worst.max(err);
                    ensure!(
                        err <= TOL_PARTIAL,
                        "case {case}: partial ({i},{j}): {got:.12} vs residual oracle {want:.12}"
                    );
                }
            }
        }

        // Sphericity on an identity matrix: nothing to test, statistic zero.
        let (stat, df10, p_value) = bartlett_test(&identity_correlation(10), 100)
            .map_err(|e| format!("bartlett on identity failed: {e}"))?;
        ensure!(stat == 0.0, "identity statistic {stat}");
        ensure!(p_value == 1.0, "identity p-value {p_value}");
        ensure!(df10 == 45, "df for ten variables: {df10}, want 45");
        let (_, df8, _) = bartlett_test(&identity_correlation(8), 100)
            .map_err(|e| format!("bartlett on identity failed: {e}"))?;
        ensure!(df8 == 28, "df for eight variables: {df8}, want 28");

        // Survival function against the tabulated 0.05 point and the exact
        // two-degree closed form exp(-x/2).
        let sf = chi_square_sf(5.991, 2).map_err(|e| format!("chi_square_sf failed: {e}"))?;
        ensure!(
            (sf - 0.05).abs() <= TOL_CRITICAL,
            "sf(5.991, 2) = {sf:.6}, want 0.0500 +/- {TOL_CRITICAL}"
        );
        let closed = (-5.991f64 / 2.0).exp();
        ensure!(
            (sf - closed).abs() <= 1e-12,
            "sf(5.991, 2) = {sf:.15} vs closed form {closed:.15}"
        );

        Ok(format!(
            "two-variable case exact to {TOL_ANALYTIC:.0e}; 20 random matrices match the \
             residual oracle within {TOL_PARTIAL:.0e} (worst {worst:.2e}); identity statistic \
             zero with df 45/28; tabulated critical point within {TOL_CRITICAL}"
        ))
    });
}

// --- Criterion 11: pipeline recovery ------------------------------------------

/// Three clusters of three variables each, every variable loading 0.8 on its
/// cluster factor with 0.6 unique noise. Mirrors the pipeline module's
/// internal test data generator.
fn clustered_data(seed: u64, n: usize, groups: usize) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = groups * 3;
    let names = (1..=p).map(|j| format!("x{j}")).collect();
    let rows = (0..n)
        .map(|_| {
            let factors: Vec<f64> = (0..groups).map(|_| rng.sample(StandardNormal)).collect();
            (0..p)
                .map(|j| {
                    let e: f64 = rng.sample(StandardNormal);
                    0.8 * factors[j / 3] + 0.6 * e
                })
                .collect()
        })
        .collect::<Vec<_>>();
    DataMatrix::from_rows(names, &rows).expect("synthetic rows are valid")
}

/// Appends `extra` pure-noise columns named n1, n2, ... to a dataset.
fn with_noise(base: &DataMatrix, seed: u64, extra: usize) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = base.variable_names().to_vec();
    names.extend((1..=extra).map(|j| format!("n{j}")));
    let rows: Vec<Vec<f64>> = (0..base.n())
        .map(|i| {
            let mut row = base.row(i);
            for _ in 0..extra {
                row.push(rng.sample(StandardNormal));
            }
            row
        })
        .collect();
    DataMatrix::from_rows(names, &rows).expect("synthetic rows are valid")
}

#[test]
fn c11_pipeline_recovery() {
    criterion(11, "pipeline recovery", || {
        let data = with_noise(&clustered_data(11, 200, 3), 9, 1);
        let started = std::time::Instant::now();
        let report = run_pipeline(&data, &PipelineConfig::default())
            .map_err(|e| format!("pipeline failed at {}: {e}", e.stage))?;
        let elapsed = started.elapsed();

        ensure!(
            report.rounds[0].excluded == ["n1"],
            "first screening round excluded {:?}, want the noise column",
            report.rounds[0].excluded
        );
        ensure!(
            report.rounds[0].adequacy.msa_flags == ["n1"],
            "flags were {:?}",
            report.rounds[0].adequacy.msa_flags
        );
        ensure!(report.retained == 3, "retained {}, want 3", report.retained);

        // Each cluster of three indicators must land on one component, and
        // the three clusters on three different ones.
        let rotated = report
            .rotated
            .as_ref()
            .ok_or("rotation was skipped on multi-component data")?;
        let mut assigned = [usize::MAX; 3];
        for (group, slot) in assigned.iter_mut().enumerate() {
            for member in 0..3 {
                let j = group * 3 + member;
                let row = rotated.row(j);
                let (dominant, _) = row
                    .iter()
                    .enumerate()
                    .max_by(|(_, x), (_, y)| x.abs().total_cmp(&y.abs()))
                    .expect("nonempty row");
                if member == 0 {
                    *slot = dominant;
                } else {
                    ensure!(
                        *slot == dominant,
                        "variable x{} peaks on component {} but its cluster sits on {}",
                        j + 1,
                        dominant + 1,
                        *slot + 1
                    );
                }
            }
        }
        ensure!(
            {
                let mut sorted = assigned;
                sorted.sort_unstable();
                sorted == [0, 1, 2]
            },
            "clusters map to components {assigned:?}, want a bijection"
        );
        ensure!(
            elapsed.as_secs_f64() < 1.0,
            "pipeline took {elapsed:?}, want under one second"
        );
        Ok(format!(
            "noise column excluded in round 1, 3 components retained, clusters map \
             one-to-one onto components, finished in {elapsed:?}"
        ))
    });
}

// --- Criterion 12: coverage disclosure ----------------------------------------

#[test]
#[allow(clippy::excessive_precision)]
fn c12_upstream_data_disclosure() {
    criterion(12, "upstream-data disclosure", || {
        // The reference analysis also published whole-matrix adequacy
        // diagnostics (overall KMO of 0.645 and 0.709, sphericity statistics
        // of 340.002 and 254.416, per-variable MSA diagonals). Those numbers
        // are functions of a raw 81-observation dataset that is not available
        // here, so this suite does not reproduce them; the loading, variance,
        // and coefficient checks above plus the property suites cover the
        // same code paths. What can be verified independently is the tail
        // probability attached to each published sphericity statistic.
        let cases = [
            (340.002f64, 45usize, 6.388_926_470_071_949_5e-47),
            (254.416, 28, 2.317_758_579_880_363_1e-38),
        ];
        for (stat, df, want) in cases {
            let p = chi_square_sf(stat, df).map_err(|e| format!("chi_square_sf failed: {e}"))?;
            ensure!(
                p < 0.001,
                "sf({stat}, {df}) = {p:.3e}, expected decisive significance"
            );
            let rel = ((p - want) / want).abs();
            ensure!(
                rel <= 1e-9,
                "sf({stat}, {df}) = {p:.16e} vs reference {want:.16e} (rel {rel:.2e})"
            );
        }
        Ok("raw-data-dependent diagnostics excluded by design; their sphericity \
            tails verified to 1e-9 relative"
            .into())
    });
}
