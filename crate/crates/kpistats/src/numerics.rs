//! Deterministic dense linear algebra and special functions.
//!
//! Everything downstream (correlation tests, MDS, correspondence analysis,
//! factor analysis) reduces to the three kernels here: a cyclic Jacobi
//! symmetric eigensolver, a one-sided Jacobi SVD, and the Student-t tail
//! probability via the regularized incomplete beta function. Jacobi methods
//! are chosen for unconditional stability and bit-reproducible output; the
//! matrices involved are at most a few dozen rows.

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Sweep budget for both Jacobi kernels.
const MAX_SWEEPS: usize = 100;
/// Off-diagonal convergence threshold, relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-14;

/// Eigenvalues (descending) with column-aligned orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the unit eigenvector for `eigenvalues[j]`.
    pub eigenvectors: Mat,
}

/// Thin singular value decomposition `A = U · diag(s) · Vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Mat,
    pub singular_values: Vec<f64>,
    pub v: Mat,
}

/// Flips column `j` of `m` (and optionally the same column of `twin`) so the
/// entry of largest magnitude — ties broken by lowest row index — is
/// nonnegative. This pins an otherwise arbitrary sign so repeated runs and
/// different platforms produce identical figures.
fn fix_column_sign(m: &mut Mat, twin: Option<&mut Mat>, j: usize) {
    let mut best_row = 0;
    let mut best_abs = -1.0;
    for i in 0..m.nrows() {
        let a = m[(i, j)].abs();
        if a > best_abs {
            best_abs = a;
            best_row = i;
        }
    }
    if m[(best_row, j)] < 0.0 {
        for i in 0..m.nrows() {
            m[(i, j)] = -m[(i, j)];
        }
        if let Some(t) = twin {
            for i in 0..t.nrows() {
                t[(i, j)] = -t[(i, j)];
            }
        }
    }
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
///
/// The input must be square with symmetry defect at most `1e-9` relative to
/// its largest entry; it is symmetrized internally. Eigenvalues come back
/// sorted descending (stable for ties), eigenvectors obey the deterministic
/// sign convention of [`fix_column_sign`].
pub fn sym_eigen(a: &Mat) -> Result<EigenResult> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if !a.all_finite() {
        return Err(Error::Numeric("matrix has NaN or infinite entries".into()));
    }
    if a.asymmetry() > 1e-9 * a.max_abs().max(1.0) {
        return Err(Error::Numeric("matrix is not symmetric".into()));
    }

    // Work on the symmetrized copy.
    let mut w = Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = Mat::identity(n);
    let norm = w.frobenius();
    let threshold = JACOBI_TOL * norm;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += 2.0 * w[(i, j)] * w[(i, j)];
            }
        }
        if off.sqrt() <= threshold {
            return Ok(finish_eigen(w, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                w[(p, p)] -= h;
                w[(q, q)] += h;
                w[(p, q)] = 0.0;
                w[(q, p)] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let g = w[(i, p)];
                        let hh = w[(i, q)];
                        w[(i, p)] = g - s * (hh + g * tau);
                        w[(p, i)] = w[(i, p)];
                        w[(i, q)] = hh + s * (g - hh * tau);
                        w[(q, i)] = w[(i, q)];
                    }
                }
                for i in 0..n {
                    let g = v[(i, p)];
                    let hh = v[(i, q)];
                    v[(i, p)] = g - s * (hh + g * tau);
                    v[(i, q)] = hh + s * (g - hh * tau);
                }
            }
        }
    }
    Err(Error::Convergence(format!(
        "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
    )))
}

fn finish_eigen(w: Mat, v: Mat) -> EigenResult {
    let n = w.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable descending sort keeps the original order for tied eigenvalues.
    order.sort_by(|&i, &j| w[(j, j)].partial_cmp(&w[(i, i)]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&j| w[(j, j)]).collect();
    let mut vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    for j in 0..n {
        fix_column_sign(&mut vectors, None, j);
    }
    EigenResult {
        eigenvalues,
        eigenvectors: vectors,
    }
}

/// Singular value decomposition by one-sided Jacobi column orthogonalization.
///
/// Returns the thin factorization with `k = min(rows, cols)` columns in `u`
/// and `v`, singular values descending. Wide matrices are handled by
/// factoring the transpose and swapping `u`/`v`. Zero singular values get
/// deterministic orthonormal filler columns in `u` so reconstruction and
/// orthogonality hold for rank-deficient input.
pub fn svd(a: &Mat) -> Result<SvdResult> {
    if !a.all_finite() {
        return Err(Error::Numeric("matrix has NaN or infinite entries".into()));
    }
    if a.nrows() < a.ncols() {
        let t = svd(&a.transpose())?;
        return Ok(SvdResult {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }

    let (m, n) = (a.nrows(), a.ncols());
    let mut w = a.clone();
    let mut v = Mat::identity(n);

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..m {
                    alpha += w[(i, p)] * w[(i, p)];
                    beta += w[(i, q)] * w[(i, q)];
                    gamma += w[(i, p)] * w[(i, q)];
                }
                if alpha == 0.0 || beta == 0.0 || gamma.abs() <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // stable root of t² + 2ζt − 1 = 0, which zeroes the new
                // column inner product
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    // Column norms are the singular values; sort descending (stable).
    let mut s: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)] * w[(i, j)]).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap());
    s = order.iter().map(|&j| s[j]).collect();
    let v_sorted = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    let mut u = Mat::zeros(m, n);
    let rank_tol = s.first().copied().unwrap_or(0.0) * 1e-13;
    for j in 0..n {
        if s[j] > rank_tol && s[j] > 0.0 {
            for i in 0..m {
                u[(i, j)] = w[(i, order[j])] / s[j];
            }
        }
    }
    fill_null_columns(&mut u, &s, rank_tol);
    let mut v_out = v_sorted;
    for j in 0..n {
        fix_column_sign(&mut u, Some(&mut v_out), j);
    }
    for sv in &mut s {
        if *sv <= rank_tol {
            *sv = sv.max(0.0);
        }
    }
    Ok(SvdResult {
        u,
        singular_values: s,
        v: v_out,
    })
}

/// Replaces the (zero) columns of `u` belonging to singular values at or
/// below `tol` with a deterministic orthonormal completion: Gram-Schmidt of
/// the standard basis vectors against the columns already present.
fn fill_null_columns(u: &mut Mat, s: &[f64], tol: f64) {
    let (m, n) = (u.nrows(), u.ncols());
    let mut have: Vec<Vec<f64>> = (0..n)
        .filter(|&j| s[j] > tol && s[j] > 0.0)
        .map(|j| u.col(j))
        .collect();
    let mut next_basis = 0;
    for j in 0..n {
        if s[j] > tol && s[j] > 0.0 {
            continue;
        }
        // Find the first standard basis vector with a sizable residual.
        let mut col = vec![0.0; m];
        'search: while next_basis < m {
            let mut cand = vec![0.0; m];
            cand[next_basis] = 1.0;
            next_basis += 1;
            for existing in &have {
                let dot: f64 = cand.iter().zip(existing).map(|(a, b)| a * b).sum();
                for (c, e) in cand.iter_mut().zip(existing) {
                    *c -= dot * e;
                }
            }
            let norm: f64 = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.5 {
                for c in &mut cand {
                    *c /= norm;
                }
                col = cand;
                break 'search;
            }
        }
        for i in 0..m {
            u[(i, j)] = col[i];
        }
        have.push(col);
    }
}

// ---------------------------------------------------------------------------
// Student-t tail probability
// ---------------------------------------------------------------------------

/// Lanczos approximation of `ln Γ(z)` for `z > 0`.
fn ln_gamma(z: f64) -> f64 {
    const COEF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut series = 1.000_000_000_190_015;
    for (i, c) in COEF.iter().enumerate() {
        series += c / (z + (i + 1) as f64);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.506_628_274_631_000_5 * series / z).ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const TOL: f64 = 1e-14;
    const MAX_ITER: usize = 300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let mut aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < TOL {
            return Ok(h);
        }
    }
    Err(Error::Convergence(
        "incomplete beta continued fraction did not converge in 300 iterations".into(),
    ))
}

/// Regularized incomplete beta function `I_x(a, b)`.
fn beta_inc(x: f64, a: f64, b: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_cf(a, b, x)? / a)
    } else {
        Ok(1.0 - front * beta_cf(b, a, 1.0 - x)? / b)
    }
}

/// Two-sided Student-t tail probability `P(|T_df| ≥ |t|)`.
///
/// Computed as `I_{df/(df+t²)}(df/2, 1/2)`; monotone nonincreasing in `|t|`,
/// exactly 1 at `t = 0`.
pub fn student_t_two_sided_p(t: f64, df: usize) -> Result<f64> {
    if df < 1 {
        return Err(Error::Domain("degrees of freedom must be at least 1".into()));
    }
    if !t.is_finite() {
        return Err(Error::Numeric("t statistic is not finite".into()));
    }
    let df = df as f64;
    let x = df / (df + t * t);
    let p = beta_inc(x, df / 2.0, 0.5)?;
    Ok(p.clamp(0.0, 1.0))
}
