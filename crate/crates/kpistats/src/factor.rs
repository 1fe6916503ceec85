//! The orthogonal factor model: principal-component extraction and maximum
//! likelihood estimation with a diagonal-uniqueness constraint.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::numerics::{sym_eigen, EigenResult};
use serde::Serialize;

/// Uniquenesses are never allowed below this floor; reaching it marks the
/// fit as a Heywood case instead of producing zero or negative variances.
pub const UNIQUENESS_FLOOR: f64 = 1e-3;

const ML_TOL: f64 = 1e-8;
const ML_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaMethod {
    Principal,
    MaxLikelihood,
}

/// A fitted factor model s ≈ L·Lᵀ + diag(ω).
#[derive(Debug, Clone, Serialize)]
pub struct FactorModel {
    pub variable_labels: Vec<String>,
    /// p × k loading matrix.
    pub loadings: Mat,
    /// Specific variances ω, all ≥ [`UNIQUENESS_FLOOR`].
    pub uniquenesses: Vec<f64>,
    pub method: FaMethod,
    pub n_factors: usize,
    /// Gaussian log-likelihood up to its additive constant (ML fits only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_likelihood: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// True when any uniqueness had to be clamped at the floor.
    pub heywood: bool,
    /// True when (p−k)² < p+k, i.e. the model has more free parameters than
    /// the covariance matrix supplies.
    pub dof_warning: bool,
}

impl FactorModel {
    /// Replaces the placeholder variable labels (x1, x2, …) with real ones.
    pub fn with_labels(mut self, labels: &[String]) -> Result<FactorModel> {
        if labels.len() != self.uniquenesses.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} variables",
                labels.len(),
                self.uniquenesses.len()
            )));
        }
        self.variable_labels = labels.to_vec();
        Ok(self)
    }

    /// The fitted common-variance matrix L·Lᵀ.
    pub fn communality_matrix(&self) -> Mat {
        self.loadings.matmul(&self.loadings.transpose())
    }
}

fn placeholder_labels(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("x{i}")).collect()
}

fn check_k(p: usize, k: usize) -> Result<()> {
    if k < 1 || k >= p {
        return Err(Error::Domain(format!(
            "factor count must lie in 1..={}, got {k}",
            p.saturating_sub(1)
        )));
    }
    Ok(())
}

fn dof_deficient(p: usize, k: usize) -> bool {
    let m = p - k;
    m * m < p + k
}

/// Principal-component extraction: loadings are the top-k eigenvectors
/// scaled by the square roots of their eigenvalues.
pub fn fa_principal(s: &Mat, k: usize) -> Result<FactorModel> {
    let p = s.nrows();
    check_k(p, k)?;
    let eigen = sym_eigen(s)?;
    let max_eig = eigen.eigenvalues.first().copied().unwrap_or(0.0).max(1.0);
    if eigen.eigenvalues.iter().any(|&l| l < -1e-8 * max_eig) {
        return Err(Error::Numeric(format!(
            "matrix is not positive semidefinite (eigenvalue {})",
            eigen.eigenvalues.last().unwrap()
        )));
    }
    let loadings = Mat::from_fn(p, k, |i, j| {
        eigen.eigenvectors[(i, j)] * eigen.eigenvalues[j].max(0.0).sqrt()
    });
    let mut heywood = false;
    let uniquenesses: Vec<f64> = (0..p)
        .map(|i| {
            let communality: f64 = (0..k).map(|j| loadings[(i, j)].powi(2)).sum();
            let w = s[(i, i)] - communality;
            if w < UNIQUENESS_FLOOR {
                heywood = true;
                UNIQUENESS_FLOOR
            } else {
                w
            }
        })
        .collect();
    Ok(FactorModel {
        variable_labels: placeholder_labels(p),
        loadings,
        uniquenesses,
        method: FaMethod::Principal,
        n_factors: k,
        log_likelihood: None,
        converged: true,
        iterations: 0,
        heywood,
        dof_warning: dof_deficient(p, k),
    })
}

/// Given uniquenesses ω, the likelihood-optimal loadings come from the top-k
/// eigenpairs of ω^−½·s·ω^−½: L = ω^½·Γ·√max(Θ−I, 0). This construction
/// makes Lᵀ·ω⁻¹·L diagonal, the uniqueness condition of the model.
fn loadings_for(s: &Mat, w: &[f64], k: usize) -> Result<Mat> {
    let p = w.len();
    let ws: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let m = Mat::from_fn(p, p, |i, j| s[(i, j)] / (ws[i] * ws[j]));
    let eigen = sym_eigen(&m)?;
    Ok(Mat::from_fn(p, k, |i, j| {
        ws[i] * eigen.eigenvectors[(i, j)] * (eigen.eigenvalues[j] - 1.0).max(0.0).sqrt()
    }))
}

/// Discrepancy −2/n·(log-likelihood − constant): ln det Σ + tr(Σ⁻¹s)
/// − ln det s − p, evaluated through the eigendecomposition of Σ.
fn deviance(s: &Mat, loadings: &Mat, w: &[f64], ln_det_s: f64) -> Result<f64> {
    let p = w.len();
    let sigma = model_sigma(loadings, w);
    let eigen = sym_eigen(&sigma)?;
    let mut ln_det = 0.0;
    let mut trace = 0.0;
    for m in 0..p {
        let lambda = eigen.eigenvalues[m];
        ln_det += lambda.ln();
        // vᵀ·s·v for the m-th eigenvector
        let mut quad = 0.0;
        for i in 0..p {
            let mut sv = 0.0;
            for j in 0..p {
                sv += s[(i, j)] * eigen.eigenvectors[(j, m)];
            }
            quad += eigen.eigenvectors[(i, m)] * sv;
        }
        trace += quad / lambda;
    }
    Ok(ln_det + trace - ln_det_s - p as f64)
}

fn model_sigma(loadings: &Mat, w: &[f64]) -> Mat {
    let p = w.len();
    let k = loadings.ncols();
    Mat::from_fn(p, p, |i, j| {
        let ll: f64 = (0..k).map(|m| loadings[(i, m)] * loadings[(j, m)]).sum();
        ll + if i == j { w[i] } else { 0.0 }
    })
}

fn clamp_floor(w: &mut [f64]) {
    for v in w {
        if *v < UNIQUENESS_FLOOR {
            *v = UNIQUENESS_FLOOR;
        }
    }
}

fn inverse_diagonal(eigen: &EigenResult) -> Vec<f64> {
    let p = eigen.eigenvalues.len();
    (0..p)
        .map(|i| {
            (0..p)
                .map(|m| eigen.eigenvectors[(i, m)].powi(2) / eigen.eigenvalues[m])
                .sum()
        })
        .collect()
}

/// Maximum-likelihood factor analysis. The uniquenesses are driven uphill in
/// likelihood by a hybrid step — the classical update ω = diag(s − LLᵀ) when
/// it does not increase the deviance, otherwise a backtracking projected
/// gradient step — with the loadings profiled out via [`loadings_for`].
/// Factors whose removal leaves the deviance unchanged are zeroed out at
/// convergence, so exactly-diagonal inputs report zero loadings.
pub fn fa_ml(s: &Mat, k: usize, n_samples: usize) -> Result<FactorModel> {
    let p = s.nrows();
    check_k(p, k)?;
    let eigen_s = sym_eigen(s)?;
    let max_eig = eigen_s.eigenvalues.first().copied().unwrap_or(0.0);
    let min_eig = eigen_s.eigenvalues.last().copied().unwrap_or(0.0);
    if min_eig <= 1e-12 * max_eig.max(1.0) {
        return Err(Error::Numeric(format!(
            "matrix is singular or not positive definite (eigenvalue {min_eig})"
        )));
    }
    let ln_det_s: f64 = eigen_s.eigenvalues.iter().map(|l| l.ln()).sum();

    // starting point: ωᵢ = (1 − k/2p) / (s⁻¹)ᵢᵢ
    let shrink = 1.0 - k as f64 / (2.0 * p as f64);
    let mut w: Vec<f64> = inverse_diagonal(&eigen_s)
        .iter()
        .map(|d| shrink / d)
        .collect();
    clamp_floor(&mut w);
    let mut loadings = loadings_for(s, &w, k)?;
    let mut f = deviance(s, &loadings, &w, ln_det_s)?;

    let mut iterations = 0;
    let mut converged = false;
    while iterations < ML_MAX_ITER {
        iterations += 1;

        // classical update first; it usually ascends and costs one step
        let mut w_c: Vec<f64> = (0..p)
            .map(|i| {
                let communality: f64 = (0..k).map(|m| loadings[(i, m)].powi(2)).sum();
                s[(i, i)] - communality
            })
            .collect();
        clamp_floor(&mut w_c);
        let l_c = loadings_for(s, &w_c, k)?;
        let f_c = deviance(s, &l_c, &w_c, ln_det_s)?;

        let (w_new, l_new, f_new) = if f_c <= f + 1e-15 {
            (w_c, l_c, f_c)
        } else {
            // deviance gradient in ω is diag(Σ⁻¹(Σ−s)Σ⁻¹); backtrack until
            // the step stops increasing the deviance
            let sigma = model_sigma(&loadings, &w);
            let eigen = sym_eigen(&sigma)?;
            let inv = Mat::from_fn(p, p, |i, j| {
                (0..p)
                    .map(|m| {
                        eigen.eigenvectors[(i, m)] * eigen.eigenvectors[(j, m)]
                            / eigen.eigenvalues[m]
                    })
                    .sum()
            });
            let diff = Mat::from_fn(p, p, |i, j| sigma[(i, j)] - s[(i, j)]);
            let grad_mat = inv.matmul(&diff).matmul(&inv);
            let grad: Vec<f64> = (0..p).map(|i| grad_mat[(i, i)]).collect();

            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..80 {
                let mut w_try: Vec<f64> = w
                    .iter()
                    .zip(&grad)
                    .map(|(wi, gi)| wi - step * gi)
                    .collect();
                clamp_floor(&mut w_try);
                let l_try = loadings_for(s, &w_try, k)?;
                let f_try = deviance(s, &l_try, &w_try, ln_det_s)?;
                if f_try <= f + 1e-15 {
                    accepted = Some((w_try, l_try, f_try));
                    break;
                }
                step *= 0.5;
            }
            match accepted {
                Some(t) => t,
                None => {
                    // no step of any size improves: numerically stationary
                    converged = true;
                    break;
                }
            }
        };

        debug_assert!(f_new <= f + 1e-12, "likelihood must not decrease");
        let delta = w
            .iter()
            .zip(&w_new)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        w = w_new;
        loadings = l_new;
        f = f_new;
        if delta <= ML_TOL {
            converged = true;
            break;
        }
    }

    // canonical form: a factor that buys no likelihood folds back into the
    // uniquenesses (this is what makes diagonal inputs come out loading-free)
    for j in 0..k {
        if (0..p).all(|i| loadings[(i, j)] == 0.0) {
            continue;
        }
        let mut w_try: Vec<f64> = (0..p)
            .map(|i| w[i] + loadings[(i, j)].powi(2))
            .collect();
        clamp_floor(&mut w_try);
        let mut l_try = loadings.clone();
        for i in 0..p {
            l_try[(i, j)] = 0.0;
        }
        let f_try = deviance(s, &l_try, &w_try, ln_det_s)?;
        if f_try <= f + 1e-9 * (1.0 + f.abs()) {
            w = w_try;
            loadings = l_try;
            f = f_try;
        }
    }

    let heywood = w.iter().any(|&v| v <= UNIQUENESS_FLOOR);
    Ok(FactorModel {
        variable_labels: placeholder_labels(p),
        loadings,
        uniquenesses: w,
        method: FaMethod::MaxLikelihood,
        n_factors: k,
        log_likelihood: Some(-(n_samples as f64) / 2.0 * f),
        converged,
        iterations,
        heywood,
        dof_warning: dof_deficient(p, k),
    })
}
