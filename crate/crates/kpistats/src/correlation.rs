//! Pearson correlation, the least-squares similarity functional Q_min, and
//! the full correlation matrix with two-sided significance tests.

use crate::error::{Error, Result};
use crate::frame::KpiFrame;
use crate::mat::Mat;
use crate::numerics::student_t_two_sided_p;
use serde::Serialize;

/// Pairwise correlation analysis of every variable in a frame.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationResult {
    pub variable_labels: Vec<String>,
    /// Symmetric matrix of Pearson coefficients with unit diagonal.
    pub r: Mat,
    /// Symmetric matrix of two-sided p-values with zero diagonal.
    pub p: Mat,
    pub n_samples: usize,
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "sequence lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: x.len() });
    }
    Ok(())
}

/// Deviations from the mean, computed in a second pass for stability on
/// large-magnitude columns.
fn deviations(x: &[f64]) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| v - mean).collect()
}

/// Pearson product-moment correlation of two equal-length sequences.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let dx = deviations(x);
    let dy = deviations(y);
    let sxx: f64 = dx.iter().map(|v| v * v).sum();
    let syy: f64 = dy.iter().map(|v| v * v).sum();
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x".into()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y".into()));
    }
    let sxy: f64 = dx.iter().zip(&dy).map(|(a, b)| a * b).sum();
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Minimal sum of squared errors of the best line through (x, y), scaled by
/// 1/n: the unexplained share of y's variance. Zero exactly when the points
/// are collinear.
pub fn q_min(x: &[f64], y: &[f64]) -> Result<f64> {
    let r = pearson(x, y)?;
    let dy = deviations(y);
    let syy: f64 = dy.iter().map(|v| v * v).sum();
    Ok((syy / y.len() as f64 * (1.0 - r * r)).max(0.0))
}

/// Correlation and two-sided significance for every pair of variables.
/// The p-value uses the exact t distribution of r under the null,
/// t = r·√((n−2)/(1−r²)) with n−2 degrees of freedom; |r| within 1e−12 of 1
/// is treated as exactly ±1 (p = 0).
pub fn correlation_matrix(frame: &KpiFrame) -> Result<CorrelationResult> {
    let n = frame.n_samples();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let p_vars = frame.n_variables();
    let mut centered = Vec::with_capacity(p_vars);
    let mut norms = Vec::with_capacity(p_vars);
    for j in 0..p_vars {
        let d = deviations(&frame.column(j));
        let s: f64 = d.iter().map(|v| v * v).sum();
        if s == 0.0 {
            return Err(Error::ZeroVariance(frame.variable_labels[j].clone()));
        }
        centered.push(d);
        norms.push(s);
    }
    let mut r = Mat::identity(p_vars);
    let mut p = Mat::zeros(p_vars, p_vars);
    for i in 0..p_vars {
        for j in i + 1..p_vars {
            let sxy: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            let rij = (sxy / (norms[i] * norms[j]).sqrt()).clamp(-1.0, 1.0);
            let pij = if rij.abs() >= 1.0 - 1e-12 {
                0.0
            } else {
                let t = rij * ((n as f64 - 2.0) / (1.0 - rij * rij)).sqrt();
                student_t_two_sided_p(t, n - 2)?
            };
            r[(i, j)] = rij;
            r[(j, i)] = rij;
            p[(i, j)] = pij;
            p[(j, i)] = pij;
        }
    }
    Ok(CorrelationResult {
        variable_labels: frame.variable_labels.clone(),
        r,
        p,
        n_samples: n,
    })
}

impl CorrelationResult {
    /// Plain-text lower-triangular table of coefficients, seven decimals.
    pub fn to_table(&self) -> String {
        let label_w = self
            .variable_labels
            .iter()
            .map(|l| l.len())
            .max()
            .unwrap_or(0)
            .max(8);
        let cell_w = self
            .variable_labels
            .iter()
            .map(|l| l.len())
            .max()
            .unwrap_or(0)
            .max(10);
        let mut out = String::new();
        out.push_str(&" ".repeat(label_w));
        for l in &self.variable_labels {
            out.push_str(&format!("  {l:>cell_w$}"));
        }
        out.push('\n');
        for (i, l) in self.variable_labels.iter().enumerate() {
            out.push_str(&format!("{l:<label_w$}"));
            for j in 0..=i {
                out.push_str(&format!("  {:>cell_w$.7}", self.r[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}
