//! Dissimilarity measures between samples and the pairwise distance matrix.

use crate::error::{Error, Result};
use crate::frame::KpiFrame;
use crate::mat::Mat;
use serde::Serialize;

/// The supported dissimilarity measures. `city_block` averages the absolute
/// coordinate differences over the dimension count rather than summing them;
/// `power` generalizes Minkowski with independent exponents, reducing to
/// `euclidean` at p = r = 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    SquaredEuclidean,
    CityBlock,
    Chebychev,
    Power { p: f64, r: f64 },
}

impl Metric {
    /// Validates metric parameters (power exponents must be positive finite).
    pub fn validate(self) -> Result<()> {
        if let Metric::Power { p, r } = self {
            if !(p > 0.0 && p.is_finite() && r > 0.0 && r.is_finite()) {
                return Err(Error::Domain(format!(
                    "power metric needs finite p > 0 and r > 0, got p={p}, r={r}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::SquaredEuclidean => "squared_euclidean",
            Metric::CityBlock => "city_block",
            Metric::Chebychev => "chebychev",
            Metric::Power { .. } => "power",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Power { p, r } => write!(f, "power(p={p}, r={r})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parses a metric name; power exponents default to 2 and are overridden via
/// the CLI's --power-p/--power-r flags.
impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Metric> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "squared_euclidean" => Ok(Metric::SquaredEuclidean),
            "city_block" => Ok(Metric::CityBlock),
            "chebychev" => Ok(Metric::Chebychev),
            "power" => Ok(Metric::Power { p: 2.0, r: 2.0 }),
            other => Err(Error::Domain(format!(
                "unknown metric {other:?} (available: euclidean, squared_euclidean, \
                 city_block, chebychev, power)"
            ))),
        }
    }
}

/// Dissimilarity between two equal-length vectors under the given metric.
pub fn distance(x: &[f64], y: &[f64], metric: Metric) -> Result<f64> {
    metric.validate()?;
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Shape(format!(
            "vectors must share a dimension >= 1, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if !x.iter().chain(y).all(|v| v.is_finite()) {
        return Err(Error::Numeric("distance over non-finite coordinates".into()));
    }
    let diffs = x.iter().zip(y).map(|(a, b)| a - b);
    Ok(match metric {
        Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        Metric::SquaredEuclidean => diffs.map(|d| d * d).sum(),
        Metric::CityBlock => diffs.map(f64::abs).sum::<f64>() / x.len() as f64,
        Metric::Chebychev => diffs.map(f64::abs).fold(0.0, f64::max),
        Metric::Power { p, r } => diffs.map(|d| d.abs().powf(p)).sum::<f64>().powf(1.0 / r),
    })
}

/// A symmetric, zero-diagonal matrix of pairwise sample dissimilarities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub d: Mat,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Checks the distance-matrix shape invariants: square, matching labels,
    /// zero diagonal, symmetric, nonnegative, finite.
    pub fn validate(&self) -> Result<()> {
        let n = self.d.nrows();
        if self.d.ncols() != n || self.labels.len() != n {
            return Err(Error::InvalidDistanceMatrix(format!(
                "{} labels for a {}x{} matrix",
                self.labels.len(),
                self.d.nrows(),
                self.d.ncols()
            )));
        }
        for i in 0..n {
            if self.d[(i, i)] != 0.0 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "nonzero diagonal at {}",
                    self.labels[i]
                )));
            }
            for j in 0..n {
                let v = self.d[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "entry ({}, {}) = {v}",
                        self.labels[i], self.labels[j]
                    )));
                }
                if v != self.d[(j, i)] {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "asymmetry between {} and {}",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Labeled square matrix as CSV, reusing the shortest round-trip float
    /// form used everywhere else.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for v in self.d.row(i) {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// All pairwise distances between the rows (samples) of a frame.
pub fn distance_matrix(frame: &KpiFrame, metric: Metric) -> Result<DistanceMatrix> {
    metric.validate()?;
    let n = frame.n_samples();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let mut d = Mat::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = distance(frame.values.row(i), frame.values.row(j), metric)?;
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(DistanceMatrix {
        labels: frame.sample_labels.clone(),
        d,
    })
}
