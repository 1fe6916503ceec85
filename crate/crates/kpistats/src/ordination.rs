//! Low-dimensional views: classical (metric) multidimensional scaling with
//! stress diagnostics, and correspondence analysis of a nonnegative table.

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::frame::KpiFrame;
use crate::mat::Mat;
use crate::numerics::{svd, sym_eigen};
use serde::Serialize;

/// A metric MDS embedding. `eigenvalues` is the full descending spectrum of
/// the doubly-centered matrix (negatives retained as diagnostics);
/// `cumulative_proportion[m]` is the share of positive eigenvalue mass in the
/// first m+1 components; `stress_by_dim[m]` is the stress of the (m+1)-column
/// embedding.
#[derive(Debug, Clone, Serialize)]
pub struct Embedding {
    pub labels: Vec<String>,
    pub coordinates: Mat,
    pub eigenvalues: Vec<f64>,
    pub cumulative_proportion: Vec<f64>,
    pub stress_by_dim: Vec<f64>,
}

impl Embedding {
    /// Coordinates as CSV: label column plus one column per dimension.
    pub fn to_coords_csv(&self) -> String {
        let dim = self.coordinates.ncols();
        let mut out = String::from("label");
        for m in 0..dim {
            out.push_str(&format!(",dim{}", m + 1));
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for v in self.coordinates.row(i) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Torgerson scaling: double-center the squared distances, eigendecompose,
/// scale eigenvectors by the square roots of the positive eigenvalues.
/// Columns beyond the positive spectrum come out as zeros.
pub fn classical_mds(dm: &DistanceMatrix, dim: usize) -> Result<Embedding> {
    dm.validate()?;
    let n = dm.n();
    if dim < 1 || dim > n.saturating_sub(1) {
        return Err(Error::Domain(format!(
            "embedding dimension must lie in 1..={}, got {dim}",
            n.saturating_sub(1)
        )));
    }

    let d2 = Mat::from_fn(n, n, |i, j| dm.d[(i, j)] * dm.d[(i, j)]);
    let row_mean: Vec<f64> = (0..n)
        .map(|i| d2.row(i).iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let b = Mat::from_fn(n, n, |i, j| {
        -0.5 * (d2[(i, j)] - row_mean[i] - row_mean[j] + grand)
    });

    let eigen = sym_eigen(&b)?;
    let eigenvalues = eigen.eigenvalues;
    let positive_total: f64 = eigenvalues.iter().filter(|&&l| l > 0.0).sum();
    if positive_total <= 0.0 {
        return Err(Error::Domain(
            "no positive spread: all pairwise distances are zero".into(),
        ));
    }
    let mut cumulative_proportion = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &l in &eigenvalues {
        if l > 0.0 {
            acc += l;
        }
        cumulative_proportion.push(acc / positive_total);
    }

    let coordinates = Mat::from_fn(n, dim, |i, m| {
        eigen.eigenvectors[(i, m)] * eigenvalues[m].max(0.0).sqrt()
    });

    let mut stress_by_dim = Vec::with_capacity(dim);
    for m in 1..=dim {
        let sub = Mat::from_fn(n, m, |i, c| coordinates[(i, c)]);
        stress_by_dim.push(stress(dm, &sub)?);
    }

    Ok(Embedding {
        labels: dm.labels.clone(),
        coordinates,
        eigenvalues,
        cumulative_proportion,
        stress_by_dim,
    })
}

/// Kruskal stress-1 of a configuration against target distances:
/// √(Σᵢ<ⱼ(dᵢⱼ−d̂ᵢⱼ)² / Σᵢ<ⱼdᵢⱼ²) with d̂ the embedded Euclidean distances.
pub fn stress(dm: &DistanceMatrix, coordinates: &Mat) -> Result<f64> {
    dm.validate()?;
    let n = dm.n();
    if coordinates.nrows() != n || coordinates.ncols() == 0 {
        return Err(Error::Shape(format!(
            "{} coordinate rows of width {} against {n} samples",
            coordinates.nrows(),
            coordinates.ncols()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let fitted = coordinates
                .row(i)
                .iter()
                .zip(coordinates.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let target = dm.d[(i, j)];
            num += (target - fitted) * (target - fitted);
            den += target * target;
        }
    }
    if den == 0.0 {
        return Err(Error::Domain(
            "stress undefined for an all-zero distance matrix".into(),
        ));
    }
    Ok((num / den).sqrt())
}

/// Correspondence analysis of a nonnegative table. Coordinates are
/// principal (mass-weighted, scaled by the singular values); the standard
/// row coordinates backing the asymmetric display are kept alongside.
#[derive(Debug, Clone, Serialize)]
pub struct CaResult {
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
    pub row_coords: Mat,
    pub col_coords: Mat,
    /// Rows rescaled to unit inertia per axis (principal / singular value);
    /// in this normalization each column point sits at the barycenter of the
    /// rows that load on it, which is the display used to read off
    /// row-to-column associations.
    pub row_standard_coords: Mat,
    pub principal_inertias: Vec<f64>,
    pub total_inertia: f64,
}

impl CaResult {
    /// Row and column coordinates as one CSV with a `set` discriminator.
    pub fn to_coords_csv(&self) -> String {
        let k = self.row_coords.ncols();
        let mut out = String::from("set,label");
        for m in 0..k {
            out.push_str(&format!(",dim{}", m + 1));
        }
        out.push('\n');
        for (i, l) in self.row_labels.iter().enumerate() {
            out.push_str(&format!("row,{l}"));
            for v in self.row_coords.row(i) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        for (j, l) in self.column_labels.iter().enumerate() {
            out.push_str(&format!("column,{l}"));
            for v in self.col_coords.row(j) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    /// For each row, the index of the nearest column point in the asymmetric
    /// display (standard row coordinates vs principal column coordinates),
    /// using the leading `dims` axes.
    pub fn nearest_columns(&self, dims: usize) -> Vec<usize> {
        let dims = dims.min(self.row_standard_coords.ncols()).max(1);
        let mut nearest = Vec::with_capacity(self.row_labels.len());
        for i in 0..self.row_labels.len() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for j in 0..self.column_labels.len() {
                let mut d = 0.0;
                for m in 0..dims {
                    let diff = self.row_standard_coords[(i, m)] - self.col_coords[(j, m)];
                    d += diff * diff;
                }
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            nearest.push(best);
        }
        nearest
    }
}

/// Canonical correspondence analysis of the frame's value table: SVD of the
/// standardized residuals of the independence model.
pub fn correspondence(frame: &KpiFrame) -> Result<CaResult> {
    let x = &frame.values;
    let (n, p) = (x.nrows(), x.ncols());
    for i in 0..n {
        for j in 0..p {
            if x[(i, j)] < 0.0 {
                return Err(Error::Domain("CA requires nonnegative values".into()));
            }
        }
    }
    let row_sums: Vec<f64> = (0..n).map(|i| x.row(i).iter().sum()).collect();
    let col_sums: Vec<f64> = (0..p).map(|j| (0..n).map(|i| x[(i, j)]).sum()).collect();
    for (i, &s) in row_sums.iter().enumerate() {
        if s <= 0.0 {
            return Err(Error::DegenerateMargin(frame.sample_labels[i].clone()));
        }
    }
    for (j, &s) in col_sums.iter().enumerate() {
        if s <= 0.0 {
            return Err(Error::DegenerateMargin(frame.variable_labels[j].clone()));
        }
    }
    let total: f64 = row_sums.iter().sum();
    let r: Vec<f64> = row_sums.iter().map(|s| s / total).collect();
    let c: Vec<f64> = col_sums.iter().map(|s| s / total).collect();

    let s = Mat::from_fn(n, p, |i, j| {
        (x[(i, j)] / total - r[i] * c[j]) / (r[i] * c[j]).sqrt()
    });
    let total_inertia = s.frobenius().powi(2);
    let svd_res = svd(&s)?;
    let k = svd_res.singular_values.len();

    let row_coords = Mat::from_fn(n, k, |i, m| {
        svd_res.u[(i, m)] * svd_res.singular_values[m] / r[i].sqrt()
    });
    let row_standard_coords = Mat::from_fn(n, k, |i, m| svd_res.u[(i, m)] / r[i].sqrt());
    let col_coords = Mat::from_fn(p, k, |j, m| {
        svd_res.v[(j, m)] * svd_res.singular_values[m] / c[j].sqrt()
    });
    let principal_inertias = svd_res.singular_values.iter().map(|s| s * s).collect();

    Ok(CaResult {
        row_labels: frame.sample_labels.clone(),
        column_labels: frame.variable_labels.clone(),
        row_coords,
        col_coords,
        row_standard_coords,
        principal_inertias,
        total_inertia,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{distance_matrix, Metric};
    use crate::frame::{builtin_dataset, load_csv, standardize, BuiltinDataset, StandardizeSpec};

    fn embedded_distance(e: &Embedding, i: usize, j: usize) -> f64 {
        e.coordinates
            .row(i)
            .iter()
            .zip(e.coordinates.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn dm_from_points(points: &[Vec<f64>]) -> DistanceMatrix {
        let n = points.len();
        DistanceMatrix {
            labels: (0..n).map(|i| format!("p{i}")).collect(),
            d: Mat::from_fn(n, n, |i, j| {
                points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            }),
        }
    }

    #[test]
    fn right_triangle_is_recovered_exactly() {
        let dm = dm_from_points(&[vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 4.0]]);
        let e = classical_mds(&dm, 2).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((embedded_distance(&e, i, j) - dm.d[(i, j)]).abs() < 1e-9);
        }
        assert!(e.eigenvalues[2].abs() < 1e-9, "flat configuration");
        assert!(e.stress_by_dim[1] < 1e-9);
    }

    #[test]
    fn equilateral_splits_evenly() {
        let one = |i: usize, j: usize| if i == j { 0.0 } else { 1.0 };
        let dm = DistanceMatrix {
            labels: vec!["a".into(), "b".into(), "c".into()],
            d: Mat::from_fn(3, 3, one),
        };
        let e = classical_mds(&dm, 2).unwrap();
        assert!((e.eigenvalues[0] - 0.5).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 0.5).abs() < 1e-12);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((embedded_distance(&e, i, j) - 1.0).abs() < 1e-9);
        }
        assert!((e.cumulative_proportion[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coordinates_are_centered_and_proportions_reach_one() {
        let f = builtin_dataset(BuiltinDataset::Table1Kpi);
        let z = standardize(&f, StandardizeSpec::default()).unwrap();
        let dm = distance_matrix(&z, Metric::Euclidean).unwrap();
        let e = classical_mds(&dm, 4).unwrap();
        for m in 0..4 {
            let mean: f64 = (0..20).map(|i| e.coordinates[(i, m)]).sum::<f64>() / 20.0;
            assert!(mean.abs() < 1e-9, "column {m} mean {mean}");
        }
        assert_eq!(e.eigenvalues.len(), 20);
        assert_eq!(e.cumulative_proportion.len(), 20);
        for w in e.cumulative_proportion.windows(2) {
            assert!(w[1] >= w[0] - 1e-15);
        }
        assert!((e.cumulative_proportion[19] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kpi_proportions_and_stress_curves_match_frozen_values() {
        let f = builtin_dataset(BuiltinDataset::Table1Kpi);
        let z = standardize(&f, StandardizeSpec::default()).unwrap();

        let dm = distance_matrix(&z, Metric::Euclidean).unwrap();
        let e = classical_mds(&dm, 3).unwrap();
        assert!((e.cumulative_proportion[1] - 0.794968).abs() < 1e-6);
        let want = [0.474991, 0.199130, 0.091420];
        for (got, want) in e.stress_by_dim.iter().zip(want) {
            assert!((got - want).abs() < 1e-6, "got {got}, want {want}");
        }

        let dm2 = distance_matrix(&z, Metric::SquaredEuclidean).unwrap();
        let e2 = classical_mds(&dm2, 3).unwrap();
        assert!((e2.cumulative_proportion[1] - 0.832752).abs() < 1e-6);
        let want2 = [0.548742, 0.345108, 0.253851];
        for (got, want) in e2.stress_by_dim.iter().zip(want2) {
            assert!((got - want).abs() < 1e-6, "got {got}, want {want}");
        }
        // the elbow at two dimensions, under both metrics
        for s in [&e.stress_by_dim, &e2.stress_by_dim] {
            assert!(s[0] - s[1] > s[1] - s[2]);
        }
    }

    #[test]
    fn dimension_bounds_and_degenerate_input() {
        let dm = dm_from_points(&[vec![0.0], vec![1.0], vec![3.0]]);
        assert!(matches!(classical_mds(&dm, 0), Err(Error::Domain(_))));
        assert!(matches!(classical_mds(&dm, 3), Err(Error::Domain(_))));
        let zero = DistanceMatrix {
            labels: vec!["a".into(), "b".into()],
            d: Mat::zeros(2, 2),
        };
        assert!(matches!(classical_mds(&zero, 1), Err(Error::Domain(_))));
        assert!(matches!(
            stress(&zero, &Mat::zeros(2, 1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn stress_extremes() {
        let dm = dm_from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]);
        let exact = Mat::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert!(stress(&dm, &exact).unwrap() < 1e-12);
        let collapsed = Mat::zeros(3, 2);
        assert_eq!(stress(&dm, &collapsed).unwrap(), 1.0);
        assert!(matches!(
            stress(&dm, &Mat::zeros(4, 2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn planted_configurations_are_recovered() {
        let mut state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0
        };
        for m in [2usize, 3] {
            for _rep in 0..10 {
                let points: Vec<Vec<f64>> = (0..8).map(|_| (0..m).map(|_| next()).collect()).collect();
                let dm = dm_from_points(&points);
                let e = classical_mds(&dm, m).unwrap();
                let max_d = dm.d.max_abs();
                for i in 0..8 {
                    for j in i + 1..8 {
                        let err = (embedded_distance(&e, i, j) - dm.d[(i, j)]).abs();
                        assert!(err <= 1e-8 * max_d, "m={m} err={err}");
                    }
                }
            }
        }
    }

    #[test]
    fn permuting_labels_permutes_the_embedding() {
        let points: Vec<Vec<f64>> = vec![
            vec![0.0, 0.0],
            vec![2.0, 1.0],
            vec![-1.0, 3.0],
            vec![4.0, -2.0],
            vec![1.5, 1.5],
        ];
        let dm = dm_from_points(&points);
        let perm = [2usize, 0, 4, 1, 3];
        let pdm = DistanceMatrix {
            labels: perm.iter().map(|&i| dm.labels[i].clone()).collect(),
            d: Mat::from_fn(5, 5, |i, j| dm.d[(perm[i], perm[j])]),
        };
        let e = classical_mds(&dm, 2).unwrap();
        let pe = classical_mds(&pdm, 2).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let a = embedded_distance(&e, perm[i], perm[j]);
                let b = embedded_distance(&pe, i, j);
                assert!((a - b).abs() < 1e-9);
            }
        }
        assert!((e.stress_by_dim[1] - pe.stress_by_dim[1]).abs() < 1e-12);
    }

    // --- correspondence analysis ---

    #[test]
    fn independence_table_has_no_inertia() {
        let f = load_csv("id,x,y\na,1,2\nb,2,4\n").unwrap();
        let ca = correspondence(&f).unwrap();
        assert!(ca.total_inertia < 1e-12);
        assert!(ca.row_coords.max_abs() < 1e-6);
        assert!(ca.col_coords.max_abs() < 1e-6);
    }

    #[test]
    fn diagonal_two_by_two_is_maximally_associated() {
        let f = load_csv("id,x,y\na,10,0\nb,0,10\n").unwrap();
        let ca = correspondence(&f).unwrap();
        assert!((ca.principal_inertias[0] - 1.0).abs() < 1e-12);
        assert!((ca.total_inertia - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_and_degenerate_tables() {
        let f = load_csv("id,x,y\na,1,-2\nb,2,4\n").unwrap();
        assert!(matches!(correspondence(&f), Err(Error::Domain(_))));
        let f = load_csv("id,x,y\na,0,0\nb,2,4\n").unwrap();
        match correspondence(&f) {
            Err(Error::DegenerateMargin(l)) => assert_eq!(l, "a"),
            other => panic!("expected degenerate row, got {other:?}"),
        }
        let f = load_csv("id,x,y\na,1,0\nb,2,0\n").unwrap();
        match correspondence(&f) {
            Err(Error::DegenerateMargin(l)) => assert_eq!(l, "y"),
            other => panic!("expected degenerate column, got {other:?}"),
        }
    }

    #[test]
    fn weighted_coordinate_means_vanish() {
        let f = builtin_dataset(BuiltinDataset::Table1Kpi);
        let ca = correspondence(&f).unwrap();
        let total: f64 = (0..20).map(|i| f.values.row(i).iter().sum::<f64>()).sum();
        for m in 0..ca.principal_inertias.len() {
            let mut row_mean = 0.0;
            for i in 0..20 {
                let mass = f.values.row(i).iter().sum::<f64>() / total;
                row_mean += mass * ca.row_coords[(i, m)];
            }
            assert!(row_mean.abs() < 1e-9, "axis {m}: {row_mean}");
            let mut col_mean = 0.0;
            for j in 0..5 {
                let mass: f64 = (0..20).map(|i| f.values[(i, j)]).sum::<f64>() / total;
                col_mean += mass * ca.col_coords[(j, m)];
            }
            assert!(col_mean.abs() < 1e-9, "axis {m}: {col_mean}");
        }
        let sum: f64 = ca.principal_inertias.iter().sum();
        assert!((sum - ca.total_inertia).abs() < 1e-10);
    }

    #[test]
    fn packet_loss_hours_sit_next_to_their_interfaces() {
        let f = builtin_dataset(BuiltinDataset::Table1Kpi);
        let ca = correspondence(&f).unwrap();
        let nearest = ca.nearest_columns(2);
        let col = |i: usize| ca.column_labels[nearest[i]].as_str();
        let row = |l: &str| f.sample_index(l).unwrap();
        assert_eq!(col(row("Hr 9")), "Gn interface Packet loss");
        assert_eq!(col(row("Hr 11")), "Gi interface Packet loss");
    }

    #[test]
    fn row_principal_coordinates_carry_chi_square_geometry() {
        // deterministic pseudo-random 5x4 nonnegative tables
        let mut state = 0xB7E151628AED2A6Bu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 9.0 + 0.5
        };
        for _case in 0..20 {
            let rows: Vec<Vec<f64>> = (0..5).map(|_| (0..4).map(|_| next()).collect()).collect();
            let mut csv = String::from("id,a,b,c,d\n");
            for (i, r) in rows.iter().enumerate() {
                csv.push_str(&format!("r{i},{},{},{},{}\n", r[0], r[1], r[2], r[3]));
            }
            let f = load_csv(&csv).unwrap();
            let ca = correspondence(&f).unwrap();

            let total: f64 = rows.iter().flatten().sum();
            let row_sum: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
            let col_sum: Vec<f64> =
                (0..4).map(|j| rows.iter().map(|r| r[j]).sum::<f64>()).collect();

            // chi-square distances between row profiles
            for i in 0..5 {
                for l in 0..5 {
                    let mut want = 0.0;
                    for j in 0..4 {
                        let pi = rows[i][j] / row_sum[i];
                        let pl = rows[l][j] / row_sum[l];
                        want += (pi - pl) * (pi - pl) / (col_sum[j] / total);
                    }
                    let got: f64 = (0..ca.row_coords.ncols())
                        .map(|m| {
                            let d = ca.row_coords[(i, m)] - ca.row_coords[(l, m)];
                            d * d
                        })
                        .sum();
                    assert!((got - want).abs() < 1e-9, "rows {i},{l}");
                }
            }

            // total inertia equals chi-square over the grand total
            let mut chi2 = 0.0;
            for i in 0..5 {
                for j in 0..4 {
                    let expected = row_sum[i] * col_sum[j] / total;
                    let diff = rows[i][j] - expected;
                    chi2 += diff * diff / expected;
                }
            }
            assert!((ca.total_inertia - chi2 / total).abs() < 1e-10);
        }
    }

    #[test]
    fn coordinate_csv_lists_rows_then_columns() {
        let f = load_csv("id,x,y\na,10,1\nb,1,10\n").unwrap();
        let ca = correspondence(&f).unwrap();
        let csv = ca.to_coords_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "set,label,dim1,dim2");
        assert!(lines[1].starts_with("row,a,"));
        assert!(lines[3].starts_with("column,x,"));
        assert_eq!(lines.len(), 5);
    }
}
