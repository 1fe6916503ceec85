//! The KPI dataset model: a labeled samples × variables matrix with units,
//! CSV ingestion/serialization, column standardization, and the two bundled
//! datasets.

use crate::builtin_tables as tables;
use crate::error::{Error, Result};
use crate::mat::Mat;
use serde::Serialize;

/// A labeled numeric matrix of KPI observations: rows are sample periods,
/// columns are indicators. Immutable after construction; every entry is
/// finite and labels are duplicate-free.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KpiFrame {
    /// Header text of the sample-label column (e.g. "Sample period").
    pub sample_column: String,
    pub sample_labels: Vec<String>,
    pub variable_labels: Vec<String>,
    /// Free-form unit per variable ("" when the source gives none).
    pub units: Vec<String>,
    pub values: Mat,
}

impl KpiFrame {
    /// Builds a frame, enforcing the type invariants.
    pub fn new(
        sample_column: impl Into<String>,
        sample_labels: Vec<String>,
        variable_labels: Vec<String>,
        units: Vec<String>,
        values: Mat,
    ) -> Result<KpiFrame> {
        if values.nrows() != sample_labels.len() {
            return Err(Error::Shape(format!(
                "{} sample labels for {} rows",
                sample_labels.len(),
                values.nrows()
            )));
        }
        if values.ncols() != variable_labels.len() || units.len() != variable_labels.len() {
            return Err(Error::Shape(format!(
                "{} variable labels / {} units for {} columns",
                variable_labels.len(),
                units.len(),
                values.ncols()
            )));
        }
        if sample_labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !values.all_finite() {
            return Err(Error::Numeric("frame contains NaN or infinite values".into()));
        }
        check_unique(&sample_labels)?;
        check_unique(&variable_labels)?;
        Ok(KpiFrame {
            sample_column: sample_column.into(),
            sample_labels,
            variable_labels,
            units,
            values,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_variables(&self) -> usize {
        self.values.ncols()
    }

    /// Column `j` copied out.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.col(j)
    }

    /// Index of the variable with this exact label.
    pub fn variable_index(&self, label: &str) -> Option<usize> {
        self.variable_labels.iter().position(|l| l == label)
    }

    /// Index of the sample with this exact label.
    pub fn sample_index(&self, label: &str) -> Option<usize> {
        self.sample_labels.iter().position(|l| l == label)
    }

    /// Serializes back to the CSV dialect accepted by [`load_csv`]. Floats
    /// are written in shortest round-trip form, so `load_csv(frame.to_csv())`
    /// reproduces the frame exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.sample_column);
        for (label, unit) in self.variable_labels.iter().zip(&self.units) {
            out.push(',');
            out.push_str(label);
            if !unit.is_empty() {
                out.push_str(" (");
                out.push_str(unit);
                out.push(')');
            }
        }
        out.push('\n');
        for (i, label) in self.sample_labels.iter().enumerate() {
            out.push_str(label);
            for v in self.values.row(i) {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

fn check_unique(labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Splits a header cell into label and optional trailing "(unit)" suffix.
fn split_unit(cell: &str) -> (String, String) {
    if cell.ends_with(')') {
        if let Some(pos) = cell.rfind(" (") {
            let label = &cell[..pos];
            let unit = &cell[pos + 2..cell.len() - 1];
            return (label.to_string(), unit.to_string());
        }
    }
    (cell.to_string(), String::new())
}

/// Parses the CSV dialect produced by KPI exports: comma separator, "."
/// decimal point, UTF-8, optional CRLF line endings, no quoting. The first
/// row is a header whose first cell names the sample-label column; remaining
/// header cells are variable labels with an optional " (unit)" suffix.
///
/// Row/column indices in errors are 1-based, counting the header as row 1.
pub fn load_csv(text: &str) -> Result<KpiFrame> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyDataset)?;
    let mut cells = header.split(',');
    let sample_column = cells.next().unwrap_or("").to_string();
    let mut variable_labels = Vec::new();
    let mut units = Vec::new();
    for cell in cells {
        let (label, unit) = split_unit(cell);
        variable_labels.push(label);
        units.push(unit);
    }
    let n_vars = variable_labels.len();

    let mut sample_labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        let row_no = idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n_vars + 1 {
            return Err(Error::Parse {
                row: row_no,
                col: None,
                msg: format!("expected {} cells, found {}", n_vars + 1, cells.len()),
            });
        }
        sample_labels.push(cells[0].to_string());
        let mut row = Vec::with_capacity(n_vars);
        for (j, cell) in cells[1..].iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row: row_no,
                col: Some(j + 2),
                msg: format!("not a number: {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: row_no,
                    col: Some(j + 2),
                    msg: format!("non-finite value: {cell:?}"),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let values = Mat::from_rows(&rows);
    KpiFrame::new(sample_column, sample_labels, variable_labels, units, values)
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

/// Column scaling applied before distance computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardizeMode {
    None,
    /// Center to mean 0, scale to sample standard deviation 1 (divisor n−1).
    Zscore,
    /// Affine map of each column onto [0, 1].
    UnitRange,
}

/// What to do with a column that has no variation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroVariancePolicy {
    /// Fail: a constant KPI usually means a broken probe.
    Error,
    /// Silently drop the column (label and unit included).
    DropColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StandardizeSpec {
    pub mode: StandardizeMode,
    pub zero_variance_policy: ZeroVariancePolicy,
}

impl Default for StandardizeSpec {
    /// Z-scoring with hard errors on constant columns: the bundled KPI
    /// columns span nine orders of magnitude, so raw-scale distances are
    /// dominated by the largest unit.
    fn default() -> Self {
        StandardizeSpec {
            mode: StandardizeMode::Zscore,
            zero_variance_policy: ZeroVariancePolicy::Error,
        }
    }
}

impl std::fmt::Display for StandardizeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StandardizeMode::None => "none",
            StandardizeMode::Zscore => "zscore",
            StandardizeMode::UnitRange => "unit_range",
        })
    }
}

impl std::str::FromStr for StandardizeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<StandardizeMode> {
        match s {
            "none" => Ok(StandardizeMode::None),
            "zscore" => Ok(StandardizeMode::Zscore),
            "unit_range" | "unit-range" => Ok(StandardizeMode::UnitRange),
            other => Err(Error::Domain(format!(
                "unknown standardize mode {other:?} (expected none, zscore or unit_range)"
            ))),
        }
    }
}

/// Applies the requested column scaling, returning a new frame. Transformed
/// columns are dimensionless, so their units are cleared.
pub fn standardize(frame: &KpiFrame, spec: StandardizeSpec) -> Result<KpiFrame> {
    if frame.n_samples() == 0 {
        return Err(Error::EmptyDataset);
    }
    if spec.mode == StandardizeMode::None {
        return Ok(frame.clone());
    }
    let n = frame.n_samples();
    if spec.mode == StandardizeMode::Zscore && n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }

    let mut keep_cols = Vec::new();
    let mut transformed: Vec<Vec<f64>> = Vec::new();
    for j in 0..frame.n_variables() {
        let col = frame.column(j);
        let scaled = match spec.mode {
            StandardizeMode::None => unreachable!(),
            StandardizeMode::Zscore => {
                let mean = col.iter().sum::<f64>() / n as f64;
                let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
                let sd = var.sqrt();
                if sd == 0.0 {
                    None
                } else {
                    Some(col.iter().map(|x| (x - mean) / sd).collect())
                }
            }
            StandardizeMode::UnitRange => {
                let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if max == min {
                    None
                } else {
                    Some(col.iter().map(|x| (x - min) / (max - min)).collect())
                }
            }
        };
        match scaled {
            Some(vals) => {
                keep_cols.push(j);
                transformed.push(vals);
            }
            None => match spec.zero_variance_policy {
                ZeroVariancePolicy::Error => {
                    return Err(Error::ZeroVariance(frame.variable_labels[j].clone()));
                }
                ZeroVariancePolicy::DropColumn => {}
            },
        }
    }

    let values = Mat::from_fn(n, keep_cols.len(), |i, j| transformed[j][i]);
    KpiFrame::new(
        frame.sample_column.clone(),
        frame.sample_labels.clone(),
        keep_cols.iter().map(|&j| frame.variable_labels[j].clone()).collect(),
        vec![String::new(); keep_cols.len()],
        values,
    )
}

// ---------------------------------------------------------------------------
// Bundled datasets
// ---------------------------------------------------------------------------

/// The two datasets shipped with the library (mirrored by fixture files in
/// the repository's data/ directory).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinDataset {
    /// 20 hourly samples × 5 network KPIs (utilization, packet loss, latency,
    /// throughput) from a UMTS packet-switched trial network.
    Table1Kpi,
    /// 20 samples × 8 per-service traffic/QoS indicators from the same trial.
    Table2Services,
}

impl BuiltinDataset {
    pub const ALL: [BuiltinDataset; 2] = [BuiltinDataset::Table1Kpi, BuiltinDataset::Table2Services];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinDataset::Table1Kpi => "table1_kpi",
            BuiltinDataset::Table2Services => "table2_services",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            BuiltinDataset::Table1Kpi => {
                "20 hourly samples x 5 KPIs: GGSN utilization, Gn/Gi interface packet loss, \
                 latency, Gi throughput"
            }
            BuiltinDataset::Table2Services => {
                "20 samples x 8 indicators: latency, throughput, packet losses, web, voice, \
                 FTP, e-mail, video"
            }
        }
    }

    /// Caveats inherited from the source tables.
    pub fn notes(self) -> &'static [&'static str] {
        match self {
            BuiltinDataset::Table1Kpi => &[],
            BuiltinDataset::Table2Services => &[
                "the Voice column is labeled Audio in some derived outputs; both names refer to this variable",
                "the E-mail column ships without a unit in the source; Mbps is recorded by analogy with the other service columns",
            ],
        }
    }
}

impl std::str::FromStr for BuiltinDataset {
    type Err = Error;
    fn from_str(s: &str) -> Result<BuiltinDataset> {
        match s {
            "table1_kpi" => Ok(BuiltinDataset::Table1Kpi),
            "table2_services" => Ok(BuiltinDataset::Table2Services),
            other => Err(Error::Domain(format!(
                "unknown builtin dataset {other:?} (available: table1_kpi, table2_services)"
            ))),
        }
    }
}

/// Returns one of the embedded datasets.
pub fn builtin_dataset(name: BuiltinDataset) -> KpiFrame {
    let frame = match name {
        BuiltinDataset::Table1Kpi => KpiFrame::new(
            tables::TABLE1_SAMPLE_COLUMN,
            tables::TABLE1_SAMPLES.iter().map(|s| s.to_string()).collect(),
            tables::TABLE1_VARIABLES.iter().map(|s| s.to_string()).collect(),
            tables::TABLE1_UNITS.iter().map(|s| s.to_string()).collect(),
            Mat::from_fn(20, 5, |i, j| tables::TABLE1_VALUES[i][j]),
        ),
        BuiltinDataset::Table2Services => KpiFrame::new(
            tables::TABLE2_SAMPLE_COLUMN,
            tables::TABLE2_SAMPLES.iter().map(|s| s.to_string()).collect(),
            tables::TABLE2_VARIABLES.iter().map(|s| s.to_string()).collect(),
            tables::TABLE2_UNITS.iter().map(|s| s.to_string()).collect(),
            Mat::from_fn(20, 8, |i, j| tables::TABLE2_VALUES[i][j]),
        ),
    };
    frame.expect("embedded datasets satisfy the frame invariants")
}
