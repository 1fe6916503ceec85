//! End-to-end analysis pipeline: load → standardize → correlate → cluster →
//! embed → correspondence → factor model, collected into a single [`Report`]
//! plus JSON/CSV/SVG artifacts on disk.
//!
//! A stage whose statistical preconditions fail (too few samples for
//! correlation, a negative cell for correspondence analysis, more factors
//! than variables, …) is *skipped* with a narrative note and its report
//! section left out; the remaining stages still run. I/O and internal
//! numerical failures abort the run with [`Error::Stage`] naming the stage,
//! and no output files are left behind.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cluster::{agglomerate, Dendrogram, Linkage};
use crate::correlation::{correlation_matrix, CorrelationResult};
use crate::distance::{distance_matrix, DistanceMatrix, Metric};
use crate::error::{Error, Result};
use crate::factor::{fa_ml, FactorModel};
use crate::frame::{builtin_dataset, load_csv, standardize, BuiltinDataset, StandardizeSpec};
use crate::ordination::{classical_mds, correspondence, CaResult, Embedding};
use crate::svg::{render_dendrogram, render_scatter, ScatterPoint};

/// Where the input table comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    /// One of the bundled datasets.
    Builtin(BuiltinDataset),
    /// A CSV file on disk (header row, label column first).
    Path(PathBuf),
}

impl std::fmt::Display for DatasetSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DatasetSource::Builtin(b) => f.write_str(b.name()),
            DatasetSource::Path(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Output formats the pipeline can write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "svg" => Ok(ReportFormat::Svg),
            other => Err(Error::Domain(format!(
                "unknown format {other:?} (expected json, csv or svg)"
            ))),
        }
    }
}

/// Full configuration of one pipeline run. Serialized verbatim into the
/// report so every figure is reproducible from the report alone.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub dataset: DatasetSource,
    pub standardize: StandardizeSpec,
    pub metric: Metric,
    pub linkage: Linkage,
    /// Requested partition size; clamped to the sample count with a note.
    pub k_clusters: usize,
    /// Requested embedding dimension; clamped to n − 1 with a note.
    pub mds_dim: usize,
    pub fa_factors: usize,
    /// Directory the artifacts are written into (created if missing).
    pub outputs: PathBuf,
    pub formats: Vec<ReportFormat>,
}

impl Default for PipelineConfig {
    /// The configuration behind the bundled KPI case study: z-scored
    /// columns, squared Euclidean distances, complete linkage, five
    /// clusters, a planar embedding and a two-factor model.
    fn default() -> Self {
        PipelineConfig {
            dataset: DatasetSource::Builtin(BuiltinDataset::Table1Kpi),
            standardize: StandardizeSpec::default(),
            metric: Metric::SquaredEuclidean,
            linkage: Linkage::Complete,
            k_clusters: 5,
            mds_dim: 2,
            fa_factors: 2,
            outputs: PathBuf::from("kpistats-out"),
            formats: vec![ReportFormat::Json, ReportFormat::Csv, ReportFormat::Svg],
        }
    }
}

/// Flat cluster assignment in three redundant views: per-sample ids,
/// member lists per cluster, and the tree they were cut from.
#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    pub labels: Vec<String>,
    /// Cluster id per sample, numbered by first appearance in `labels`.
    pub cluster_ids: Vec<usize>,
    pub groups: Vec<Vec<String>>,
    /// The k actually used after clamping to the sample count.
    pub k: usize,
}

/// Everything one pipeline run produced. A section is `None` exactly when
/// its stage was skipped (see the narrative for the reason).
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: PipelineConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<CorrelationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Partition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dendrogram: Option<Dendrogram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Embedding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ca: Option<CaResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<FactorModel>,
    /// Human-readable findings, one sentence per line, deterministic order.
    pub narrative: Vec<String>,
}

/// The files a run with this report's config and sections writes, in
/// writing order.
pub fn output_files(report: &Report) -> Vec<PathBuf> {
    let dir = &report.config.outputs;
    let mut files = Vec::new();
    let has = |f: ReportFormat| report.config.formats.contains(&f);
    if has(ReportFormat::Json) {
        files.push(dir.join("report.json"));
    }
    if has(ReportFormat::Csv) {
        if report.correlation.is_some() {
            files.push(dir.join("correlation.csv"));
            files.push(dir.join("pvalues.csv"));
        }
        if report.dendrogram.is_some() {
            files.push(dir.join("distances.csv"));
            files.push(dir.join("partition.csv"));
            files.push(dir.join("dendrogram.newick"));
        }
        if report.embedding.is_some() {
            files.push(dir.join("mds_coords.csv"));
        }
        if report.ca.is_some() {
            files.push(dir.join("ca_coords.csv"));
        }
    }
    if has(ReportFormat::Svg) {
        if report.dendrogram.is_some() {
            files.push(dir.join("dendrogram.svg"));
        }
        if report.embedding.is_some() {
            files.push(dir.join("mds.svg"));
        }
        if report.ca.is_some() {
            files.push(dir.join("ca.svg"));
        }
    }
    files
}

fn fatal(stage: &'static str, e: Error) -> Error {
    Error::Stage {
        stage,
        source: Box::new(e),
    }
}

/// Statistical preconditions the dataset simply does not meet: skip the
/// stage. Anything else (I/O, shape bugs, non-convergence) aborts the run.
fn skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::TooFewSamples { .. }
            | Error::Domain(_)
            | Error::DegenerateMargin(_)
            | Error::ZeroVariance(_)
    )
}

fn try_stage<T>(
    stage: &'static str,
    notes: &mut Vec<String>,
    extra_skip: fn(&Error) -> bool,
    r: Result<T>,
) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if skippable(&e) || extra_skip(&e) => {
            notes.push(format!("{stage} skipped: {e}."));
            Ok(None)
        }
        Err(e) => Err(fatal(stage, e)),
    }
}

fn labeled_square_csv(header: &str, labels: &[String], m: &crate::mat::Mat) -> String {
    let mut out = String::from(header);
    for l in labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for (i, l) in labels.iter().enumerate() {
        out.push_str(l);
        for v in m.row(i) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

fn scatter_points(labels: &[String], coords: &crate::mat::Mat) -> Vec<ScatterPoint> {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| ScatterPoint {
            label: l.clone(),
            x: coords[(i, 0)],
            y: if coords.ncols() > 1 { coords[(i, 1)] } else { 0.0 },
        })
        .collect()
}

/// Runs every stage on the configured dataset, assembles the narrative and
/// writes the requested artifacts. Output files appear only if the whole
/// run succeeds; on a write failure, files already written are removed.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Report> {
    if config.k_clusters == 0 || config.mds_dim == 0 || config.fa_factors == 0 {
        return Err(fatal(
            "config",
            Error::Domain("k_clusters, mds_dim and fa_factors must be at least 1".into()),
        ));
    }

    let raw = match &config.dataset {
        DatasetSource::Builtin(b) => builtin_dataset(*b),
        DatasetSource::Path(p) => std::fs::read_to_string(p)
            .map_err(|e| fatal("load", e.into()))
            .and_then(|text| load_csv(&text).map_err(|e| fatal("load", e)))?,
    };
    let analyzed =
        standardize(&raw, config.standardize).map_err(|e| fatal("standardize", e))?;
    let n = analyzed.n_samples();

    let mut notes = vec![format!(
        "Configuration: dataset={}, standardize={}, metric={}, linkage={}, k={}, dim={}, factors={}.",
        config.dataset,
        config.standardize.mode,
        config.metric,
        config.linkage,
        config.k_clusters,
        config.mds_dim,
        config.fa_factors
    )];

    let k = config.k_clusters.min(n);
    if k < config.k_clusters {
        notes.push(format!(
            "k_clusters reduced from {} to {k}: the dataset has only {n} samples.",
            config.k_clusters
        ));
    }
    let dim = config.mds_dim.min(n.saturating_sub(1)).max(1);
    if dim < config.mds_dim {
        notes.push(format!(
            "mds_dim reduced from {} to {dim}: {n} samples span at most {} axes.",
            config.mds_dim,
            n.saturating_sub(1)
        ));
    }

    let never = |_: &Error| false;
    let correlation = try_stage(
        "correlation",
        &mut notes,
        never,
        correlation_matrix(&analyzed),
    )?;

    let distances = try_stage(
        "distance",
        &mut notes,
        never,
        distance_matrix(&analyzed, config.metric),
    )?;

    let mut partition = None;
    let mut dendrogram = None;
    let mut embedding = None;
    if let Some(dm) = &distances {
        let tree = agglomerate(dm, config.linkage).map_err(|e| fatal("clustering", e))?;
        let cluster_ids = tree.cut(k).map_err(|e| fatal("clustering", e))?;
        partition = Some(Partition {
            labels: tree.leaf_labels.clone(),
            cluster_ids,
            groups: tree.cut_groups(k).map_err(|e| fatal("clustering", e))?,
            k,
        });
        dendrogram = Some(tree);
        embedding = try_stage("mds", &mut notes, never, classical_mds(dm, dim))?;
    } else {
        notes.push("clustering skipped: no distance matrix.".into());
        notes.push("mds skipped: no distance matrix.".into());
    }

    let ca = try_stage("ca", &mut notes, never, correspondence(&raw))?;

    let factors = match &correlation {
        Some(corr) => try_stage(
            "fa",
            &mut notes,
            |e| matches!(e, Error::Numeric(_)),
            fa_ml(&corr.r, config.fa_factors, corr.n_samples)
                .and_then(|m| m.with_labels(&corr.variable_labels)),
        )?,
        None => {
            notes.push("fa skipped: factor analysis needs the correlation matrix.".into());
            None
        }
    };

    narrate(
        &mut notes,
        &correlation,
        &partition,
        &embedding,
        &ca,
        &factors,
        distances.as_ref(),
        dim,
    );

    let report = Report {
        config: config.clone(),
        correlation,
        partition,
        dendrogram,
        embedding,
        ca,
        factors,
        narrative: notes,
    };
    write_outputs(&report, distances.as_ref())?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn narrate(
    notes: &mut Vec<String>,
    correlation: &Option<CorrelationResult>,
    partition: &Option<Partition>,
    embedding: &Option<Embedding>,
    ca: &Option<CaResult>,
    factors: &Option<FactorModel>,
    distances: Option<&DistanceMatrix>,
    dim: usize,
) {
    if let Some(corr) = correlation {
        let p = corr.variable_labels.len();
        for i in 0..p {
            for j in i + 1..p {
                let r = corr.r[(i, j)];
                if r > 0.6 {
                    notes.push(format!(
                        "{} and {} are closely correlated (r = {:.2}).",
                        corr.variable_labels[i], corr.variable_labels[j], r
                    ));
                }
            }
        }
    }
    if let Some(part) = partition {
        for (idx, group) in part.groups.iter().enumerate() {
            notes.push(format!("Cluster {}: {}.", idx + 1, group.join(", ")));
        }
    }
    if let Some(emb) = embedding {
        if emb.cumulative_proportion.len() >= 2 {
            notes.push(format!(
                "The first two MDS axes carry {:.2}% of the positive spread.",
                100.0 * emb.cumulative_proportion[1]
            ));
        }
        // stress over 1–3 axes, extending the solution if the run was planar
        let curve = if emb.stress_by_dim.len() >= 3 {
            Some(emb.stress_by_dim[..3].to_vec())
        } else {
            distances.and_then(|dm| {
                if dm.n() >= 4 && dim < 3 {
                    classical_mds(dm, 3).ok().map(|e| e.stress_by_dim)
                } else {
                    None
                }
            })
        };
        match curve {
            Some(s) if s[0] - s[1] > s[1] - s[2] => notes.push(format!(
                "Stress falls {:.3}, {:.3}, {:.3} over one to three axes; the elbow at two supports a planar view.",
                s[0], s[1], s[2]
            )),
            Some(s) => notes.push(format!(
                "Stress over one to three axes: {:.3}, {:.3}, {:.3} (no clear elbow at two).",
                s[0], s[1], s[2]
            )),
            None => notes.push(format!(
                "Stress by dimension: {}.",
                emb.stress_by_dim
                    .iter()
                    .map(|s| format!("{s:.3}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            )),
        }
    }
    if let Some(ca) = ca {
        for (i, &j) in ca.nearest_columns(2).iter().enumerate() {
            notes.push(format!(
                "{} is dominantly associated with {}.",
                ca.row_labels[i], ca.column_labels[j]
            ));
        }
    }
    if let Some(fm) = factors {
        let tail = if fm.converged {
            format!("converged in {} iterations", fm.iterations)
        } else {
            format!("did not converge within {} iterations", fm.iterations)
        };
        let ll = fm
            .log_likelihood
            .map(|v| format!("; log-likelihood {v:.4}"))
            .unwrap_or_default();
        notes.push(format!(
            "Maximum-likelihood factor model with {} factors {tail}{ll}.",
            fm.n_factors
        ));
        if fm.heywood {
            notes.push(
                "Some uniquenesses sit at the floor: near-deterministic KPIs absorb a full factor."
                    .into(),
            );
        }
        if fm.dof_warning {
            notes.push(format!(
                "{} factors on {} variables leave no testable degrees of freedom.",
                fm.n_factors,
                fm.uniquenesses.len()
            ));
        }
    }
}

fn write_outputs(report: &Report, distances: Option<&DistanceMatrix>) -> Result<()> {
    let files = output_files(report);
    if files.is_empty() {
        return Ok(());
    }
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> Result<()> {
        std::fs::create_dir_all(&report.config.outputs)?;
        for path in &files {
            let content = render_file(path, report, distances)?;
            std::fs::write(path, content)?;
            written.push(path.clone());
        }
        Ok(())
    })();
    if let Err(e) = result {
        for p in &written {
            let _ = std::fs::remove_file(p);
        }
        return Err(fatal("write", e));
    }
    Ok(())
}

fn render_file(path: &Path, report: &Report, distances: Option<&DistanceMatrix>) -> Result<Vec<u8>> {
    let name = path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    let text = match name {
        "report.json" => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| Error::Numeric(format!("report serialization: {e}")))?;
            s.push('\n');
            s
        }
        "correlation.csv" => {
            let c = report.correlation.as_ref().unwrap();
            labeled_square_csv("variable", &c.variable_labels, &c.r)
        }
        "pvalues.csv" => {
            let c = report.correlation.as_ref().unwrap();
            labeled_square_csv("variable", &c.variable_labels, &c.p)
        }
        "distances.csv" => distances.unwrap().to_csv(),
        "partition.csv" => {
            let part = report.partition.as_ref().unwrap();
            let mut out = String::from("label,cluster\n");
            for (l, c) in part.labels.iter().zip(&part.cluster_ids) {
                out.push_str(&format!("{l},{}\n", c + 1));
            }
            out
        }
        "dendrogram.newick" => {
            let mut s = report.dendrogram.as_ref().unwrap().to_newick();
            s.push('\n');
            s
        }
        "mds_coords.csv" => report.embedding.as_ref().unwrap().to_coords_csv(),
        "ca_coords.csv" => report.ca.as_ref().unwrap().to_coords_csv(),
        "dendrogram.svg" => render_dendrogram(report.dendrogram.as_ref().unwrap()),
        "mds.svg" => {
            let emb = report.embedding.as_ref().unwrap();
            render_scatter(&scatter_points(&emb.labels, &emb.coordinates), &[])?
        }
        "ca.svg" => {
            // asymmetric display: standard row profiles, principal columns
            let ca = report.ca.as_ref().unwrap();
            render_scatter(
                &scatter_points(&ca.row_labels, &ca.row_standard_coords),
                &scatter_points(&ca.column_labels, &ca.col_coords),
            )?
        }
        other => return Err(Error::Domain(format!("unknown artifact {other:?}"))),
    };
    Ok(text.into_bytes())
}
