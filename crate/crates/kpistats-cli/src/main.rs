//! Command-line front end: one subcommand per analysis stage plus a
//! `pipeline` command that chains them into a full report.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/shape error, 3 numeric
//! failure (singular matrix, no convergence).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use kpistats::{
    agglomerate, builtin_dataset, classical_mds, correlation_matrix, correspondence,
    distance_matrix, fa_ml, load_csv, output_files, render_dendrogram, render_scatter,
    run_pipeline, standardize, BuiltinDataset, DatasetSource, Error, KpiFrame, Linkage, Metric,
    PipelineConfig, ReportFormat, Result, ScatterPoint, StandardizeMode, StandardizeSpec,
};

#[derive(Parser)]
#[command(
    name = "kpistats",
    version,
    about = "Multivariate analysis of network KPI tables",
    long_about = "Correlation with significance tests, hierarchical clustering, classical MDS, \
                  correspondence analysis and maximum-likelihood factor analysis over small \
                  labeled sample-by-indicator tables."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Input table: exactly one of --input / --builtin.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// CSV file: header row, sample label in the first column
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Bundled dataset (see `kpistats datasets`)
    #[arg(long, value_name = "NAME")]
    builtin: Option<BuiltinDataset>,
}

impl InputArgs {
    fn frame(&self) -> Result<KpiFrame> {
        match (&self.input, self.builtin) {
            (Some(path), None) => load_csv(&std::fs::read_to_string(path)?),
            (None, Some(name)) => Ok(builtin_dataset(name)),
            _ => unreachable!("clap enforces exactly one source"),
        }
    }

    fn source(&self) -> DatasetSource {
        match (&self.input, self.builtin) {
            (Some(path), None) => DatasetSource::Path(path.clone()),
            (None, Some(name)) => DatasetSource::Builtin(name),
            _ => unreachable!("clap enforces exactly one source"),
        }
    }
}

#[derive(Args)]
struct MetricArgs {
    /// euclidean | squared_euclidean | city_block | chebychev | power
    #[arg(long, default_value = "squared_euclidean")]
    metric: Metric,
    /// Exponent p of the power metric (default 2)
    #[arg(long, value_name = "P")]
    power_p: Option<f64>,
    /// Root r of the power metric (default 2)
    #[arg(long, value_name = "R")]
    power_r: Option<f64>,
}

impl MetricArgs {
    fn metric(&self) -> Result<Metric> {
        let metric = match (self.metric, self.power_p, self.power_r) {
            (Metric::Power { p, r }, pp, rr) => Metric::Power {
                p: pp.unwrap_or(p),
                r: rr.unwrap_or(r),
            },
            (m, None, None) => m,
            _ => {
                return Err(Error::Domain(
                    "--power-p/--power-r apply only to --metric power".into(),
                ))
            }
        };
        metric.validate()?;
        Ok(metric)
    }
}

/// Optional artifact directory for the single-stage subcommands.
#[derive(Args)]
struct OutArgs {
    /// Directory to write artifact files into (stdout only when omitted)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Comma-separated subset of json,csv,svg
    #[arg(long, value_delimiter = ',', default_value = "json,csv,svg")]
    format: Vec<ReportFormat>,
}

impl OutArgs {
    fn wants(&self, f: ReportFormat) -> bool {
        self.out.is_some() && self.format.contains(&f)
    }

    /// Writes the non-empty artifacts and reports each path on stdout.
    fn write(&self, files: &[(&str, String)]) -> Result<()> {
        let Some(dir) = &self.out else { return Ok(()) };
        std::fs::create_dir_all(dir)?;
        for (name, content) in files {
            let path = dir.join(name);
            std::fs::write(&path, content)?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn json_of<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numeric(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[derive(Subcommand)]
enum Command {
    /// Pearson correlation matrix with two-sided significance tests
    Correlate {
        #[command(flatten)]
        input: InputArgs,
        /// none | zscore | unit_range (correlation is scale-invariant)
        #[arg(long, default_value = "none")]
        standardize: StandardizeMode,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Agglomerative hierarchical clustering of the samples
    Cluster {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "zscore")]
        standardize: StandardizeMode,
        #[command(flatten)]
        metric: MetricArgs,
        /// complete | single | average
        #[arg(long, default_value = "complete")]
        linkage: Linkage,
        /// Number of flat clusters to cut the tree into
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Classical (metric) multidimensional scaling of the samples
    Mds {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "zscore")]
        standardize: StandardizeMode,
        #[command(flatten)]
        metric: MetricArgs,
        /// Embedding dimension
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Correspondence analysis of the raw nonnegative table
    Ca {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Maximum-likelihood factor analysis of the correlation matrix
    Fa {
        #[command(flatten)]
        input: InputArgs,
        /// Number of common factors
        #[arg(long, default_value_t = 2)]
        factors: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run every stage and write a full report with figures
    Pipeline {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "zscore")]
        standardize: StandardizeMode,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, default_value = "complete")]
        linkage: Linkage,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        factors: usize,
        /// Directory the report and figures are written into
        #[arg(long, value_name = "DIR", default_value = "kpistats-out")]
        out: PathBuf,
        /// Comma-separated subset of json,csv,svg
        #[arg(long, value_delimiter = ',', default_value = "json,csv,svg")]
        format: Vec<ReportFormat>,
    },
    /// List the bundled datasets
    Datasets,
}

fn spec_of(mode: StandardizeMode) -> StandardizeSpec {
    StandardizeSpec {
        mode,
        ..StandardizeSpec::default()
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Correlate {
            input,
            standardize: mode,
            out,
        } => {
            let frame = standardize(&input.frame()?, spec_of(mode))?;
            let corr = correlation_matrix(&frame)?;
            print!("{}", corr.to_table());
            println!("n = {} samples", corr.n_samples);
            let mut files: Vec<(&str, String)> = Vec::new();
            if out.wants(ReportFormat::Json) {
                files.push(("correlation.json", json_of(&corr)?));
            }
            if out.wants(ReportFormat::Csv) {
                files.push(("correlation.csv", labeled_square(&corr.variable_labels, &corr.r)));
                files.push(("pvalues.csv", labeled_square(&corr.variable_labels, &corr.p)));
            }
            out.write(&files)
        }
        Command::Cluster {
            input,
            standardize: mode,
            metric,
            linkage,
            k,
            out,
        } => {
            let frame = standardize(&input.frame()?, spec_of(mode))?;
            let dm = distance_matrix(&frame, metric.metric()?)?;
            let tree = agglomerate(&dm, linkage)?;
            let k = k.min(tree.n_leaves());
            for (i, group) in tree.cut_groups(k)?.iter().enumerate() {
                println!("Cluster {}: {}", i + 1, group.join(", "));
            }
            let mut files: Vec<(&str, String)> = Vec::new();
            if out.wants(ReportFormat::Json) {
                files.push(("dendrogram.json", json_of(&tree)?));
            }
            if out.wants(ReportFormat::Csv) {
                let ids = tree.cut(k)?;
                let mut csv = String::from("label,cluster\n");
                for (l, c) in tree.leaf_labels.iter().zip(&ids) {
                    csv.push_str(&format!("{l},{}\n", c + 1));
                }
                files.push(("partition.csv", csv));
                files.push(("distances.csv", dm.to_csv()));
                files.push(("dendrogram.newick", tree.to_newick() + "\n"));
            }
            if out.wants(ReportFormat::Svg) {
                files.push(("dendrogram.svg", render_dendrogram(&tree)));
            }
            out.write(&files)
        }
        Command::Mds {
            input,
            standardize: mode,
            metric,
            dim,
            out,
        } => {
            let frame = standardize(&input.frame()?, spec_of(mode))?;
            let dm = distance_matrix(&frame, metric.metric()?)?;
            let emb = classical_mds(&dm, dim)?;
            print!("{}", emb.to_coords_csv());
            println!(
                "cumulative proportion at dim {dim}: {:.4}",
                emb.cumulative_proportion[dim - 1]
            );
            println!(
                "stress by dimension: {}",
                emb.stress_by_dim
                    .iter()
                    .map(|s| format!("{s:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            let mut files: Vec<(&str, String)> = Vec::new();
            if out.wants(ReportFormat::Json) {
                files.push(("mds.json", json_of(&emb)?));
            }
            if out.wants(ReportFormat::Csv) {
                files.push(("mds_coords.csv", emb.to_coords_csv()));
            }
            if out.wants(ReportFormat::Svg) {
                files.push(("mds.svg", render_scatter(&points_of(&emb.labels, &emb.coordinates), &[])?));
            }
            out.write(&files)
        }
        Command::Ca { input, out } => {
            let ca = correspondence(&input.frame()?)?;
            println!("total inertia: {:.6}", ca.total_inertia);
            println!(
                "principal inertias: {}",
                ca.principal_inertias
                    .iter()
                    .map(|v| format!("{v:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            for (i, &j) in ca.nearest_columns(2).iter().enumerate() {
                println!(
                    "{} is dominantly associated with {}",
                    ca.row_labels[i], ca.column_labels[j]
                );
            }
            let mut files: Vec<(&str, String)> = Vec::new();
            if out.wants(ReportFormat::Json) {
                files.push(("ca.json", json_of(&ca)?));
            }
            if out.wants(ReportFormat::Csv) {
                files.push(("ca_coords.csv", ca.to_coords_csv()));
            }
            if out.wants(ReportFormat::Svg) {
                files.push((
                    "ca.svg",
                    render_scatter(
                        &points_of(&ca.row_labels, &ca.row_standard_coords),
                        &points_of(&ca.column_labels, &ca.col_coords),
                    )?,
                ));
            }
            out.write(&files)
        }
        Command::Fa {
            input,
            factors,
            out,
        } => {
            let frame = input.frame()?;
            let corr = correlation_matrix(&frame)?;
            let model = fa_ml(&corr.r, factors, corr.n_samples)?
                .with_labels(&corr.variable_labels)?;
            let width = model
                .variable_labels
                .iter()
                .map(|l| l.len())
                .max()
                .unwrap_or(8);
            for (i, label) in model.variable_labels.iter().enumerate() {
                let row = model
                    .loadings
                    .row(i)
                    .iter()
                    .map(|v| format!("{v:>9.4}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                println!(
                    "{label:<width$} {row}  uniqueness {:.4}",
                    model.uniquenesses[i]
                );
            }
            println!(
                "{} in {} iterations; log-likelihood {:.4}{}{}",
                if model.converged { "converged" } else { "did not converge" },
                model.iterations,
                model.log_likelihood.unwrap_or(f64::NAN),
                if model.heywood { "; heywood case" } else { "" },
                if model.dof_warning { "; more parameters than the matrix supports" } else { "" },
            );
            let mut files: Vec<(&str, String)> = Vec::new();
            if out.wants(ReportFormat::Json) {
                files.push(("fa.json", json_of(&model)?));
            }
            if out.wants(ReportFormat::Csv) {
                let mut csv = String::from("variable");
                for f in 0..model.n_factors {
                    csv.push_str(&format!(",factor{}", f + 1));
                }
                csv.push_str(",uniqueness\n");
                for (i, label) in model.variable_labels.iter().enumerate() {
                    csv.push_str(label);
                    for v in model.loadings.row(i) {
                        csv.push_str(&format!(",{v}"));
                    }
                    csv.push_str(&format!(",{}\n", model.uniquenesses[i]));
                }
                files.push(("loadings.csv", csv));
            }
            out.write(&files)
        }
        Command::Pipeline {
            input,
            standardize: mode,
            metric,
            linkage,
            k,
            dim,
            factors,
            out,
            format,
        } => {
            let config = PipelineConfig {
                dataset: input.source(),
                standardize: spec_of(mode),
                metric: metric.metric()?,
                linkage,
                k_clusters: k,
                mds_dim: dim,
                fa_factors: factors,
                outputs: out,
                formats: format,
            };
            let report = run_pipeline(&config)?;
            for line in &report.narrative {
                println!("{line}");
            }
            for path in output_files(&report) {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Datasets => {
            for d in BuiltinDataset::ALL {
                println!("{}: {}", d.name(), d.description());
                for note in d.notes() {
                    println!("    note: {note}");
                }
            }
            Ok(())
        }
    }
}

fn labeled_square(labels: &[String], m: &kpistats::Mat) -> String {
    let mut out = String::from("variable");
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

fn points_of(labels: &[String], coords: &kpistats::Mat) -> Vec<ScatterPoint> {
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

fn main() {
    // Rust ignores SIGPIPE by default, turning `kpistats ... | head` into a
    // broken-pipe panic; restore the usual silent death of a Unix filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = i32::from(e.use_stderr());
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numeric() {
                3
            } else {
                2
            }
        }
    }
}
