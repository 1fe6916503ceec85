//! Multivariate statistics for network KPI matrices.
//!
//! The input is a small labeled table — rows are sample periods, columns are
//! performance indicators — and the library answers the questions an
//! operations analyst asks of it: which indicators move together
//! ([`correlation_matrix`]), which sample periods behave alike
//! ([`distance_matrix`] + [`agglomerate`]), what the data looks like in two
//! dimensions ([`classical_mds`], [`correspondence`]), and how few latent
//! factors explain it ([`fa_principal`], [`fa_ml`]).
//!
//! [`run_pipeline`] chains all of the above into one [`Report`] with SVG
//! figures, CSV exports and a narrative summary; the `kpistats` binary in
//! this workspace exposes each stage as a CLI subcommand.
//!
//! Everything is deterministic: the eigen/SVD routines fix signs, clustering
//! breaks ties by node id, and reports serialize byte-identically given the
//! same input.

mod builtin_tables;
pub mod cluster;
pub mod correlation;
pub mod distance;
pub mod error;
pub mod factor;
pub mod frame;
pub mod mat;
pub mod numerics;
pub mod ordination;
pub mod report;
pub mod svg;

pub use cluster::{agglomerate, Dendrogram, Linkage, Merge};
pub use correlation::{correlation_matrix, pearson, q_min, CorrelationResult};
pub use distance::{distance, distance_matrix, DistanceMatrix, Metric};
pub use error::{Error, Result};
pub use factor::{fa_ml, fa_principal, FaMethod, FactorModel};
pub use frame::{
    builtin_dataset, load_csv, standardize, BuiltinDataset, KpiFrame, StandardizeMode,
    StandardizeSpec, ZeroVariancePolicy,
};
pub use mat::Mat;
pub use numerics::{svd, sym_eigen, EigenResult, SvdResult};
pub use ordination::{classical_mds, correspondence, stress, CaResult, Embedding};
pub use report::{
    output_files, run_pipeline, DatasetSource, Partition, PipelineConfig, Report, ReportFormat,
};
pub use svg::{render_dendrogram, render_scatter, ScatterPoint};
