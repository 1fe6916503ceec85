use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// The CLI maps these onto exit codes: data/shape problems are exit 2,
/// numeric failures ([`Error::Numeric`], [`Error::Convergence`]) are exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed cell or row while reading CSV. Row/column indices are
    /// 1-based and count the header as row 1.
    #[error("parse error at row {row}: {msg}")]
    Parse {
        row: usize,
        col: Option<usize>,
        msg: String,
    },
    /// A sample or variable label occurs twice.
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    /// A CSV with a header but no data rows, or an empty frame.
    #[error("dataset has no samples")]
    EmptyDataset,
    /// Mismatched dimensions between two inputs.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A column (or sequence) is constant where variation is required.
    #[error("zero variance in {0:?}")]
    ZeroVariance(String),
    /// Not enough samples for the requested statistic.
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    /// An argument is outside its documented domain (k, dim, df, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Non-finite values or an operation that is numerically undefined.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// An iterative kernel exhausted its sweep or iteration budget.
    #[error("no convergence: {0}")]
    Convergence(String),
    /// A distance matrix that is not symmetric/nonnegative/zero-diagonal.
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
    /// A correspondence-analysis margin (row or column sum) is zero.
    #[error("degenerate margin: row or column {0:?} sums to zero")]
    DegenerateMargin(String),
    /// Failure writing report files.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// A pipeline stage failed; wraps the underlying error with the stage name.
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// The innermost error, unwrapping pipeline stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerical kernels (as opposed to bad data).
    pub fn is_numeric(&self) -> bool {
        matches!(self.root(), Error::Numeric(_) | Error::Convergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
