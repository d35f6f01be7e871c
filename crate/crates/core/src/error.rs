use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has {got} entries, expected {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("Hilbert dimension {0} is not supported here")]
    UnsupportedDimension(usize),

    #[error("operator is not Hermitian (Frobenius residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not idempotent (Frobenius residual {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("trace {trace} differs from 1")]
    NotUnitTrace { trace: f64 },

    #[error("operator has negative eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("product dimension {dim} exceeds the cap of {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("Bloch vector has norm {norm}, outside the unit ball")]
    NonPhysicalBloch { norm: f64 },

    #[error("projectors {x} and {y} are not orthogonal (Frobenius residual {residual:.3e})")]
    NotOrthogonal { x: usize, y: usize, residual: f64 },

    #[error("projectors do not sum to the identity (Frobenius residual {residual:.3e})")]
    Incomplete { residual: f64 },

    #[error("a measurement needs at least one outcome")]
    EmptySet,

    #[error("rank partition {partition:?} does not sum to dimension {dim}")]
    PartitionMismatch { partition: Vec<usize>, dim: usize },

    #[error("{labels} labels given for {elements} outcomes")]
    LabelMismatch { labels: usize, elements: usize },

    #[error("vector has norm {norm}, expected a unit vector")]
    NotNormalized { norm: f64 },

    #[error("measurements of mixed dimensions ({first} and {other})")]
    MixedDimensions { first: usize, other: usize },

    #[error("operator of rank {0} is not a qubit projector")]
    UnsupportedRank(usize),

    #[error("projector {key} assigned both {first} and {second}")]
    ContextualConflict { key: String, first: f64, second: f64 },

    #[error("value {0} is outside [0, 1]")]
    ValueOutOfRange(f64),

    #[error("frame function is not defined on projector {key}")]
    UndefinedProjector { key: String },

    #[error("design matrix condition number {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("no witness: certificate verdict is {verdict}")]
    NotApplicable { verdict: String },

    #[error("unknown tolerance key `{0}`")]
    UnknownTolerance(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Variant name, used as a stable error class in CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EntryCount { .. } => "EntryCount",
            Error::NonFinite { .. } => "NonFinite",
            Error::NotSquare { .. } => "NotSquare",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotIdempotent { .. } => "NotIdempotent",
            Error::NotUnitTrace { .. } => "NotUnitTrace",
            Error::NotPositive { .. } => "NotPositive",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DimensionOverflow { .. } => "DimensionOverflow",
            Error::NonPhysicalBloch { .. } => "NonPhysicalBloch",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::Incomplete { .. } => "Incomplete",
            Error::EmptySet => "EmptySet",
            Error::PartitionMismatch { .. } => "PartitionMismatch",
            Error::LabelMismatch { .. } => "LabelMismatch",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::MixedDimensions { .. } => "MixedDimensions",
            Error::UnsupportedRank(_) => "UnsupportedRank",
            Error::ContextualConflict { .. } => "ContextualConflict",
            Error::ValueOutOfRange(_) => "ValueOutOfRange",
            Error::UndefinedProjector { .. } => "UndefinedProjector",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NotApplicable { .. } => "NotApplicable",
            Error::UnknownTolerance(_) => "UnknownTolerance",
            Error::Parse(_) => "Parse",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
