use thiserror::Error;

/// Errors produced by the toolkit. Atom indices carried here are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("column {0} has (near-)zero norm")]
    ZeroColumn(usize),

    #[error("matrix contains a non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("column {index} has norm {norm}, expected 1")]
    NormViolation { index: usize, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dictionary shape {n}x{d} (need n >= 1, d >= 2)")]
    InvalidShape { n: usize, d: usize },

    #[error("sub-dictionary on {support:?} is rank deficient (sigma_min = {sigma_min:e})")]
    RankDeficient { support: Vec<usize>, sigma_min: f64 },

    #[error("order {k} out of range 1..={max}")]
    OrderOutOfRange { k: usize, max: usize },

    #[error("enumeration of {estimated} subsets exceeds the budget of {budget}")]
    BudgetExceeded { estimated: u128, budget: u128 },

    #[error("symmetric eigensolver did not converge")]
    EigenFailure,

    #[error("invalid sparse vector: {0}")]
    InvalidSparseVector(String),

    #[error("invalid sparsity k = {k} for dimension d = {d}")]
    InvalidSparsity { k: usize, d: usize },

    #[error("invalid pursuit configuration: {0}")]
    InvalidConfig(String),

    #[error("orthogonality hypothesis violated at atom {index}: <Phi a, phi_i> = {value:e}")]
    HypothesisViolated { index: usize, value: f64 },

    #[error("error bound not applicable: recovered support differs from the true support")]
    NotApplicable,

    #[error("restricted isometry constant {delta} >= 1; bound is degenerate")]
    DegenerateDelta { delta: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("empty input")]
    EmptyInput,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short stable code used in CSV rows when a trial fails.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroColumn(_) => "zero_column",
            Error::NonFinite { .. } => "non_finite",
            Error::NormViolation { .. } => "norm_violation",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidShape { .. } => "invalid_shape",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::OrderOutOfRange { .. } => "order_out_of_range",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::EigenFailure => "eigen_failure",
            Error::InvalidSparseVector(_) => "invalid_sparse_vector",
            Error::InvalidSparsity { .. } => "invalid_sparsity",
            Error::InvalidConfig(_) => "invalid_config",
            Error::HypothesisViolated { .. } => "hypothesis_violated",
            Error::NotApplicable => "not_applicable",
            Error::DegenerateDelta { .. } => "degenerate_delta",
            Error::Parse { .. } => "parse_error",
            Error::Config(_) => "config_error",
            Error::EmptyInput => "empty_input",
            Error::Io(_) => "io_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
