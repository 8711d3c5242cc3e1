use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("column {column} is zero")]
    ZeroColumn {
        /// 1-based column index.
        column: usize,
    },

    #[error("arrangement has {columns} columns; at most {max} are supported")]
    TooManyColumns { columns: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("the zero matrix has no nonzero minors")]
    ZeroMatrix,

    #[error("subset enumeration needs {needed} subsets, cap is {cap}")]
    SubsetCap { needed: u128, cap: u64 },

    #[error("minor enumeration needs {needed} minors, cap is {cap}")]
    MinorCap { needed: u128, cap: u64 },

    #[error("enumeration needs {needed} evaluations, budget is {budget}")]
    OracleBudget { needed: u128, budget: u64 },

    #[error("{what} does not fit in 64 bits")]
    Overflow { what: &'static str },

    #[error("empty column subset")]
    EmptySubset,

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("interpolation produced non-integral coefficient {0}")]
    NonIntegral(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SubsetCap { .. }
            | Error::MinorCap { .. }
            | Error::OracleBudget { .. }
            | Error::Overflow { .. } => 3,
            _ => 2,
        }
    }
}
