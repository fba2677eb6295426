use thiserror::Error;

/// Errors produced by every stage of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("range error: {0}")]
    Range(String),

    #[error("design matrix is singular: column `{column}` is linearly dependent on the others")]
    SingularDesign { column: String },

    #[error("insufficient data: need more than {needed} observations, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("diagnostic failed: {0}")]
    Diagnostic(String),

    #[error("filter breakdown at step {step}: {message}")]
    Filter { step: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }
}
