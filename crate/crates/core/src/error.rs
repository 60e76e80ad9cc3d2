use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An enumeration would have produced more points than the configured cap.
    #[error("enumeration horizon exceeded: more than {cap} points")]
    HorizonExceeded { cap: usize },

    #[error("insufficient levels: candidate needs {needed} levels, only {available} enumerated")]
    InsufficientLevels { needed: usize, available: usize },

    #[error("metric axiom violated: {0}")]
    MetricAxiom(String),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::HorizonExceeded { .. })
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed number `{0}`")]
    Number(String),

    #[error("malformed json: {0}")]
    Json(String),

    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error("{0}")]
    Format(String),
}
