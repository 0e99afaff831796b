use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("series `{0}` has no usable samples after outlier rejection")]
    UnusableSeries(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("shape mismatch at layer {layer} ({kind}): expected {expected}, got {got}")]
    Shape {
        layer: usize,
        kind: &'static str,
        expected: String,
        got: String,
    },

    #[error("forward cache does not belong to the current parameters")]
    StaleCache,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("expected exactly 2 clusters, found {found}; eps sweep: {sweep}")]
    ClusterCount { found: usize, sweep: String },

    #[error("checkpoint fingerprint {found} does not match spec fingerprint {expected}")]
    Fingerprint { expected: String, found: String },

    #[error("config: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps the error with the name of the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
