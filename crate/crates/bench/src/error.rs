use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] ridgelab::Error),
    #[error("invalid synthetic spec {0}")]
    Synth(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("no pipelines")]
    NoPipelines,
    #[error("no inputs")]
    NoInputs,
    #[error("no noise specs")]
    NoNoise,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid {name}: {message}")]
    Env { name: &'static str, message: String },
}
