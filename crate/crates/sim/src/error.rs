use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] wprelay_core::Error),
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { min: u64, got: u64 },
    #[error("{errors} of {trials} trials failed, above the 0.1% limit")]
    TooManyErrors { errors: u64, trials: u64 },
    #[error("unknown recipe `{0}`")]
    UnknownRecipe(String),
    #[error("invalid experiment: {0}")]
    Experiment(String),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
