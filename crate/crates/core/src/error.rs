use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error("vertex {0} is not alive")]
    DeadVertex(usize),
    #[error("vertex set is not independent: edge ({0}, {1})")]
    NotIndependent(usize, usize),
    #[error("penalty U = {penalty} must exceed the maximum vertex weight {max_weight}")]
    PenaltyTooSmall { penalty: u64, max_weight: u64 },
    #[error("instance has no vertices (round(rho * L^2) = 0)")]
    EmptyInstance,
    #[error("invalid instance: {0}")]
    InvalidSpec(String),
    #[error("unknown reduction rule `{0}`")]
    UnknownRule(String),
    #[error("graph has {vertices} alive vertices, exhaustive limit is {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("kernelization exceeded its step budget of {0} rule applications")]
    StepBudget(usize),
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}
