use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid stable graph: {0}")]
    InvalidGraph(String),
    #[error("mixed ambient spaces: ({0},{1}) vs ({2},{3})")]
    MixedAmbient(u32, u32, u32, u32),
    #[error("interpolation mismatch: {0}")]
    Interpolation(String),
    #[error("elimination failed: {0}")]
    Elimination(String),
    #[error("degree {degree} is below the boundary threshold {threshold} on M({g},{n})")]
    BelowThreshold { g: u32, n: u32, degree: u32, threshold: u32 },
    #[error("relation database integrity error: {0}")]
    Integrity(String),
    #[error("internal defect: {0}")]
    Defect(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
