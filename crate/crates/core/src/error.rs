use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A named inequality that the operation requires does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension {0} is not supported (expected 1 or 2)")]
    Dimension(usize),

    #[error("domain: {0}")]
    Domain(String),

    #[error("weight lacks the metadata needed here: {0}")]
    MissingMetadata(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 1 || n == 2 {
        Ok(())
    } else {
        Err(Error::Dimension(n))
    }
}
