//! Standard-library companion to `twistcore`: JSON formats, golden files,
//! the parallel density engine and the `twistlab` command line.

pub mod cli;
pub mod density;
pub mod golden;
pub mod json;

/// Errors surfaced by the lab layer.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Math(#[from] twistcore::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    /// Process exit code: 1 for mathematical failures, 2 for input problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Math(twistcore::Error::Parse(_)) => 2,
            LabError::Math(_) => 1,
            LabError::Format(_) | LabError::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Format(e.to_string())
    }
}
