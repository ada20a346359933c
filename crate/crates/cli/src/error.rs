use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("step failure: {0}")]
    StepFailure(String),
    #[error("corrector failure: {0}")]
    CorrectorFailure(String),
    #[error("singular Jacobian: {0}")]
    SingularJacobian(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::StepFailure(_) => 3,
            CliError::CorrectorFailure(_) => 4,
            CliError::SingularJacobian(_) => 5,
            CliError::Failed(_) => 1,
        }
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))
}
