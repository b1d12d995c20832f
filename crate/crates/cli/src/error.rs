use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },
    #[error("{system}: non-finite state at step {step}")]
    NonFinite { system: pfdtd_core::SystemKind, step: u64 },
    #[error(transparent)]
    Solver(#[from] pfdtd_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("voxel file: {0}")]
    Voxel(String),
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Voxel(_) => 2,
            CliError::NonFinite { .. } | CliError::Solver(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
