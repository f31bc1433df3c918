use thiserror::Error;

/// Failures that map to a distinct process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl From<mdyn_core::Error> for CliError {
    fn from(e: mdyn_core::Error) -> Self {
        use mdyn_core::Error as E;
        match e {
            E::Parse(_) => CliError::Parse(e.to_string()),
            E::NonConvex { .. }
            | E::InconsistentLevels(_)
            | E::Unsettled
            | E::OneSided(_)
            | E::ExceedsVolume { .. }
            | E::Degenerate
            | E::BoundarySupply { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

/// Exit code for an error chain: the first [`CliError`] in the chain decides,
/// anything else (I/O and the like) exits with 1.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|cause| cause.downcast_ref::<CliError>())
        .map_or(1, CliError::exit_code)
}
