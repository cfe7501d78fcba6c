use pencil_core::PencilError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input file, arguments or data. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// An internal consistency check failed. Exit code 3.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<PencilError> for CliError {
    fn from(e: PencilError) -> Self {
        match e {
            PencilError::Input(msg) => CliError::Input(msg),
            PencilError::Contract(msg) => CliError::Internal(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(CliError::from(PencilError::Input("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(PencilError::Contract("x".into())).exit_code(), 3);
    }
}
