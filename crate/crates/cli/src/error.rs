use std::fmt;

use gestaug::ErrorClass;

/// Process exit status. Usage errors reported by the argument parser also
/// exit with 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// Bad flags, config file or parameter values.
    Config = 2,
    /// Malformed input data: skeleton files, indexes, manifests.
    Parse = 3,
    /// I/O and other failures while doing the work.
    Runtime = 4,
    /// The work ran but a check failed: verify violations, stats range
    /// violations, differing bench outputs.
    Verify = 5,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn for_class(class: ErrorClass) -> Self {
        match class {
            ErrorClass::Parse => ExitCode::Parse,
            ErrorClass::Config => ExitCode::Config,
            ErrorClass::Runtime => ExitCode::Runtime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn new(code: ExitCode, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Config, message)
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Runtime, message)
    }

    /// Core errors raised while validating settings are config errors
    /// whatever their class.
    pub fn from_core_config(e: gestaug::Error) -> Self {
        Self::config(e.to_string())
    }
}

impl From<gestaug::Error> for CliError {
    fn from(e: gestaug::Error) -> Self {
        CliError::new(ExitCode::for_class(e.class()), e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
