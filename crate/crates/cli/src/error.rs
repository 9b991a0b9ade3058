use std::fmt;
use std::path::Path;

use chargebus::Error;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Core error located in an input file.
    InFile {
        path: String,
        error: Error,
    },
    Io {
        path: String,
        message: String,
    },
}

impl CliError {
    pub fn in_file(path: &Path, error: Error) -> Self {
        CliError::InFile { path: path.display().to_string(), error }
    }

    /// 3 for physics failures, 2 for anything wrong with the inputs.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) | CliError::InFile { error: e, .. } if e.is_physics() => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::InFile { path, error } => write!(f, "{path}:{error}"),
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
