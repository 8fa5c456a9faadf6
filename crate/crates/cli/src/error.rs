use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {}{message}", path.display(), line.map_or(String::new(), |l| format!("line {l}: ")))]
    Input { path: PathBuf, line: Option<usize>, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Refused(String),

    #[error(transparent)]
    Core(#[from] unitchart::Error),
}

impl CliError {
    /// 2 input, 3 design or estimation failure, 4 internal numeric failure.
    pub fn exit_code(&self) -> i32 {
        use unitchart::Error as E;
        match self {
            CliError::Input { .. } | CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Refused(_) => 3,
            CliError::Core(e) => match e {
                E::Domain(_) | E::Data { .. } => 2,
                E::Design(_) | E::Estimation(_) | E::Test(_) => 3,
                E::Numeric { .. } => 4,
            },
        }
    }
}
