use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("write failed: {0}")]
    Output(#[from] std::io::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("{0}")]
    Model(#[from] jointex_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 1 for I/O failures, 2 for anything the input got wrong.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Output(_) => 1,
            _ => 2,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::Output(io),
                _ => unreachable!(),
            },
            _ => CliError::Csv(e.to_string()),
        }
    }
}
