use std::path::PathBuf;

use thiserror::Error;

use distress_lda::Error as CoreError;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_FIT: u8 = 4;
pub const EXIT_EVALUATION: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read `{path}`: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write `{path}`: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Input { path: PathBuf, source: CoreError },

    #[error("evaluation failed: {0}")]
    Evaluation(CoreError),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Read { .. } => EXIT_CONFIG,
            CliError::Write { .. } => EXIT_OTHER,
            CliError::Evaluation(_) => EXIT_EVALUATION,
            CliError::Input { source, .. } | CliError::Core(source) => core_exit_code(source),
        }
    }
}

fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::Parse { .. }
        | CoreError::DuplicateKey { .. }
        | CoreError::Schema(_)
        | CoreError::ModelFile(_) => EXIT_PARSE,
        CoreError::Singular { .. } | CoreError::DegenerateSeparation => EXIT_FIT,
        CoreError::MissingLabel { .. } | CoreError::MissingData { .. } => EXIT_EVALUATION,
        _ => EXIT_OTHER,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
