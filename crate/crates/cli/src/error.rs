use compacton::closed_forms::WaveError;
use compacton::dsl::DslError;
use compacton::frame::FrameError;
use compacton::similarity::SimilarityError;
use compacton::simulator::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(#[from] DslError),
    #[error("{0}")]
    Numeric(String),
    #[error("blow-up at t = {t}: max |u| = {max_abs}")]
    BlowUp { t: f64, max_abs: f64 },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 usage, 2 parse, 3 numeric failure (and i/o), 4 blow-up.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
            CliError::BlowUp { .. } => 4,
        }
    }

    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }
}

impl From<SimilarityError> for CliError {
    fn from(e: SimilarityError) -> CliError {
        match e {
            SimilarityError::BadBranch(_) | SimilarityError::BranchLength { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<WaveError> for CliError {
    fn from(e: WaveError) -> CliError {
        match e {
            WaveError::UnknownFamily(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> CliError {
        CliError::Numeric(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> CliError {
        match e {
            SimError::BlowUp { t, max_abs, .. } => CliError::BlowUp { t, max_abs },
            SimError::Config(m) => CliError::Usage(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Usage(format!("invalid JSON input: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
