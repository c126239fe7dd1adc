use serde_json::{json, Value};
use thiserror::Error;

/// Exit code for malformed input or arguments.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code when the analysis is infeasible or cannot decide.
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("{kind} at `{path}`: {message}")]
    Semantic { path: String, kind: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] crnlap::Error),
    /// The command ran but has no positive answer; the report is kept.
    #[error("{message}")]
    Inconclusive { message: String, report: Value },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Inconclusive { .. } => EXIT_INCONCLUSIVE,
            CliError::Core(crnlap::Error::NoConvergence(_) | crnlap::Error::StepSizeUnderflow(_)) => EXIT_INCONCLUSIVE,
            _ => EXIT_VALIDATION,
        }
    }

    fn kind(&self) -> String {
        match self {
            CliError::Schema { .. } => "SchemaError".into(),
            CliError::Semantic { kind, .. } => kind.clone(),
            CliError::Usage(_) => "UsageError".into(),
            CliError::Io(_) => "IoError".into(),
            CliError::Core(e) => {
                let debug = format!("{e:?}");
                debug.split(['(', ' ', '{']).next().unwrap_or("Error").to_string()
            }
            CliError::Inconclusive { .. } => "Inconclusive".into(),
        }
    }

    /// Structured form written to standard error.
    pub fn to_json(&self) -> Value {
        let mut error = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        match self {
            CliError::Schema { path, .. } | CliError::Semantic { path, .. } => {
                error["path"] = json!(path);
            }
            CliError::Inconclusive { report, .. } => {
                error["report"] = report.clone();
            }
            _ => {}
        }
        json!({ "error": error })
    }
}
