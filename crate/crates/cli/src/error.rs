use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The spec is malformed or fails validation.
    #[error("spec: {0}")]
    Spec(String),

    /// A library computation failed (numeric or capacity error).
    #[error("{job}: {source}")]
    Numeric {
        job: String,
        #[source]
        source: renyi_hyp::Error,
    },

    /// Raised only under `--strict`.
    #[error("not converged: {0}")]
    NonConvergence(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn numeric(job: impl Into<String>, source: renyi_hyp::Error) -> Self {
        CliError::Numeric { job: job.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::NonConvergence(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Spec(_) => "spec-validation",
            CliError::Numeric { source: renyi_hyp::Error::CapacityExceeded { .. }, .. } => "capacity",
            CliError::Numeric { .. } => "numeric",
            CliError::NonConvergence(_) => "non-convergence",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON for standard error.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            exit_code: i32,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            job: Option<&'a str>,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        let job = match self {
            CliError::Numeric { job, .. } => Some(job.as_str()),
            _ => None,
        };
        let body = Body { kind: self.kind(), exit_code: self.exit_code(), message: self.to_string(), job };
        serde_json::to_string(&Wrapper { error: body }).unwrap_or_else(|_| self.to_string())
    }
}
