use serde::Serialize;
use std::fmt::Display;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error{}: {message}", field.as_deref().map(|f| format!(" at `{f}`")).unwrap_or_default())]
    Parse {
        field: Option<String>,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    /// A check ran to completion and failed.
    #[error("{0}")]
    Verification(String),
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
    message: String,
}

impl CliError {
    pub fn validation(field: &str, message: impl Display) -> Self {
        CliError::Validation {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            _ => 2,
        }
    }

    /// One-line JSON for the error stream.
    pub fn diagnostic(&self) -> String {
        let (kind, field) = match self {
            CliError::Io { .. } => ("io", None),
            CliError::Parse { field, .. } => ("parse", field.as_deref()),
            CliError::Validation { field, .. } => ("validation", Some(field.as_str())),
            CliError::Verification(_) => ("verification", None),
        };
        serde_json::to_string(&Diagnostic {
            error: kind,
            field,
            message: self.to_string(),
        })
        .expect("diagnostic serializes")
    }
}
