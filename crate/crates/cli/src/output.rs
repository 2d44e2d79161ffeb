use std::fmt;
use std::process::ExitCode;

use clap::ValueEnum;
use qkbw::error::{BoundError, BwError, CasimirError, ParseError, RepError};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
    Csv,
}

/// Exit status 2 for bad input, 3 for internal inconsistency.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::invalid(e.to_string())
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        CliError::invalid(e.to_string())
    }
}

impl From<CasimirError> for CliError {
    fn from(e: CasimirError) -> Self {
        match e {
            CasimirError::FormulaDegeneracy { .. } => CliError::internal(e.to_string()),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

impl From<BwError> for CliError {
    fn from(e: BwError) -> Self {
        match e {
            BwError::MixedBundles | BwError::Casimir(CasimirError::FormulaDegeneracy { .. }) => {
                CliError::internal(e.to_string())
            }
            _ => CliError::invalid(e.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        if e.is_internal() {
            CliError::internal(e.to_string())
        } else {
            CliError::invalid(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::internal(format!("serialization failed: {e}")))
}

/// Rendered output in each supported format; `None` marks an unsupported one.
pub struct Rendered {
    pub json: String,
    pub md: String,
    pub csv: Option<String>,
}

impl Rendered {
    pub fn new<T: Serialize>(value: &T, md: String, csv: Option<String>) -> CliResult<Self> {
        Ok(Rendered {
            json: to_json(value)?,
            md,
            csv,
        })
    }

    pub fn select(self, format: Format, verb: &str) -> CliResult<String> {
        match format {
            Format::Json => Ok(self.json),
            Format::Md => Ok(self.md),
            Format::Csv => self
                .csv
                .ok_or_else(|| CliError::invalid(format!("{verb} has no csv output"))),
        }
    }
}
