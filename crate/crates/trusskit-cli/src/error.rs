use std::fmt;

use trusskit::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Bad file, flag or parameter.
    Input,
    /// Well-formed input the mathematics cannot serve: flexible, degenerate, non-flat.
    Math,
    Internal,
}

impl Kind {
    pub fn exit_code(self) -> u8 {
        match self {
            Kind::Input => 1,
            Kind::Math => 2,
            Kind::Internal => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Input, message: message.into() }
    }

    pub fn math(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Math, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Internal, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn classify(e: &Error) -> Kind {
    use Error::*;
    match e {
        NotRigid { .. }
        | AugmentedSingular
        | Incompatible { .. }
        | NotFlat { .. }
        | DegenerateFace(_)
        | DegenerateSector { .. }
        | PlacementMismatch { .. }
        | ExcitesFlex(_)
        | ZeroLength { .. } => Kind::Math,
        Numerical(_) => Kind::Internal,
        _ => Kind::Input,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { kind: classify(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("line {} column {}: {e}", e.line(), e.column()))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
