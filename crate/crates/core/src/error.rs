use thiserror::Error;

use crate::game::{Vertex, Violation};

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {}", format_violations(.0))]
    InvalidGame(Vec<Violation>),

    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),

    #[error("unknown decomposition node {0}")]
    UnknownNode(usize),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance too large for exhaustive enumeration ({0} strategies)")]
    TooLarge(u128),

    #[error("state budget of {0} explored states exceeded")]
    BudgetExceeded(u64),

    #[error("illegal move by {agent}: {message}")]
    IllegalMove { agent: &'static str, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by running out of search resources rather than
    /// by bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_) | Error::TooLarge(_))
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
