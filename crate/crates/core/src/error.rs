use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::formula::Var;

/// Position-carrying diagnostic produced by the text front-end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Undeclared(String),
    Sort(String),
    Nonlinear(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (what, msg) = match &self.kind {
            ParseErrorKind::Syntax(m) => ("syntax error", m),
            ParseErrorKind::Undeclared(m) => ("undeclared variable", m),
            ParseErrorKind::Sort(m) => ("sort error", m),
            ParseErrorKind::Nonlinear(m) => ("nonlinear term", m),
        };
        write!(f, "{}:{}: {}: {}", self.line, self.col, what, msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("modulus must be positive, got {0}")]
    BadModulus(BigInt),
    #[error("sort error: {0}")]
    Sort(String),
    #[error("variable {0} is not assigned")]
    Unassigned(Var),
    #[error("quantifier over {0} has no evaluation bounds")]
    UnboundedQuantifier(Var),
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("invalid mode vector: {0}")]
    InvalidModes(String),
    #[error("{0}")]
    BoxTooLarge(String),
    #[error("relation is not transitive")]
    NotTransitive,
    #[error("resource limit reached: {0}")]
    ResourceLimit(String),
    #[error("unsupported query: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
