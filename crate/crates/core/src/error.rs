use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A position in source text, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub fn expected(pos: Pos, found: &str, expected: &[&str]) -> Self {
        ParseError {
            pos,
            message: format!("unexpected {found}"),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// One offending item found by a validator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Where the problem sits, e.g. `proc A: par.right`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResourceError {
    #[error("state limit of {limit} exceeded ({frontier} states still in the frontier)")]
    States { limit: usize, frontier: usize },
    #[error("expression limit of {limit} exceeded while closing under reachability")]
    Expressions { limit: usize },
    #[error("valuation space |D|^|Var| = {count} exceeds the cap of {cap}")]
    Valuations { count: String, cap: usize },
    #[error("recursion unfolded more than {limit} times in a single step (unguarded recursion?)")]
    Unfold { limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("validation failed:\n{}", join_lines(.0))]
    Validation(Vec<Violation>),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    /// A caller broke an operation's precondition, e.g. asked for a
    /// distinguishing formula of two bisimilar processes.
    #[error("{0}")]
    Contract(String),
    #[error("formula outside the supported fragment: {0}")]
    Fragment(String),
    #[error("{0}")]
    Semantic(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

fn join_lines(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}
