use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::okmodel::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single diagnostic produced while reading a line-oriented input file
/// (ontology DSL, patterns, decisions, lexicon).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ParseError {
    pub code: &'static str,
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(code: &'static str, line: usize, message: impl Into<String>) -> Self {
        Self {
            code,
            line,
            message: message.into(),
        }
    }

    pub fn syntax(line: usize, message: impl Into<String>) -> Self {
        Self::new("E_SYNTAX", line, message)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} {}", self.line, self.code, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("no text documents found in {}", .0.display())]
    NoCorpus(PathBuf),
    #[error("{} is not valid UTF-8", .0.display())]
    Encoding(PathBuf),
    #[error("bad pattern `{id}`: {reason}")]
    BadPattern { id: String, reason: String },
    #[error("unknown term \"{0}\"")]
    UnknownTerm(String),
    #[error("unknown reference: {0}")]
    UnknownRef(String),
    #[error("validated hyponymy contains a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("unknown concept \"{0}\"")]
    UnknownConcept(String),
    #[error("unknown genus \"{0}\"")]
    UnknownGenus(String),
    #[error("unknown axis \"{0}\"")]
    UnknownAxis(String),
    #[error("value \"{value}\" is not declared on axis \"{axis}\"")]
    BadValue { axis: String, value: String },
    #[error("duplicate name \"{0}\"")]
    DupName(String),
    #[error("{}", display_parse_errors(.0))]
    Parse(Vec<ParseError>),
    #[error("type error: {0}")]
    Type(String),
    #[error("\"{label}\" cannot be resolved in the {structure} structure")]
    Unresolvable { label: String, structure: String },
    #[error("ontology has {} consistency violation(s)", .0.len())]
    Inconsistent(Vec<Violation>),
    #[error("config: missing or invalid key `{0}`")]
    Config(String),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn display_parse_errors(errors: &[ParseError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Stable error code, shared with the C API.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NoCorpus(_) => "E_NO_CORPUS",
            Error::Encoding(_) => "E_ENCODING",
            Error::BadPattern { .. } => "E_BAD_PATTERN",
            Error::UnknownTerm(_) => "E_UNKNOWN_TERM",
            Error::UnknownRef(_) => "E_UNKNOWN_REF",
            Error::Cycle(_) => "E_CYCLE",
            Error::UnknownConcept(_) => "E_UNKNOWN_CONCEPT",
            Error::UnknownGenus(_) => "E_UNKNOWN_GENUS",
            Error::UnknownAxis(_) => "E_UNKNOWN_AXIS",
            Error::BadValue { .. } => "E_BAD_VALUE",
            Error::DupName(_) => "E_DUP_NAME",
            Error::Parse(errors) => errors.first().map_or("E_SYNTAX", |e| e.code),
            Error::Type(_) => "E_TYPE",
            Error::Unresolvable { .. } => "E_UNRESOLVABLE",
            Error::Inconsistent(_) => "E_INCONSISTENT",
            Error::Config(_) => "E_CONFIG",
            Error::Io { .. } => "E_IO",
            Error::Json(_) => "E_JSON",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
