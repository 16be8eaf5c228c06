//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown schema: {0}")]
    UnknownSchema(String),

    #[error("unknown path {path:?} in schema {schema}")]
    UnknownPath { schema: String, path: String },

    #[error("unknown DC term: {term}{}", .qualifier.as_deref().map(|q| format!(".{q}")).unwrap_or_default())]
    UnknownDcTerm {
        term: String,
        qualifier: Option<String>,
    },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate path {path} in schema {schema}")]
    DuplicatePath { schema: String, path: String },

    #[error("path {path} in schema {schema} has no parent element or container")]
    OrphanChildPath { schema: String, path: String },

    #[error("empty element path")]
    EmptyPath,

    #[error("invalid path segment: {0:?}")]
    MalformedPath(String),

    #[error("expected a {expected} record, got {found}")]
    WrongSchema { expected: String, found: String },

    #[error("element {path} mixes non-whitespace text with child elements")]
    MixedContent { path: String },

    #[error("crosswalk rule {row}: source path {path} does not resolve in schema {schema}")]
    UnresolvableSourcePath {
        row: usize,
        schema: String,
        path: String,
    },

    #[error("record has no identifier (neither the DC record nor the language facts supply one)")]
    MissingIdentifier,

    #[error("record has no language name")]
    MissingLanguageName,

    #[error("invalid harvest config: {0}")]
    BadConfig(String),

    #[error("endpoint unreachable after {attempts} attempt(s): {message}")]
    NetworkUnreachable { attempts: u32, message: String },

    #[error("OAI-PMH error {code}: {message}")]
    Protocol { code: String, message: String },

    #[error("directory not found: {0}")]
    DirectoryNotFound(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
