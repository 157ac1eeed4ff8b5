//! The `.tsm` model format: an s-expression language with SMT-LIB operator
//! spellings. See `docs/grammar.md` for the full grammar.

mod parse;
mod print;
pub mod sexp;

use std::fmt;

pub use parse::{parse_expr, parse_model, parse_model_bytes};
pub use print::{serialize_expr, serialize_model};

/// 1-based position and extent of a token or form in the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        SourceSpan { line: line.max(1), column: column.max(1), length: length.max(1) }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Option<Vec<String>>,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        let mut message = message.into();
        if message.is_empty() {
            message.push_str("parse error");
        }
        ParseError { span, message, expected: None }
    }

    pub fn expecting(mut self, what: &[&str]) -> Self {
        self.expected = Some(what.iter().map(|s| s.to_string()).collect());
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if let Some(expected) = &self.expected {
            write!(f, " (expected {})", expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Renders a list of parse errors, one per line, prefixed with `origin`.
pub fn render_errors(origin: &str, errors: &[ParseError]) -> String {
    errors.iter().map(|e| format!("{origin}:{e}\n")).collect()
}
