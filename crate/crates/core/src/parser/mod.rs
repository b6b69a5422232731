//! Concrete syntax: formula and context text, model and proof JSON.

mod formula;
mod json;

use std::fmt;

use thiserror::Error;

use crate::syntax::SortError;

pub use formula::{
    parse_context, parse_formula, parse_formula_unchecked, parse_label, render_context,
    render_formula, render_formula_unicode,
};
pub use json::{
    model_from_value, model_to_json, parse_model, parse_proof, proof_from_value, proof_to_json,
    ModelDoc,
};

/// Byte offsets into the input, end exclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> SourceSpan {
        SourceSpan { start, end }
    }

    pub fn join(self, other: SourceSpan) -> SourceSpan {
        SourceSpan { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{message} at {span}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{error} (at {span})")]
    Sort { span: SourceSpan, error: SortError },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Field { path: String, source: Box<ParseError> },
}

impl ParseError {
    pub(crate) fn syntax(span: SourceSpan, message: String) -> ParseError {
        ParseError::Syntax { span, message }
    }

    /// Span of the innermost text error, if there is one.
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            ParseError::Syntax { span, .. } | ParseError::Sort { span, .. } => Some(*span),
            ParseError::Field { source, .. } => source.span(),
            _ => None,
        }
    }
}
