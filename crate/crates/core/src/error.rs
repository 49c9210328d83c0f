use std::fmt;

use thiserror::Error;

/// Errors raised by the prover library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DplError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("undeclared action `{0}`")]
    UndeclaredAction(String),
    #[error("undeclared proposition `{0}`")]
    UndeclaredProposition(String),
    #[error("duplicate action `{0}` in vocabulary")]
    DuplicateAction(String),
    #[error("`{0}` is declared both as an action and as a proposition")]
    NameClash(String),
    #[error("vocabulary must contain at least one action")]
    EmptyVocabulary,
    #[error("vocabulary of {width} actions exceeds the supported maximum of {max}")]
    VocabularyTooWide { width: usize, max: usize },
    #[error("global check needs {needed} fresh actions but the limit is {limit}")]
    FreshLimit { needed: usize, limit: usize },
    #[error("formula is not in normal form: {0}")]
    NotNormalForm(String),
    #[error("rule already applied to `{0}`")]
    AlreadyExpanded(String),
    #[error("branch is not open and saturated")]
    BranchNotOpen,
    #[error("structure is not tree-shaped from the given world: {0}")]
    NotTree(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle guard exceeded: {0}")]
    OracleGuard(String),
    #[error("invalid structure document: {0}")]
    Document(String),
}

impl DplError {
    /// Resource errors map to a dedicated CLI exit code.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            DplError::VocabularyTooWide { .. } | DplError::FreshLimit { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    Expected(&'static str),
    UndeclaredAction(String),
    UndeclaredProposition(String),
    NotAProposition(String),
    ReservedIdentifier(String),
    NameClash(String),
    EquationUnderModality,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected `{t}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::UndeclaredAction(n) => write!(f, "undeclared action `{n}`"),
            ParseErrorKind::UndeclaredProposition(n) => {
                write!(f, "undeclared proposition `{n}`")
            }
            ParseErrorKind::NotAProposition(n) => {
                write!(f, "`{n}` is an action and cannot be used as a proposition")
            }
            ParseErrorKind::ReservedIdentifier(n) => {
                write!(f, "identifier `{n}` is reserved (leading underscore)")
            }
            ParseErrorKind::NameClash(n) => {
                write!(f, "`{n}` is used both as an action and as a proposition")
            }
            ParseErrorKind::EquationUnderModality => {
                write!(f, "action equations are not allowed under a modality")
            }
        }
    }
}

/// A parse failure with its byte offset and 1-based line/column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub(crate) fn at(text: &str, offset: usize, kind: ParseErrorKind) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            kind,
            offset,
            line,
            column,
        }
    }
}
