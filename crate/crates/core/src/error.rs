use thiserror::Error;

use crate::term::TermError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Term(#[from] TermError),
    /// Input text that does not follow the expected syntax.
    #[error("{0}")]
    Syntax(String),
    /// Well-formed input that makes no sense for the model or domain at hand.
    #[error("{0}")]
    Semantic(String),
}

impl Error {
    pub fn syntax(msg: impl Into<String>) -> Self {
        Error::Syntax(msg.into())
    }

    pub fn semantic(msg: impl Into<String>) -> Self {
        Error::Semantic(msg.into())
    }

    /// Prefixes the message with a location such as a line number.
    pub fn at(self, location: impl std::fmt::Display) -> Self {
        match self {
            Error::Term(TermError::UnknownAtom { name, .. }) => {
                Error::Semantic(format!("{location}: unknown atom `{name}`"))
            }
            Error::Term(e) => Error::Syntax(format!("{location}: {e}")),
            Error::Syntax(m) => Error::Syntax(format!("{location}: {m}")),
            Error::Semantic(m) => Error::Semantic(format!("{location}: {m}")),
        }
    }

    /// True for errors caused by malformed text rather than by its meaning.
    pub fn is_parse(&self) -> bool {
        match self {
            Error::Term(TermError::UnknownAtom { .. }) => false,
            Error::Term(_) | Error::Syntax(_) => true,
            Error::Semantic(_) => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
