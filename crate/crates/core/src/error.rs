use thiserror::Error;

/// Errors produced by the library. Every variant maps to a stable code used
/// as the diagnostic prefix by the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("ontology contains a cycle through term {0}")]
    Cycle(String),

    #[error("duplicate term id {0}")]
    DuplicateTerm(String),

    #[error("unknown term {0}")]
    UnknownTerm(String),

    #[error("annotation of protein {0} is not closed under ancestors")]
    Inconsistent(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("terms span multiple namespaces: {0}")]
    Namespace(String),

    #[error("term {0} has no accretion entry")]
    MissingAccretion(String),

    #[error("invalid distance matrix: {0}")]
    Matrix(String),

    #[error("invalid newick: {0}")]
    Newick(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Stable short code, e.g. `E-PARSE`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "E-PARSE",
            Error::Cycle(_) => "E-CYCLE",
            Error::DuplicateTerm(_) => "E-DUPLICATE",
            Error::UnknownTerm(_) => "E-UNKNOWN-TERM",
            Error::Inconsistent(_) => "E-INCONSISTENT",
            Error::Parameter(_) => "E-PARAM",
            Error::Domain(_) => "E-DOMAIN",
            Error::Namespace(_) => "E-NAMESPACE",
            Error::MissingAccretion(_) => "E-MISSING-IA",
            Error::Matrix(_) => "E-MATRIX",
            Error::Newick(_) => "E-NEWICK",
            Error::Io(_) => "E-IO",
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
