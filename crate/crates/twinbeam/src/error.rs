use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration problem; `key` names the offending setting when known.
    #[error("configuration error{}: {reason}", KeyHint(.key))]
    Config { key: Option<String>, reason: String },
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Fock-space truncation leaves too much probability outside the cutoff.
    #[error("cutoff error: {0}")]
    Cutoff(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

struct KeyHint<'a>(&'a Option<String>);

impl fmt::Display for KeyHint<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(k) => write!(f, " in `{k}`"),
            None => Ok(()),
        }
    }
}

impl Error {
    pub fn config(reason: impl Into<String>) -> Self {
        Error::Config { key: None, reason: reason.into() }
    }

    pub fn config_key(key: &str, reason: impl Into<String>) -> Self {
        Error::Config { key: Some(key.to_string()), reason: reason.into() }
    }

    pub fn domain(reason: impl Into<String>) -> Self {
        Error::Domain(reason.into())
    }

    pub fn numeric(reason: impl Into<String>) -> Self {
        Error::Numeric(reason.into())
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 3,
            Error::Config { .. } => 4,
            Error::Numeric(_) => 5,
            Error::Cutoff(_) => 6,
            Error::Io(_) => 7,
        }
    }
}
