use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller handed in something inconsistent with the instance.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A search or enumeration cap was hit. `lower_bound` is set when the
    /// failing search proved something about the true value.
    #[error("budget exceeded: {what}")]
    Budget {
        what: String,
        lower_bound: Option<usize>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn budget(what: impl Into<String>) -> Self {
        Error::Budget {
            what: what.into(),
            lower_bound: None,
        }
    }

    /// Wraps budget errors with extra context, leaving other variants alone.
    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            Error::Budget { what, lower_bound } => Error::Budget {
                what: format!("{ctx}: {what}"),
                lower_bound,
            },
            Error::Input(m) => Error::Input(format!("{ctx}: {m}")),
            Error::Invariant(m) => Error::Invariant(format!("{ctx}: {m}")),
            other => other,
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Budget { .. } => 3,
            Error::Invariant(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
