use thiserror::Error;

/// Which side a coset relation was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} too large: {value} exceeds bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("invalid permutation: {0}")]
    InvalidPerm(String),

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("element {element} has no {side} maximum *subgroup")]
    NoMaximum { element: usize, side: Side },

    #[error("*subgroups {0} and {1} have no meet")]
    NoMeet(usize, usize),

    #[error("element {0} is not a *subgroup")]
    NotSubgroup(usize),

    #[error("element {0} has no inverse")]
    NoInverse(usize),

    #[error("element {0} has more than one inverse")]
    NonUniqueInverse(usize),

    #[error("product of {0} and {1} has no least upper element")]
    NoLeastProduct(usize, usize),

    #[error("*subgroup {0} is not normal")]
    NotNormal(usize),

    #[error("the *subgroup order has no minimum")]
    NoMinimumSubgroup,

    #[error("structural violation: {0}")]
    Structural(String),

    #[error("filter product is not associative on ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn bound(what: &'static str, value: usize, bound: usize) -> Self {
        Error::BoundExceeded { what, value, bound }
    }

    /// True for errors caused by malformed input rather than by a failing check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidPerm(_) | Error::DegreeMismatch { .. } | Error::Invalid(_) | Error::Io(_) | Error::Parse(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
