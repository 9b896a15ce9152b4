use std::fmt::Debug;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("action ({d};{a},{b}) is not small; normalize the type first")]
    NonSmallAction { d: i64, a: i64, b: i64 },

    #[error("monomial {monomial} lies in class {found}, expected class {expected}")]
    ClassMismatch {
        monomial: String,
        found: i64,
        expected: i64,
    },

    #[error(
        "mixed classes: {first} is in class {first_class} but {second} is in class {second_class}"
    )]
    MixedClasses {
        first: String,
        first_class: i64,
        second: String,
        second_class: i64,
    },

    #[error("inner polygon is not contained in the outer one (vertex {0})")]
    NotContained(String),

    #[error("diagram is not convenient: it does not reach the {0} axis")]
    NotConvenient(&'static str),

    #[error("quotient is infinite-dimensional: no generator on the {0} axis")]
    InfiniteQuotient(&'static str),

    #[error("identical curvettes have infinite intersection multiplicity")]
    InfiniteIntersection,

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("the zero polynomial does not define a germ")]
    ZeroPolynomial,

    #[error("route mismatch in {what}: {left} != {right}")]
    RouteMismatch {
        what: String,
        left: String,
        right: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Route disagreements point at a bug in the library rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::RouteMismatch { .. })
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Returns `left` when both routes agree, a `RouteMismatch` otherwise.
pub fn agree<T: PartialEq + Debug>(what: &str, left: T, right: T) -> Result<T> {
    if left == right {
        Ok(left)
    } else {
        Err(Error::RouteMismatch {
            what: what.to_string(),
            left: format!("{left:?}"),
            right: format!("{right:?}"),
        })
    }
}
