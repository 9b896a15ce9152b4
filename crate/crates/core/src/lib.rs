//! Exact invariants of cyclic quotient surface singularities `X(d; 1, q)`.

pub mod arith;
pub mod error;
pub mod germs;
pub mod invariants;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod rational;
pub mod resolution;

pub use arith::{Decomposition, NormalizedSingularity, QMatrix, RawType};
pub use error::{Error, Result};
pub use rational::Rational;
