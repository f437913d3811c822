//! Exact arithmetic: rationals and sparse Laurent differentials.

mod laurent;
mod rational;

pub use laurent::{Exponents, LaurentDifferential, Variable};
pub use rational::{double_factorial_odd, factorial, Rational};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("variable sets differ: [{left}] vs [{right}]")]
    VariableMismatch { left: String, right: String },
    #[error("form degree of {variable} differs: {left} vs {right}")]
    FormDegreeMismatch {
        variable: String,
        left: i32,
        right: i32,
    },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("exponent vector has arity {found}, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("unrenormalized diagonal: identifying {left} with {right} evaluates a kernel on its pole")]
    UnrenormalizedDiagonal { left: String, right: String },
    #[error("residue in {variable} needs differential weight 1, found {weight}")]
    ResidueWeight { variable: String, weight: i32 },
    #[error("rename would merge variable {0}")]
    RenameCollision(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}
