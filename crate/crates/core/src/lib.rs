//! Exact symbolic computation of Givental-type deformations of tau-symmetric
//! hierarchies: jet calculus, matrix differential operators, genus-zero
//! data, the r- and s-action on two-point functions and Poisson brackets,
//! and the KdV base point.

#![allow(clippy::needless_range_loop)]

pub mod bracket;
pub mod diffop;
pub mod error;
pub mod genus0;
pub mod givental;
pub mod jetcalc;
pub mod kdvbase;
pub mod par;
pub mod verify;

pub use error::{Error, JetError, Result};

/// Exact rationals used for every coefficient.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
