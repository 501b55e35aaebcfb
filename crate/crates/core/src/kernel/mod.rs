//! Exact-arithmetic and special-function substrate.
//!
//! Everything downstream of this module is either a finite combination of the
//! primitives defined here (Stirling numbers, rising factorials, binomials,
//! the integer-gap Tricomi U function) or floating-point plumbing built on
//! [`ln_gamma`]. Integer-valued quantities are kept in arbitrary precision:
//! Stirling numbers of the first kind overflow `u64` before order 21.

mod gamma;
mod stirling;
mod tricomi;

pub use gamma::ln_gamma;
pub use stirling::{binomial, factorial, rising_factorial, stirling1_unsigned, StirlingTable};
pub use tricomi::{ln_tricomi_moment_sum, tricomi_u_integer_gap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Arbitrary-precision rational scalar.
///
/// Always stored reduced to lowest terms with a positive denominator (the
/// backing `Ratio` type normalizes on construction), so rational arithmetic
/// here is closed and exact.
pub type ExactRational = BigRational;

/// Build a rational from a signed numerator and positive denominator.
pub fn rational(numer: i64, denom: u64) -> Result<ExactRational> {
    if denom == 0 {
        return Err(Error::Domain("rational denominator must be positive".into()));
    }
    Ok(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
}

/// Parse a fraction literal `p/q` (or a bare integer `p`).
pub fn parse_fraction(text: &str) -> Result<ExactRational> {
    let err = || Error::Domain(format!("invalid fraction literal {text:?}, expected p/q"));
    let mut parts = text.splitn(2, '/');
    let numer: BigInt = parts.next().ok_or_else(err)?.trim().parse().map_err(|_| err())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| err())?,
        None => BigInt::one(),
    };
    if denom.is_zero() || denom.is_negative() {
        return Err(Error::Domain(format!(
            "fraction {text:?} must have a positive denominator"
        )));
    }
    Ok(BigRational::new(numer, denom))
}

/// Render a rational as `p/q` (or `p` when integral).
pub fn format_fraction(q: &ExactRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Nearest-f64 conversion.
pub fn rational_to_f64(q: &ExactRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Scalar kinds the moment machinery is generic over: `f64` on the floating
/// route and [`ExactRational`] on the exact route.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_big(v: &BigInt) -> Self;
    fn from_u64(v: u64) -> Self;
    fn to_f64_lossy(&self) -> f64;

    /// Nonnegative integer power by repeated multiplication.
    fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_big(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    fn powu(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

impl Scalar for ExactRational {
    fn from_big(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }
}
