//! Exact arithmetic: rationals, sparse multivariate polynomials,
//! interpolation and finite-difference coefficient extraction.

mod findiff;
mod interp;
mod poly;

pub use findiff::{finite_difference_extract, stencil_points};
pub use interp::{faulhaber_sum, lagrange_interpolate};
pub use poly::{Binding, MultiPoly};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::Parse(format!("rational {s:?}: {e}")))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Values that can be combined linearly with rational weights.
pub trait LinearValue: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, factor: &Rational);
}

/// Coefficient ring of a tautological class.
pub trait Coefficient: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn coeff_is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn scale(&self, s: &Rational) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn to_text(&self) -> String;
    fn from_text(s: &str) -> Result<Self>;
}

impl LinearValue for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        *self += other * factor;
    }
}

impl Coefficient for Rational {
    fn coeff_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn scale(&self, s: &Rational) -> Self {
        self * s
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn from_text(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}
