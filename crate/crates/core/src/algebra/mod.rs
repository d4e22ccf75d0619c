//! Exact scalar, polynomial and rational-function arithmetic.
//!
//! Everything here is generic over a [`Ring`] of coefficients; the concrete
//! instantiation used by the physics layers is the Gaussian-rational
//! [`Scalar`](crate::Scalar) re-exported at the crate root.

mod legs;
mod monomial;
mod poly;
mod rational;
mod scalar;
mod symbol;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};
use thiserror::Error;

pub use legs::{Leg, LegSet};
pub use monomial::Monomial;
pub use poly::Polynomial;
pub use rational::{Bindings, RationalFunction};
pub use scalar::{imag_unit, parse_rational, rational, scalar_arith, scalar_from_ratio, ScalarOp};
pub use symbol::{EdgeFlavor, GenericId, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("binding sends denominator factor {0} to zero")]
    DenominatorAnnihilated(Symbol),
    #[error("binding for denominator factor {0} is not an invertible monomial")]
    NonMonomialDenominator(Symbol),
    #[error("symbol {0} cannot appear in a denominator")]
    InvalidDenominator(Symbol),
    #[error("value is not a constant: {0}")]
    NotConstant(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// Commutative ring containing the rationals.
///
/// All coefficient domains in this crate are Q-algebras, so embedding a
/// rational is always possible. `try_inv` returns `None` for non-units.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
{
    fn from_rational(q: &BigRational) -> Self;

    fn try_inv(&self) -> Option<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn from_bigint(n: &BigInt) -> Self {
        Self::from_rational(&BigRational::from_integer(n.clone()))
    }
}

/// A ring whose non-zero elements are all invertible.
pub trait Field: Ring {}

impl Ring for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn try_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}
impl Field for BigRational {}

impl Ring for f64 {
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn try_inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}
impl Field for f64 {}

impl Ring for f32 {
    fn from_rational(q: &BigRational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }

    fn try_inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}
impl Field for f32 {}

impl<T> Ring for Complex<T>
where
    T: Ring + Num,
{
    fn from_rational(q: &BigRational) -> Self {
        Complex::new(T::from_rational(q), T::zero())
    }

    fn try_inv(&self) -> Option<Self> {
        let norm = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        let inv = norm.try_inv()?;
        Some(Complex::new(self.re.clone() * inv.clone(), -(self.im.clone() * inv)))
    }
}
impl<T: Field + Num> Field for Complex<T> {}

/// Sign and magnitude rendering used by the canonical printer.
pub trait DisplayCoeff {
    /// Returns `(negative, magnitude)`. A magnitude of `"1"` is elided in
    /// front of a non-trivial monomial.
    fn coeff_parts(&self) -> (bool, String);
}

impl DisplayCoeff for BigRational {
    fn coeff_parts(&self) -> (bool, String) {
        let neg = *self.numer() < BigInt::zero();
        let abs = if neg { -self.clone() } else { self.clone() };
        (neg, abs.to_string())
    }
}

impl DisplayCoeff for f64 {
    fn coeff_parts(&self) -> (bool, String) {
        (*self < 0.0, self.abs().to_string())
    }
}

impl<T> DisplayCoeff for Complex<T>
where
    T: Ring + Num + DisplayCoeff,
{
    fn coeff_parts(&self) -> (bool, String) {
        if self.im.is_zero() {
            return self.re.coeff_parts();
        }
        if self.re.is_zero() {
            let (neg, mag) = self.im.coeff_parts();
            let mag = if mag == "1" { "i".to_string() } else { format!("{mag}*i") };
            return (neg, mag);
        }
        let (re_neg, re_mag) = self.re.coeff_parts();
        let (im_neg, im_mag) = self.im.coeff_parts();
        let re = if re_neg { format!("-{re_mag}") } else { re_mag };
        let im = if im_mag == "1" { "i".to_string() } else { format!("{im_mag}*i") };
        let sign = if im_neg { "-" } else { "+" };
        (false, format!("({re}{sign}{im})"))
    }
}
