use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::AlgebraError;
use crate::Scalar;

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn imag_unit() -> Scalar {
    Complex::new(BigRational::zero(), BigRational::one())
}

/// Real scalar `n/d`.
pub fn scalar_from_ratio(n: i64, d: i64) -> Scalar {
    Complex::new(rational(n, d), BigRational::zero())
}

/// Parses `"p"` or `"p/q"` with arbitrary-precision integers. No floating
/// forms are accepted.
pub fn parse_rational(text: &str) -> Result<BigRational, AlgebraError> {
    let bad = || AlgebraError::Parse(text.to_string());
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    Ok(BigRational::new(num, den))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ScalarOp) -> Result<Scalar, AlgebraError> {
    Ok(match op {
        ScalarOp::Add => a + b,
        ScalarOp::Sub => a - b,
        ScalarOp::Mul => a * b,
        ScalarOp::Div => {
            if b.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            a / b
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let i = imag_unit();
        assert_eq!(scalar_arith(&i, &i, ScalarOp::Mul).unwrap(), scalar_from_ratio(-1, 1));
    }

    #[test]
    fn rational_parts_stay_reduced() {
        let sum = scalar_arith(&scalar_from_ratio(1, 2), &scalar_from_ratio(1, 3), ScalarOp::Add).unwrap();
        assert_eq!(sum, scalar_from_ratio(5, 6));
        let two_i = imag_unit() * scalar_from_ratio(2, 1);
        let p = scalar_arith(&two_i, &scalar_from_ratio(3, 2), ScalarOp::Mul).unwrap();
        assert_eq!(p, imag_unit() * scalar_from_ratio(3, 1));
        assert_eq!(rational(4, -6), rational(-2, 3));
        assert_eq!(*rational(4, -6).denom(), BigInt::from(3));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let r = scalar_arith(&imag_unit(), &Scalar::zero(), ScalarOp::Div);
        assert_eq!(r, Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_rational("-3/6").unwrap(), rational(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), rational(7, 1));
        assert!(parse_rational("0.5").is_err());
        assert_eq!(parse_rational("1/0"), Err(AlgebraError::DivisionByZero));
    }
}
