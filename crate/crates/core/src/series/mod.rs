//! Truncated power series, Bell polynomials and the closed-form
//! coefficient formulas built from them.

mod bell;
mod coefficients;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::Ring;

pub use bell::{bell_partial, bell_table};
pub(crate) use bell::{binomial, factorial};
pub use coefficients::{
    adiabatic_coeffs, bn_closed_form, fc_functional_residual, bn_closed_forms, fc_series, fuss_catalan, g_explicit, sn_bell_formula,
    sn_bell_terms, vertex_coefficients, SnBell, VertexCoefficients,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("B_{{{n},{k}}} needs {} arguments, got {have}", n + 1 - k)]
    InsufficientBellArgs { n: usize, k: usize, have: usize },
    #[error("inner series must have zero constant term")]
    NonzeroConstant,
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("linear coefficient is not invertible")]
    NotInvertible,
}

/// `c_0 + c_1 t + ... + c_N t^N`, exact modulo `t^{N+1}`.
#[derive(Clone, PartialEq)]
pub struct PowerSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> PowerSeries<R> {
    /// Pads with zeros or truncates to `order`.
    pub fn new(mut coeffs: Vec<R>, order: usize) -> Self {
        coeffs.resize(order + 1, R::zero());
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::new(vec![R::one()], order)
    }

    /// The series `t`.
    pub fn identity(order: usize) -> Self {
        Self::new(vec![R::zero(), R::one()], order)
    }

    /// `t + a_1 t^2 + a_2 t^3 + ...` from `a = [a_0 = 1, a_1, ...]`.
    pub fn from_shifted(a: &[R], order: usize) -> Self {
        let mut c = vec![R::zero()];
        c.extend(a.iter().take(order).cloned());
        Self::new(c, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &R {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn same_order(&self, other: &Self) -> Result<usize, SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        Ok(self.order())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.same_order(other)?;
        Ok(Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(), n))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.same_order(other)?;
        Ok(Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(), n))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.same_order(other)?;
        Ok(self.mul_unchecked(other, n))
    }

    fn mul_unchecked(&self, other: &Self, n: usize) -> Self {
        let mut out = vec![R::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Self::new(out, n)
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(), self.order())
    }

    pub fn pow(&self, k: usize) -> Self {
        let n = self.order();
        (0..k).fold(Self::one(n), |acc, _| acc.mul_unchecked(self, n))
    }

    /// `f(g)` by Faà di Bruno: `[t^n] f(g) = sum_k f_k k!/n! B_{n,k}(1! g_1, 2! g_2, ...)`.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        let n = self.same_order(g)?;
        if !g.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let args: Vec<R> = (1..=n).map(|j| R::from_bigint(&factorial(j)) * g.coeffs[j].clone()).collect();
        let table = bell_table(n, &args);
        let mut out = vec![self.coeffs[0].clone()];
        for (m, row) in table.iter().enumerate().skip(1) {
            let mut acc = R::zero();
            for k in 1..=m {
                if self.coeffs[k].is_zero() || row[k].is_zero() {
                    continue;
                }
                acc = acc + R::from_bigint(&factorial(k)) * self.coeffs[k].clone() * row[k].clone();
            }
            out.push(acc * R::from_rational(&BigRational::new(One::one(), factorial(m))));
        }
        Ok(Self::new(out, n))
    }

    /// `f(g)` by truncated substitution `sum_k f_k g^k`; independent of the
    /// Bell machinery and used as its oracle.
    pub fn compose_naive(&self, g: &Self) -> Result<Self, SeriesError> {
        let n = self.same_order(g)?;
        if !g.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let mut out = Self::zero(n);
        let mut power = Self::one(n);
        for k in 0..=n {
            out = out.add(&power.scale(&self.coeffs[k]))?;
            power = power.mul_unchecked(g, n);
        }
        Ok(out)
    }

    /// Compositional inverse by Lagrange inversion. With `f = f_1 h` and
    /// `h` tangent to the identity,
    /// `(h^-1)_n = 1/n! sum_{k=1}^{n-1} B_{n-1+k,k}(0, -2! h_2, -3! h_3, ...)`
    /// and `(f^-1)_n = (h^-1)_n f_1^-n`.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let n = self.order();
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        if n == 0 {
            return Ok(Self::zero(0));
        }
        let f1_inv = self.coeffs[1].try_inv().ok_or(SeriesError::NotInvertible)?;
        let mut args = vec![R::zero()];
        for j in 2..=n {
            args.push(-(R::from_bigint(&factorial(j)) * self.coeffs[j].clone() * f1_inv.clone()));
        }
        let table = bell_table(2 * n - 1, &args);
        let mut out = vec![R::zero(), f1_inv.clone()];
        let mut f1_pow = f1_inv.clone();
        for m in 2..=n {
            f1_pow = f1_pow * f1_inv.clone();
            let mut acc = R::zero();
            for k in 1..m {
                acc = acc + table[m - 1 + k][k].clone();
            }
            out.push(acc * R::from_rational(&BigRational::new(One::one(), factorial(m))) * f1_pow.clone());
        }
        Ok(Self::new(out, n))
    }
}

impl<R: Ring + fmt::Display> fmt::Display for PowerSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

impl<R: Ring> fmt::Debug for PowerSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Symbol;
    use crate::{Poly, Rf};

    fn a(j: u32) -> Rf {
        Rf::var(Symbol::DiffeoCoeff(j))
    }

    fn int(n: i64) -> Rf {
        Rf::from_int(n)
    }

    #[test]
    fn compose_with_identity() {
        let f = PowerSeries::new(vec![int(0), int(1), int(1)], 4);
        let t = PowerSeries::identity(4);
        assert_eq!(f.compose(&t).unwrap(), f);
        assert_eq!(t.compose(&f).unwrap(), f);
    }

    #[test]
    fn compose_square() {
        let f = PowerSeries::new(vec![int(0), int(0), int(1)], 5);
        let g = PowerSeries::new(vec![int(0), int(1), a(1)], 5);
        let expect = PowerSeries::new(vec![int(0), int(0), int(1), a(1).scale(&crate::algebra::scalar_from_ratio(2, 1)), a(1).pow(2)], 5);
        assert_eq!(f.compose(&g).unwrap(), expect);
        assert_eq!(f.compose_naive(&g).unwrap(), expect);
    }

    #[test]
    fn invert_quadratic() {
        let f = PowerSeries::new(vec![int(0), int(1), a(1)], 5);
        let g = f.invert().unwrap();
        let c = |k: i64, p: u32| a(1).pow(p).scale(&crate::algebra::scalar_from_ratio(k, 1));
        let expect = PowerSeries::new(vec![int(0), int(1), c(-1, 1), c(2, 2), c(-5, 3), c(14, 4)], 5);
        assert_eq!(g, expect);
        assert_eq!(g.compose(&f).unwrap(), PowerSeries::identity(5));
    }

    #[test]
    fn invert_scaled_linear_term() {
        let f = PowerSeries::new(vec![int(0), int(2), int(3), int(-1)], 6);
        let g = f.invert().unwrap();
        assert_eq!(g.compose(&f).unwrap(), PowerSeries::identity(6));
        assert_eq!(f.compose(&g).unwrap(), PowerSeries::identity(6));
    }

    #[test]
    fn precondition_errors() {
        let g = PowerSeries::new(vec![int(1), int(1)], 3);
        assert_eq!(g.compose(&g), Err(SeriesError::NonzeroConstant));
        assert_eq!(g.invert(), Err(SeriesError::NonzeroConstant));
        let h = PowerSeries::new(vec![int(0), Rf::from(Poly::var(Symbol::DiffeoCoeff(1)))], 3);
        assert_eq!(h.invert(), Err(SeriesError::NotInvertible));
        assert_eq!(g.add(&PowerSeries::zero(2)), Err(SeriesError::OrderMismatch(3, 2)));
    }
}
