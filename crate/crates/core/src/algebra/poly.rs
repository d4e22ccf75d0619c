use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::symbol::Symbol;
use super::{DisplayCoeff, Ring};

/// Sparse multivariate polynomial. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Ring> Polynomial<C> {
    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn var(s: Symbol) -> Self {
        Self::term(Monomial::var(s), C::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(C::from_int(n))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::constant(C::from_bigint(n))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self::constant(C::from_rational(q))
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, C)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn as_constant(&self) -> Option<C> {
        self.is_constant().then(|| self.coeff(&Monomial::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(m, d)| (m.clone(), d.clone() * c.clone())))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial { terms: self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect() }
    }

    /// Exact division by a monomial dividing every term.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (n, c) in &self.terms {
            terms.insert(n.div(m)?, c.clone());
        }
        Some(Polynomial { terms })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficient of `s^k`, as a polynomial in the remaining symbols.
    pub fn coefficient_of(&self, s: Symbol, k: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(s) == k)
                .map(|(m, c)| (m.without(s), c.clone())),
        )
    }

    /// Smallest exponent of `s` over all terms, 0 for the zero polynomial.
    pub fn min_exponent(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).min().unwrap_or(0)
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn total_degree_in(&self, pred: impl Fn(Symbol) -> bool) -> u32 {
        self.terms
            .keys()
            .map(|m| m.factors().iter().filter(|(s, _)| pred(*s)).map(|&(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    /// Greatest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|&(s, _)| s)).collect()
    }

    pub fn contains_symbol(&self, pred: impl Fn(Symbol) -> bool) -> bool {
        self.terms.keys().any(|m| m.factors().iter().any(|&(s, _)| pred(s)))
    }

    /// Sets every symbol matching `pred` to zero.
    pub fn drop_symbols(&self, pred: impl Fn(Symbol) -> bool) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.factors().iter().any(|&(s, _)| pred(s)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Evaluates into any ring containing `C`'s values, one symbol at a time.
    /// Unbound symbols stay symbolic when `R` is a polynomial ring.
    pub fn eval_with<R: Ring>(&self, coeff: impl Fn(&C) -> R, value: impl Fn(Symbol) -> R) -> R {
        let mut cache: BTreeMap<(Symbol, u32), R> = BTreeMap::new();
        let mut acc = R::zero();
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for &(s, e) in m.factors() {
                let p = cache
                    .entry((s, e))
                    .or_insert_with(|| {
                        let v = value(s);
                        (1..e).fold(v.clone(), |acc, _| acc * v.clone())
                    })
                    .clone();
                t = t * p;
            }
            acc = acc + t;
        }
        acc
    }

    /// Polynomial substitution; symbols without a binding are kept.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Polynomial<C>>) -> Self {
        if !self.symbols().iter().any(|s| bindings.contains_key(s)) {
            return self.clone();
        }
        self.eval_with(|c| Self::constant(c.clone()), |s| bindings.get(&s).cloned().unwrap_or_else(|| Self::var(s)))
    }
}

impl<C: Ring + DisplayCoeff> Polynomial<C> {
    fn write_term(out: &mut String, first: bool, m: &Monomial, c: &C) {
        let (neg, mag) = c.coeff_parts();
        if neg {
            out.push('-');
        } else if !first {
            out.push('+');
        }
        if m.is_one() {
            out.push_str(&mag);
        } else if mag == "1" {
            out.push_str(&m.to_string());
        } else {
            out.push_str(&mag);
            out.push('*');
            out.push_str(&m.to_string());
        }
    }

    /// Like `Display`, but terms that differ only in a single linear edge
    /// factor are grouped: `2*i*a1*(x1+x2+x3)`.
    pub fn to_collected_string(&self) -> String {
        if self.is_empty() {
            return "0".into();
        }
        let mut groups: Vec<(Monomial, C, Vec<Symbol>)> = Vec::new();
        let mut plain: Vec<(Monomial, C)> = Vec::new();
        for (m, c) in &self.terms {
            let (edges, rest) = m.split(Symbol::is_edge);
            match edges.factors() {
                [(e, 1)] => match groups.iter_mut().find(|(r, d, _)| *r == rest && d == c) {
                    Some(g) => g.2.push(*e),
                    None => groups.push((rest, c.clone(), vec![*e])),
                },
                _ => plain.push((m.clone(), c.clone())),
            }
        }
        let mut out = String::new();
        for (m, c) in &plain {
            { let first = out.is_empty(); Self::write_term(&mut out, first, m, c); }
        }
        for (rest, c, edges) in groups {
            if edges.len() == 1 {
                { let first = out.is_empty(); Self::write_term(&mut out, first, &rest.mul(&Monomial::var(edges[0])), &c); }
                continue;
            }
            let sum = edges.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("+");
            let (neg, mag) = c.coeff_parts();
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mut head = Vec::new();
            if mag != "1" {
                head.push(mag);
            }
            if !rest.is_one() {
                head.push(rest.to_string());
            }
            head.push(format!("({sum})"));
            out.push_str(&head.join("*"));
        }
        out
    }
}

impl<C: Ring + DisplayCoeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (m, c) in &self.terms {
            { let first = out.is_empty(); Self::write_term(&mut out, first, m, c); }
        }
        f.write_str(&out)
    }
}

impl<C: Ring> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(m, c)| (m.to_string(), c))).finish()
    }
}

impl<C: Ring> Zero for Polynomial<C> {
    fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Ring> One for Polynomial<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<C: Ring> AddAssign<&Polynomial<C>> for Polynomial<C> {
    fn add_assign(&mut self, rhs: &Polynomial<C>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<C: Ring> SubAssign<&Polynomial<C>> for Polynomial<C> {
    fn sub_assign(&mut self, rhs: &Polynomial<C>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<C: Ring> Add<&Polynomial<C>> for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Ring> Sub<&Polynomial<C>> for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Ring> Mul<&Polynomial<C>> for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.add_term(m.mul(n), c.clone() * d.clone());
            }
        }
        out
    }
}

impl<C: Ring> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<C: Ring> Add for Polynomial<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        if self.terms.len() < rhs.terms.len() {
            let mut rhs = rhs;
            rhs += &self;
            return rhs;
        }
        self += &rhs;
        self
    }
}

impl<C: Ring> Sub for Polynomial<C> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<C: Ring> Mul for Polynomial<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<C: Ring> Neg for Polynomial<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Polynomial { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<C: Ring> Ring for Polynomial<C> {
    fn from_rational(q: &BigRational) -> Self {
        Self::constant(C::from_rational(q))
    }

    fn try_inv(&self) -> Option<Self> {
        self.as_constant()?.try_inv().map(Self::constant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{imag_unit, LegSet};
    use crate::Poly;

    fn a(j: u32) -> Poly {
        Poly::var(Symbol::DiffeoCoeff(j))
    }

    fn x(j: u8) -> Poly {
        Poly::var(Symbol::edge(LegSet::single(j)))
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(&(&a(1) + &a(2)) + &(-&a(1)), a(2));
        assert_eq!(&a(1) * &a(1), a(1).pow(2));
        assert!((&(&x(1) + &x(2)) * &Poly::zero()).is_zero());
    }

    #[test]
    fn canonical_printing() {
        let b3 = &a(2).scale(&crate::algebra::scalar_from_ratio(-6, 1)) + &a(1).pow(2).scale(&crate::algebra::scalar_from_ratio(12, 1));
        assert_eq!(b3.to_string(), "-6*a2+12*a1^2");
        let iv3 = (&(&x(1) + &x(2)) + &x(3)).mul_monomial(&Monomial::var(Symbol::DiffeoCoeff(1)));
        let iv3 = iv3.scale(&(imag_unit() * crate::algebra::scalar_from_ratio(2, 1)));
        assert_eq!(iv3.to_collected_string(), "2*i*a1*(x1+x2+x3)");
        assert_eq!(iv3.to_string(), "2*i*a1*x1+2*i*a1*x2+2*i*a1*x3");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn coefficient_extraction() {
        let l3 = Symbol::Coupling(3);
        let p = Poly::var(l3).mul_monomial(&Monomial::var(Symbol::DiffeoCoeff(1))).scale(&(imag_unit() * crate::algebra::scalar_from_ratio(-12, 1)));
        assert_eq!(p.coefficient_of(l3, 1), a(1).scale(&(imag_unit() * crate::algebra::scalar_from_ratio(-12, 1))));
        assert!((&x(1) + &x(2)).coefficient_of(l3, 1).is_zero());
        let q = a(1).pow(2).mul_monomial(&Monomial::power(l3, 2));
        assert_eq!(q.coefficient_of(l3, 2), a(1).pow(2));
    }

    #[test]
    fn substitution_keeps_unbound_symbols() {
        let p = &x(1) + &x(2).mul_monomial(&Monomial::var(Symbol::DiffeoCoeff(1)));
        let mut b = BTreeMap::new();
        b.insert(Symbol::DiffeoCoeff(1), &a(2) + &Poly::one());
        let q = p.substitute(&b);
        assert_eq!(q, &(&x(1) + &x(2)) + &(&x(2) * &a(2)));
    }
}
