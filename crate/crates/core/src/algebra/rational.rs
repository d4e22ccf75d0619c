use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::poly::Polynomial;
use super::symbol::Symbol;
use super::{AlgebraError, DisplayCoeff, Field, Ring};

/// Substitution map for [`RationalFunction::substitute`].
pub type Bindings<C> = BTreeMap<Symbol, RationalFunction<C>>;

/// A Laurent polynomial in the denominator-kind symbols (edge variables and
/// `x_p`): a sum of terms `c * top / bottom` with monomials `top`, `bottom`.
///
/// Invariant: each term is reduced (`gcd(top, bottom) = 1`), `bottom` holds
/// only denominator-kind symbols and no coefficient is zero. Terms are keyed
/// by `(bottom, top)`, so the representation is unique and structural
/// equality is equality of functions. Keeping terms separate avoids the
/// common-denominator growth of sums over many trees.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalFunction<C> {
    terms: BTreeMap<(Monomial, Monomial), C>,
}

fn reduce_pair(top: Monomial, bottom: Monomial) -> (Monomial, Monomial) {
    if bottom.is_one() {
        return (top, bottom);
    }
    let g = top.gcd(&bottom);
    if g.is_one() {
        return (top, bottom);
    }
    (top.div(&g).expect("gcd divides"), bottom.div(&g).expect("gcd divides"))
}

impl<C: Ring> RationalFunction<C> {
    fn insert(&mut self, top: Monomial, bottom: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        let key = reduce_pair(top, bottom);
        match self.terms.entry((key.1, key.0)) {
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

    pub fn try_new(num: Polynomial<C>, den: Monomial) -> Result<Self, AlgebraError> {
        if let Some(&(s, _)) = den.factors().iter().find(|(s, _)| !s.is_denominator_kind()) {
            return Err(AlgebraError::InvalidDenominator(s));
        }
        let mut out = Self::zero();
        for (m, c) in num.into_terms() {
            out.insert(m, den.clone(), c);
        }
        Ok(out)
    }

    pub fn constant(c: C) -> Self {
        Polynomial::constant(c).into()
    }

    pub fn var(s: Symbol) -> Self {
        Polynomial::var(s).into()
    }

    pub fn from_int(n: i64) -> Self {
        Polynomial::from_int(n).into()
    }

    /// `1 / s`.
    pub fn reciprocal_of(s: Symbol) -> Result<Self, AlgebraError> {
        Self::try_new(Polynomial::one(), Monomial::var(s))
    }

    /// Number of reduced terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms as `(top, bottom, coefficient)`, polynomial part first.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &C)> {
        self.terms.iter().map(|((b, t), c)| (t, b, c))
    }

    /// Least common denominator of all terms.
    pub fn denominator(&self) -> Monomial {
        self.terms.keys().fold(Monomial::one(), |acc, (b, _)| acc.lcm(b))
    }

    /// Numerator over [`Self::denominator`].
    pub fn numerator(&self) -> Polynomial<C> {
        let den = self.denominator();
        Polynomial::from_terms(self.terms.iter().map(|((b, t), c)| (t.mul(&den.div(b).expect("lcm")), c.clone())))
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|(b, _)| b.is_one())
    }

    pub fn as_polynomial(&self) -> Option<Polynomial<C>> {
        self.is_polynomial().then(|| Polynomial::from_terms(self.terms.iter().map(|((_, t), c)| (t.clone(), c.clone()))))
    }

    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let ((b, t), c) = self.terms.iter().next()?;
                (b.is_one() && t.is_one()).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Checks the representation invariants; used by property tests.
    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|((b, t), c)| {
            !c.is_zero() && t.gcd(b).is_one() && b.factors().iter().all(|(s, _)| s.is_denominator_kind())
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { terms: self.terms.iter().map(|(k, v)| (k.clone(), v.clone() * c.clone())).filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn mul_poly(&self, p: &Polynomial<C>) -> Self {
        self * &Self::from(p.clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Coefficient of `s^k`, reading the function as a Laurent polynomial
    /// in `s`.
    pub fn coefficient_of(&self, s: Symbol, k: u32) -> Self {
        let mut out = Self::zero();
        for ((b, t), c) in &self.terms {
            if i64::from(t.exponent(s)) - i64::from(b.exponent(s)) == i64::from(k) {
                out.insert(t.without(s), b.without(s), c.clone());
            }
        }
        out
    }

    pub fn contains_symbol(&self, pred: impl Fn(Symbol) -> bool + Copy) -> bool {
        self.terms.keys().any(|(b, t)| b.factors().iter().chain(t.factors()).any(|&(s, _)| pred(s)))
    }

    /// Every symbol occurring in some term.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|(b, t)| b.factors().iter().chain(t.factors()).map(|&(s, _)| s)).collect()
    }

    /// Sets numerator symbols matching `pred` to zero. Errors if one of
    /// them occurs in a denominator.
    pub fn drop_symbols(&self, pred: impl Fn(Symbol) -> bool) -> Result<Self, AlgebraError> {
        if let Some(&(s, _)) = self.terms.keys().flat_map(|(b, _)| b.factors()).find(|&&(s, _)| pred(s)) {
            return Err(AlgebraError::DenominatorAnnihilated(s));
        }
        Ok(RationalFunction {
            terms: self.terms.iter().filter(|((_, t), _)| !t.factors().iter().any(|&(s, _)| pred(s))).map(|(k, v)| (k.clone(), v.clone())).collect(),
        })
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> RationalFunction<D> {
        RationalFunction { terms: self.terms.iter().map(|(k, v)| (k.clone(), f(v))).filter(|(_, v)| !v.is_zero()).collect() }
    }

    /// Evaluates in a ring where every denominator factor must be a unit.
    pub fn evaluate<R: Ring>(&self, coeff: impl Fn(&C) -> R, value: impl Fn(Symbol) -> R) -> Result<R, AlgebraError> {
        let mut inverses: BTreeMap<Symbol, R> = BTreeMap::new();
        let mut total = R::zero();
        for ((b, t), c) in &self.terms {
            let mut term = coeff(c);
            for &(s, e) in t.factors() {
                let v = value(s);
                for _ in 0..e {
                    term = term * v.clone();
                }
            }
            for &(s, e) in b.factors() {
                if !inverses.contains_key(&s) {
                    let inv = value(s).try_inv().ok_or(AlgebraError::DenominatorAnnihilated(s))?;
                    inverses.insert(s, inv);
                }
                let inv = &inverses[&s];
                for _ in 0..e {
                    term = term * inv.clone();
                }
            }
            total = total + term;
        }
        Ok(total)
    }

    fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let ((b, t), c) = self.terms.iter().next()?;
        if !t.factors().iter().all(|(s, _)| s.is_denominator_kind()) {
            return None;
        }
        let inv = c.try_inv()?;
        let mut out = Self::zero();
        out.insert(b.clone(), t.clone(), inv);
        Some(out)
    }
}

impl<C: Field> RationalFunction<C> {
    /// Simultaneous substitution. A bound symbol occurring in a denominator
    /// must map to a non-zero constant times a monomial in denominator-kind
    /// symbols.
    pub fn substitute(&self, bindings: &Bindings<C>) -> Result<Self, AlgebraError> {
        let mut inverses: BTreeMap<Symbol, Self> = BTreeMap::new();
        for (b, _) in self.terms.keys() {
            for &(s, _) in b.factors() {
                if inverses.contains_key(&s) {
                    continue;
                }
                if let Some(v) = bindings.get(&s) {
                    if v.is_zero() {
                        return Err(AlgebraError::DenominatorAnnihilated(s));
                    }
                    inverses.insert(s, v.unit_inverse().ok_or(AlgebraError::NonMonomialDenominator(s))?);
                }
            }
        }
        let mut out = Self::zero();
        for ((b, t), c) in &self.terms {
            let (t_bound, t_free) = t.split(|s| bindings.contains_key(&s));
            let (b_bound, b_free) = b.split(|s| bindings.contains_key(&s));
            let mut term = Self::zero();
            term.insert(t_free, b_free, c.clone());
            for &(s, e) in t_bound.factors() {
                term = &term * &bindings[&s].pow(e);
            }
            for &(s, e) in b_bound.factors() {
                term = &term * &inverses[&s].pow(e);
            }
            out = out + term;
        }
        Ok(out)
    }
}

impl<C: Ring> From<Polynomial<C>> for RationalFunction<C> {
    fn from(num: Polynomial<C>) -> Self {
        RationalFunction { terms: num.into_terms().filter(|(_, c)| !c.is_zero()).map(|(m, c)| ((Monomial::one(), m), c)).collect() }
    }
}

impl<C: Ring> Zero for RationalFunction<C> {
    fn zero() -> Self {
        RationalFunction { terms: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Ring> One for RationalFunction<C> {
    fn one() -> Self {
        Polynomial::one().into()
    }
}

impl<C: Ring> RationalFunction<C> {
    fn add_assign_ref(&mut self, rhs: &Self) {
        for ((b, t), c) in &rhs.terms {
            match self.terms.entry((b.clone(), t.clone())) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let sum = o.get().clone() + c.clone();
                    if sum.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = sum;
                    }
                }
            }
        }
    }
}

impl<C: Ring> Add<&RationalFunction<C>> for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn add(self, rhs: &RationalFunction<C>) -> RationalFunction<C> {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        big.add_assign_ref(small);
        big
    }
}

impl<C: Ring> Sub<&RationalFunction<C>> for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn sub(self, rhs: &RationalFunction<C>) -> RationalFunction<C> {
        let mut out = self.clone();
        out.add_assign_ref(&-rhs);
        out
    }
}

impl<C: Ring> Mul<&RationalFunction<C>> for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn mul(self, rhs: &RationalFunction<C>) -> RationalFunction<C> {
        let mut out = RationalFunction::zero();
        for ((b1, t1), c1) in &self.terms {
            for ((b2, t2), c2) in &rhs.terms {
                out.insert(t1.mul(t2), b1.mul(b2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Ring> Neg for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn neg(self) -> RationalFunction<C> {
        RationalFunction { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v.clone())).collect() }
    }
}

impl<C: Ring> Add for RationalFunction<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        big.add_assign_ref(&small);
        big
    }
}

impl<C: Ring> Sub for RationalFunction<C> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.add_assign_ref(&-rhs);
        self
    }
}

impl<C: Ring> Mul for RationalFunction<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<C: Ring> Neg for RationalFunction<C> {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFunction { terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect() }
    }
}

impl<C: Ring> Ring for RationalFunction<C> {
    fn from_rational(q: &BigRational) -> Self {
        Polynomial::from_rational(q).into()
    }

    fn try_inv(&self) -> Option<Self> {
        self.unit_inverse()
    }
}

impl<C: Ring + DisplayCoeff> RationalFunction<C> {
    /// Polynomials print with linear edge factors grouped; proper fractions
    /// fall back to the term-wise `Display` form.
    pub fn to_collected_string(&self) -> String {
        match self.as_polynomial() {
            Some(p) => p.to_collected_string(),
            None => self.to_string(),
        }
    }
}

/// Prints term by term, each numerator term over its own reduced
/// denominator, polynomial part first: `-2*a1+lambda3/x[1+2]`.
impl<C: Ring + DisplayCoeff> fmt::Display for RationalFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_polynomial() {
            return fmt::Display::fmt(&p, f);
        }
        let mut out = String::new();
        for ((bottom, top), c) in &self.terms {
            let term = Polynomial::term(top.clone(), c.clone()).to_string();
            if !out.is_empty() && !term.starts_with('-') {
                out.push('+');
            }
            out.push_str(&term);
            if bottom.factors().len() == 1 && bottom.degree() == 1 {
                out.push_str(&format!("/{bottom}"));
            } else if !bottom.is_one() {
                out.push_str(&format!("/({bottom})"));
            }
        }
        f.write_str(&out)
    }
}

impl<C: Ring> fmt::Debug for RationalFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.numerator(), self.denominator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{imag_unit, scalar_from_ratio, LegSet};
    use crate::{Poly, Rf};

    fn x(legs: &[u8]) -> Symbol {
        Symbol::edge(legs.iter().copied().collect::<LegSet>())
    }

    fn v(s: Symbol) -> Rf {
        Rf::var(s)
    }

    fn inv(s: Symbol) -> Rf {
        Rf::reciprocal_of(s).unwrap()
    }

    #[test]
    fn opposite_fractions_cancel() {
        let l3 = v(Symbol::Coupling(3));
        let r = &l3 * &inv(x(&[1, 2]));
        assert!((&r + &(-&r)).is_zero());
        assert!((&r + &(-&r)).denominator().is_one());
    }

    #[test]
    fn multiplication_cancels_to_polynomial() {
        let r = &(&v(x(&[1])) * &v(x(&[2]))) * &inv(x(&[1, 2]));
        let s = &v(x(&[1, 2])) * &inv(x(&[1]));
        assert_eq!(&r * &s, v(x(&[2])));
    }

    #[test]
    fn imaginary_propagator_times_coefficient() {
        let r = &v(Symbol::DiffeoCoeff(1)).scale(&scalar_from_ratio(2, 1)) * &inv(x(&[1, 2])).scale(&imag_unit());
        assert_eq!(r.to_string(), "2*i*a1/x[1+2]");
        assert!(r.is_canonical());
    }

    #[test]
    fn substitute_onshell_and_tuned() {
        let a1 = Symbol::DiffeoCoeff(1);
        let iv3 = (&(&v(x(&[1])) + &v(x(&[2]))) + &v(x(&[3]))).mul_poly(&Poly::var(a1)).scale(&(imag_unit() * scalar_from_ratio(2, 1)));
        let mut b = Bindings::new();
        b.insert(x(&[1]), Rf::zero());
        b.insert(x(&[2]), Rf::zero());
        let expect = v(x(&[3])).mul_poly(&Poly::var(a1)).scale(&(imag_unit() * scalar_from_ratio(2, 1)));
        assert_eq!(iv3.substitute(&b).unwrap(), expect);

        let l3 = v(Symbol::Coupling(3));
        let bp2 = &v(a1).scale(&scalar_from_ratio(-2, 1)) + &(&l3 * &inv(x(&[1, 2])));
        assert_eq!(bp2.to_string(), "-2*a1+lambda3/x[1+2]");
        let mut b = Bindings::new();
        b.insert(x(&[1, 2]), v(Symbol::FixedOffshell));
        b.insert(a1, (&l3 * &inv(Symbol::FixedOffshell)).scale(&scalar_from_ratio(1, 2)));
        assert!(bp2.substitute(&b).unwrap().is_zero());
    }

    #[test]
    fn annihilating_binding_is_rejected() {
        let r = &v(x(&[1])) * &inv(x(&[1, 2]));
        let mut b = Bindings::new();
        b.insert(x(&[1, 2]), Rf::zero());
        assert_eq!(r.substitute(&b), Err(AlgebraError::DenominatorAnnihilated(x(&[1, 2]))));
        b.insert(x(&[1, 2]), &v(x(&[1])) + &v(x(&[2])));
        assert_eq!(r.substitute(&b), Err(AlgebraError::NonMonomialDenominator(x(&[1, 2]))));
    }

    #[test]
    fn invalid_denominator_rejected() {
        let r = Rf::try_new(Poly::one(), Monomial::var(Symbol::DiffeoCoeff(1)));
        assert_eq!(r, Err(AlgebraError::InvalidDenominator(Symbol::DiffeoCoeff(1))));
    }

    #[test]
    fn laurent_coefficient() {
        let e = x(&[1, 2]);
        // (a1 + 3 x12^2) / x12 has x12^1 coefficient 3 and x12^0 coefficient 0.
        let r = &(&v(Symbol::DiffeoCoeff(1)) + &v(e).pow(2).scale(&scalar_from_ratio(3, 1))) * &inv(e);
        assert_eq!(r.coefficient_of(e, 1), Rf::from_int(3));
        assert!(r.coefficient_of(e, 0).is_zero());
    }
}
