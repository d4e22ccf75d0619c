use std::cmp::Ordering;
use std::fmt;

use super::symbol::Symbol;

/// Power product of symbols. Factors are kept sorted by symbol with strictly
/// positive exponents, so structural equality is monomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Symbol, u32)>,
    degree: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(s: Symbol) -> Self {
        Self::power(s, 1)
    }

    pub fn power(s: Symbol, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        Monomial { factors: vec![(s, e)], degree: e }
    }

    pub fn from_factors(it: impl IntoIterator<Item = (Symbol, u32)>) -> Self {
        it.into_iter().fold(Self::one(), |m, (s, e)| m.mul(&Self::power(s, e)))
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.factors
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.factors
            .binary_search_by(|(t, _)| t.cmp(&s))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.exponent(s) > 0
    }

    fn merge(&self, other: &Self, f: impl Fn(u32, u32) -> u32) -> Self {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        loop {
            let (s, e) = match (self.factors.get(i), other.factors.get(j)) {
                (None, None) => break,
                (Some(&(s, e)), None) => {
                    i += 1;
                    (s, f(e, 0))
                }
                (None, Some(&(s, e))) => {
                    j += 1;
                    (s, f(0, e))
                }
                (Some(&(s, e)), Some(&(t, d))) => match s.cmp(&t) {
                    Ordering::Less => {
                        i += 1;
                        (s, f(e, 0))
                    }
                    Ordering::Greater => {
                        j += 1;
                        (t, f(0, d))
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (s, f(e, d))
                    }
                },
            };
            if e > 0 {
                factors.push((s, e));
            }
        }
        let degree = factors.iter().map(|&(_, e)| e).sum();
        Monomial { factors, degree }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.merge(other, |a, b| a + b)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        self.merge(other, u32::max)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        self.merge(other, u32::min)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.factors.iter().all(|&(s, e)| other.exponent(s) >= e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        other.divides(self).then(|| self.merge(other, |a, b| a - b))
    }

    pub fn pow(&self, k: u32) -> Self {
        Monomial {
            factors: self.factors.iter().map(|&(s, e)| (s, e * k)).filter(|&(_, e)| e > 0).collect(),
            degree: self.degree * k,
        }
    }

    /// Splits into (factors satisfying `keep`, the rest).
    pub fn split(&self, keep: impl Fn(Symbol) -> bool) -> (Self, Self) {
        let (a, b): (Vec<_>, Vec<_>) = self.factors.iter().partition(|(s, _)| keep(*s));
        let mk = |factors: Vec<(Symbol, u32)>| {
            let degree = factors.iter().map(|&(_, e)| e).sum();
            Monomial { factors, degree }
        };
        (mk(a), mk(b))
    }

    pub fn without(&self, s: Symbol) -> Self {
        self.split(|t| t != s).0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.factors.iter().zip(&other.factors) {
                // A higher power of an earlier symbol sorts first within a degree.
                let c = a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            self.factors.len().cmp(&other.factors.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
