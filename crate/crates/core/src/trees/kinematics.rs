//! Exact evaluation of edge variables on conserving rational momenta.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TreeError;
use crate::algebra::{Bindings, EdgeFlavor, Leg, LegSet, Symbol};
use crate::{Rf, Scalar};

/// Exact momenta `p_l` for a set of leg labels, summing to zero, with the
/// mostly-minus metric `(+,-,...,-)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kinematics {
    momenta: BTreeMap<Leg, Vec<BigRational>>,
    dim: usize,
}

impl Kinematics {
    pub fn new(momenta: Vec<(Leg, Vec<BigRational>)>) -> Result<Self, TreeError> {
        let dim = momenta.first().map(|(_, p)| p.len()).unwrap_or(0);
        if dim < 2 {
            return Err(TreeError::Kinematics(format!("dimension {dim} is below 2")));
        }
        let mut map = BTreeMap::new();
        for (l, p) in momenta {
            if p.len() != dim {
                return Err(TreeError::Kinematics(format!("leg {l} has dimension {} instead of {dim}", p.len())));
            }
            if map.insert(l, p).is_some() {
                return Err(TreeError::Kinematics(format!("leg {l} given twice")));
            }
        }
        let mut total = vec![BigRational::zero(); dim];
        for p in map.values() {
            for (t, c) in total.iter_mut().zip(p) {
                *t += c;
            }
        }
        if total.iter().any(|c| !c.is_zero()) {
            return Err(TreeError::Kinematics("momenta do not sum to zero".into()));
        }
        Ok(Kinematics { momenta: map, dim })
    }

    /// Random small rationals for every label but the last, which balances
    /// the sum. Deterministic in `seed`.
    pub fn random(labels: LegSet, dim: usize, seed: u64) -> Result<Self, TreeError> {
        let legs: Vec<Leg> = labels.iter().collect();
        if legs.len() < 2 {
            return Err(TreeError::Kinematics("need at least two legs".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut total = vec![BigRational::zero(); dim];
        let mut out = Vec::with_capacity(legs.len());
        for &l in &legs[..legs.len() - 1] {
            let p: Vec<BigRational> = (0..dim)
                .map(|_| BigRational::new(BigInt::from(rng.gen_range(-12i64..=12)), BigInt::from(rng.gen_range(1i64..=5))))
                .collect();
            for (t, c) in total.iter_mut().zip(&p) {
                *t += c;
            }
            out.push((l, p));
        }
        out.push((legs[legs.len() - 1], total.into_iter().map(|c| -c).collect()));
        Kinematics::new(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> LegSet {
        self.momenta.keys().copied().collect()
    }

    pub fn momentum(&self, leg: Leg) -> Option<&[BigRational]> {
        self.momenta.get(&leg).map(Vec::as_slice)
    }

    /// `(sum_{l in S} p_l)^2`.
    pub fn invariant(&self, legs: LegSet) -> Result<BigRational, TreeError> {
        let mut p = vec![BigRational::zero(); self.dim];
        for l in legs.iter() {
            let q = self.momenta.get(&l).ok_or_else(|| TreeError::Kinematics(format!("no momentum for leg {l}")))?;
            for (a, b) in p.iter_mut().zip(q) {
                *a += b;
            }
        }
        let mut sq = &p[0] * &p[0];
        for c in &p[1..] {
            sq -= c * c;
        }
        Ok(sq)
    }
}

/// How edge variables become numbers.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeModel {
    /// `x_S = p_S^2 - m^2`.
    Standard { mass_sq: Scalar },
    /// `X_S = sum_k beta_k (p_S^2)^k`.
    Generalized { beta: Vec<Scalar> },
}

impl EdgeModel {
    fn flavor(&self) -> EdgeFlavor {
        match self {
            EdgeModel::Standard { .. } => EdgeFlavor::Standard,
            EdgeModel::Generalized { .. } => EdgeFlavor::Generalized,
        }
    }

    fn value(&self, sq: &BigRational) -> Scalar {
        let sq = Scalar::new(sq.clone(), BigRational::zero());
        match self {
            EdgeModel::Standard { mass_sq } => sq - mass_sq,
            EdgeModel::Generalized { beta } => {
                beta.iter().rev().fold(Scalar::zero(), |acc, b| acc * sq.clone() + b)
            }
        }
    }
}

fn edge_symbols(r: &Rf) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = r.numerator().symbols().into_iter().filter(|s| s.is_edge()).collect();
    out.extend(r.denominator().factors().iter().map(|&(s, _)| s).filter(|s| s.is_edge()));
    out.sort();
    out.dedup();
    out
}

fn edge_bindings(r: &Rf, kin: &Kinematics, model: &EdgeModel) -> Result<Bindings<Scalar>, TreeError> {
    let mut b = Bindings::new();
    for s in edge_symbols(r) {
        let Symbol::Edge(flavor, legs) = s else { continue };
        if flavor != model.flavor() {
            return Err(TreeError::Kinematics(format!("edge {s} does not match the propagator model")));
        }
        b.insert(s, Rf::constant(model.value(&kin.invariant(legs)?)));
    }
    Ok(b)
}

/// Replaces every edge variable (and `m^2` in the standard model) by its
/// value; other symbols are kept.
pub fn evaluate_edges(r: &Rf, kin: &Kinematics, model: &EdgeModel) -> Result<Rf, TreeError> {
    let mut b = edge_bindings(r, kin, model)?;
    if let EdgeModel::Standard { mass_sq } = model {
        b.insert(Symbol::MassSq, Rf::constant(mass_sq.clone()));
    }
    Ok(r.substitute(&b)?)
}

/// Exact value of `r` at the given momenta; fails unless only edge
/// variables and the mass remain to be bound.
pub fn evaluate_at_kinematics(r: &Rf, kin: &Kinematics, model: &EdgeModel) -> Result<Scalar, TreeError> {
    let r = evaluate_edges(r, kin, model)?;
    r.as_constant().ok_or_else(|| TreeError::Kinematics(format!("value {r} is not constant after binding edges")))
}

/// Symbol standing for `p_S^2` in symbolic specializations.
pub fn invariant_symbol(legs: LegSet) -> Symbol {
    Symbol::generic(&format!("s[{legs}]"))
}

/// Specializes generalized edge variables `X_S -> sum_k beta_k s_S^k` with
/// `s_S` a free symbol. Edge variables in denominators must be absent.
pub fn specialize_generalized(r: &Rf, beta: &[Rf]) -> Result<Rf, TreeError> {
    let mut b = Bindings::new();
    for s in edge_symbols(r) {
        let Symbol::Edge(EdgeFlavor::Generalized, legs) = s else { continue };
        let sq = Rf::var(invariant_symbol(legs));
        let v = beta.iter().rev().fold(Rf::zero(), |acc, c| &(&acc * &sq) + c);
        b.insert(s, v);
    }
    Ok(r.substitute(&b)?)
}

/// Rewrites standard edge variables of an unrooted `n`-leg context in the
/// independent basis `x_i, x_ij` (`i < j < n`) using
/// `x_S = sum_{i<j in S} x_ij - (|S|-2) sum_{i in S} x_i + (|S| - C(|S|,2) - 1) m^2`,
/// after replacing sets containing leg `n` by their complement. Two
/// polynomials agree under momentum conservation iff their images agree.
pub fn pair_basis(r: &Rf, n: Leg, mass_sq: &Rf) -> Result<Rf, TreeError> {
    let universe = LegSet::range(1, n);
    let mut b = Bindings::new();
    for s in edge_symbols(r) {
        let Symbol::Edge(EdgeFlavor::Standard, legs) = s else { continue };
        if !legs.is_subset(universe) {
            return Err(TreeError::Kinematics(format!("edge {s} is outside legs 1..{n}")));
        }
        let set = if legs.contains(n) { universe.difference(legs) } else { legs };
        let k = set.len();
        let value = if k <= 2 {
            Rf::var(Symbol::edge(set))
        } else {
            let members: Vec<Leg> = set.iter().collect();
            let mut v = Rf::zero();
            for (p, &i) in members.iter().enumerate() {
                for &j in &members[p + 1..] {
                    v = v + Rf::var(Symbol::edge([i, j].into_iter().collect()));
                }
                v = v - Rf::var(Symbol::edge(LegSet::single(i))).scale(&Scalar::from(BigRational::from_integer((k as i64 - 2).into())));
            }
            let m_coeff = k as i64 - (k * (k - 1) / 2) as i64 - 1;
            v + mass_sq.scale(&Scalar::from(BigRational::from_integer(m_coeff.into())))
        };
        b.insert(s, value);
    }
    Ok(r.substitute(&b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use num_traits::One;

    fn x(legs: &[Leg]) -> Rf {
        Rf::var(Symbol::edge(legs.iter().copied().collect()))
    }

    #[test]
    fn four_point_conservation_identity() {
        let r = x(&[1, 2]) + x(&[1, 3]) + x(&[2, 3]) - x(&[1]) - x(&[2]) - x(&[3]) - x(&[4]) - Rf::var(Symbol::MassSq);
        for seed in 0..20 {
            let kin = Kinematics::random(LegSet::range(1, 4), 4, seed).unwrap();
            let model = EdgeModel::Standard { mass_sq: Scalar::new(rational(7, 3), BigRational::zero()) };
            assert!(evaluate_at_kinematics(&r, &kin, &model).unwrap().is_zero());
        }
    }

    #[test]
    fn conservation_violation_is_rejected() {
        let p = |a: i64| vec![rational(a, 1), rational(0, 1)];
        assert!(Kinematics::new(vec![(1, p(1)), (2, p(2))]).is_err());
        assert!(Kinematics::new(vec![(1, p(1)), (2, p(-1))]).is_ok());
    }

    #[test]
    fn zero_denominator_names_the_edge() {
        let p = |a: i64, b: i64| vec![rational(a, 1), rational(b, 1)];
        let kin = Kinematics::new(vec![(1, p(1, 0)), (2, p(-1, 0))]).unwrap();
        let r = Rf::reciprocal_of(Symbol::edge(LegSet::single(1))).unwrap();
        let model = EdgeModel::Standard { mass_sq: Scalar::new(rational(1, 1), BigRational::zero()) };
        let err = evaluate_at_kinematics(&r, &kin, &model).unwrap_err().to_string();
        assert!(err.contains("x1"), "{err}");
    }

    #[test]
    fn pair_basis_sees_the_four_point_identity() {
        let m = Rf::var(Symbol::MassSq);
        let r = x(&[1, 2]) + x(&[1, 3]) + x(&[1, 4]) - x(&[1]) - x(&[2]) - x(&[3]) - x(&[4]) - m.clone();
        assert!(pair_basis(&r, 4, &m).unwrap().is_zero());
        assert!(!pair_basis(&x(&[1, 2]), 4, &m).unwrap().is_zero());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let r = &x(&[1, 2]) * &Rf::reciprocal_of(Symbol::edge([1, 3].into_iter().collect())).unwrap() + x(&[2]);
        let kin = Kinematics::random(LegSet::range(1, 4), 4, 11).unwrap();
        let model = EdgeModel::Standard { mass_sq: Scalar::one() };
        assert_eq!(evaluate_at_kinematics(&r, &kin, &model).unwrap(), evaluate_at_kinematics(&r, &kin, &model).unwrap());
    }
}
