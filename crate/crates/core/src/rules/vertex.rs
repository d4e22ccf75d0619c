use num_traits::Zero;

use super::{DiffeoSpec, EdgeVar, NonlocalSpec, Propagator, RuleError, TheorySpec};
use crate::algebra::{imag_unit, EdgeFlavor, LegSet, Ring, Symbol};
use crate::series::{bell_table, factorial, vertex_coefficients, VertexCoefficients};
use crate::{Rf, Scalar};

/// How the momentum dependence of a diffeomorphism vertex is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum VertexForm {
    /// `i f_n sum_e x_e + i g_n m^2`, linear in the adjacent edge variables.
    Compact,
    /// `i/2 sum_k a_{n-k-1} a_{k-1} (n-k)! k! sum_{|P|=k} X_P` over subsets of
    /// adjacent edges. Agrees with `Compact` under momentum conservation.
    #[default]
    Subset,
}

fn check_valence(n: usize, adjacent: &[EdgeVar]) -> Result<(), RuleError> {
    if n < 3 {
        return Err(RuleError::Valence(n));
    }
    if adjacent.len() != n {
        return Err(RuleError::Adjacency { expected: n, got: adjacent.len() });
    }
    Ok(())
}

fn i_times(r: &Rf) -> Rf {
    r.scale(&imag_unit())
}

fn edge_sum(adjacent: &[EdgeVar], flavor: EdgeFlavor, onshell: LegSet) -> Rf {
    adjacent
        .iter()
        .map(|e| e.legs())
        .filter(|legs| !(legs.len() == 1 && legs.is_subset(onshell)))
        .fold(Rf::zero(), |acc, legs| acc + Rf::var(Symbol::Edge(flavor, legs)))
}

/// Weights `i/2 a_{n-k-1} a_{k-1} (n-k)! k!` for `k = 0 ..= n` (ends are zero).
fn subset_weights(n: usize, diffeo: &DiffeoSpec) -> Vec<Rf> {
    let half_i = imag_unit() * crate::algebra::scalar_from_ratio(1, 2);
    (0..=n)
        .map(|k| {
            if k == 0 || k == n {
                return Rf::zero();
            }
            let w = Scalar::from_bigint(&(factorial(n - k) * factorial(k))) * half_i.clone();
            (&diffeo.a(n - k - 1) * &diffeo.a(k - 1)).scale(&w)
        })
        .collect()
}

fn subset_vertex(adjacent: &[EdgeVar], weights: &[Rf], flavor: EdgeFlavor, onshell: LegSet) -> Rf {
    let n = adjacent.len();
    let context = adjacent[0].context();
    let mut acc = Rf::zero();
    for mask in 1u32..(1 << n) - 1 {
        let k = mask.count_ones() as usize;
        if weights[k].is_zero() {
            continue;
        }
        let union = (0..n).filter(|i| mask & (1 << i) != 0).fold(LegSet::EMPTY, |u, i| u.union(adjacent[i].far()));
        let legs = context.canonical(union);
        if legs.len() == 1 && legs.is_subset(onshell) {
            continue;
        }
        acc = acc + &weights[k] * &Rf::var(Symbol::Edge(flavor, legs));
    }
    acc
}

/// Diffeomorphism vertex `i f_n sum x + i g_n m^2`.
pub fn free_vertex(n: usize, adjacent: &[EdgeVar], diffeo: &DiffeoSpec, mass_sq: &Rf) -> Result<Rf, RuleError> {
    check_valence(n, adjacent)?;
    let VertexCoefficients { f, g, .. } = vertex_coefficients(n, &diffeo.padded(n));
    Ok(compact(&f, &g, adjacent, mass_sq, LegSet::EMPTY))
}

fn compact(f: &Rf, g: &Rf, adjacent: &[EdgeVar], mass_sq: &Rf, onshell: LegSet) -> Rf {
    i_times(&(&(f * &edge_sum(adjacent, EdgeFlavor::Standard, onshell)) + &(g * mass_sq)))
}

/// Diffeomorphism vertex in subset form over `x` (`Standard`) or `X`
/// (`Generalized`) variables.
pub fn generalized_vertex(n: usize, adjacent: &[EdgeVar], diffeo: &DiffeoSpec, flavor: EdgeFlavor) -> Result<Rf, RuleError> {
    check_valence(n, adjacent)?;
    Ok(subset_vertex(adjacent, &subset_weights(n, diffeo), flavor, LegSet::EMPTY))
}

/// `-i w_n^(s) = -i lambda_s B_{n,s}(1! a_0, 2! a_1, ...)`.
pub fn interaction_vertex(n: usize, s: usize, lambda: &Rf, diffeo: &DiffeoSpec) -> Rf {
    if n < s {
        return Rf::zero();
    }
    let args: Vec<Rf> = (1..=n).map(|i| diffeo.a(i - 1).scale(&Scalar::from_bigint(&factorial(i)))).collect();
    let b = bell_table(n, &args)[n][s].clone();
    (lambda * &b).scale(&-imag_unit())
}

/// Diffeomorphism vertex plus every interaction vertex of the theory.
pub fn total_vertex(n: usize, adjacent: &[EdgeVar], theory: &TheorySpec, diffeo: &DiffeoSpec, form: VertexForm) -> Result<Rf, RuleError> {
    theory.validate()?;
    let free = match (&theory.propagator, form) {
        (Propagator::Standard { mass_sq }, VertexForm::Compact) => free_vertex(n, adjacent, diffeo, mass_sq)?,
        (Propagator::Standard { .. }, VertexForm::Subset) => generalized_vertex(n, adjacent, diffeo, EdgeFlavor::Standard)?,
        (Propagator::Generalized { .. }, _) => generalized_vertex(n, adjacent, diffeo, EdgeFlavor::Generalized)?,
    };
    Ok(theory.interactions.iter().fold(free, |acc, i| acc + interaction_vertex(n, i.s, &i.lambda, diffeo)))
}

/// `i / x_e` or `i / X_e`.
pub fn propagator(e: &EdgeVar, theory: &TheorySpec) -> Rf {
    let flavor = if theory.is_generalized() { EdgeFlavor::Generalized } else { EdgeFlavor::Standard };
    Rf::reciprocal_of(e.symbol(flavor)).expect("edge symbols are denominator symbols").scale(&imag_unit())
}

/// `beta_n = sum_{k<n} alpha_{n-1-k} alpha_k - m^2 sum_{k<=n} alpha_{n-k} alpha_k`.
pub fn nonlocal_beta(n: usize, spec: &NonlocalSpec) -> Rf {
    let kinetic = (0..n).fold(Rf::zero(), |acc, k| acc + &spec.alpha(n - 1 - k) * &spec.alpha(k));
    let mass = (0..=n).fold(Rf::zero(), |acc, k| acc + &spec.alpha(n - k) * &spec.alpha(k));
    kinetic - &spec.mass_sq * &mass
}

/// Precomputed per-valence coefficients for repeated vertex evaluation
/// inside tree sums.
#[derive(Clone, Debug)]
pub struct RuleTable {
    theory: TheorySpec,
    form: VertexForm,
    flavor: EdgeFlavor,
    coefficients: Vec<Option<VertexCoefficients<Rf>>>,
    weights: Vec<Vec<Rf>>,
    /// `interactions[n]`: `(s, -i w_n^(s))`, zero entries dropped.
    interactions: Vec<Vec<(usize, Rf)>>,
}

impl RuleTable {
    pub fn new(theory: &TheorySpec, diffeo: &DiffeoSpec, form: VertexForm, max_valence: usize) -> Result<Self, RuleError> {
        theory.validate()?;
        let (form, flavor) = if theory.is_generalized() { (VertexForm::Subset, EdgeFlavor::Generalized) } else { (form, EdgeFlavor::Standard) };
        let padded = diffeo.padded(max_valence);
        let coefficients = (0..=max_valence).map(|n| (n >= 3).then(|| vertex_coefficients(n, &padded))).collect();
        let weights = (0..=max_valence).map(|n| if n >= 3 { subset_weights(n, diffeo) } else { Vec::new() }).collect();
        let interactions = (0..=max_valence)
            .map(|n| {
                theory
                    .interactions
                    .iter()
                    .map(|i| (i.s, interaction_vertex(n, i.s, &i.lambda, diffeo)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Ok(RuleTable { theory: theory.clone(), form, flavor, coefficients, weights, interactions })
    }

    pub fn theory(&self) -> &TheorySpec {
        &self.theory
    }

    pub fn form(&self) -> VertexForm {
        self.form
    }

    pub fn flavor(&self) -> EdgeFlavor {
        self.flavor
    }

    pub fn max_valence(&self) -> usize {
        self.weights.len() - 1
    }

    /// Diffeomorphism vertex with the singleton variables of `onshell`
    /// legs set to zero.
    pub fn free(&self, adjacent: &[EdgeVar], onshell: LegSet) -> Rf {
        let n = adjacent.len();
        match self.form {
            VertexForm::Subset => subset_vertex(adjacent, &self.weights[n], self.flavor, onshell),
            VertexForm::Compact => {
                let c = self.coefficients[n].as_ref().expect("valence >= 3");
                compact(&c.f, &c.g, adjacent, self.theory.mass_sq().expect("compact form needs a mass"), onshell)
            }
        }
    }

    /// `(s, -i w_n^(s))` for every interaction with a non-zero vertex.
    pub fn interactions(&self, n: usize) -> &[(usize, Rf)] {
        &self.interactions[n]
    }

    pub fn interaction_sum(&self, n: usize) -> Rf {
        self.interactions[n].iter().fold(Rf::zero(), |acc, (_, v)| &acc + v)
    }

    pub fn edge_symbol(&self, e: EdgeVar) -> Symbol {
        e.symbol(self.flavor)
    }

    pub fn propagator(&self, e: &EdgeVar) -> Rf {
        propagator(e, &self.theory)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Leg;
    use crate::rules::EdgeContext;

    fn legs(n: Leg) -> Vec<EdgeVar> {
        let ctx = EdgeContext::Unrooted { n };
        (1..=n).map(|j| EdgeVar::leg(j, ctx).unwrap()).collect()
    }

    fn msq() -> Rf {
        Rf::var(Symbol::MassSq)
    }

    #[test]
    fn first_free_vertices() {
        let d = DiffeoSpec::symbolic(4);
        let v = |n: Leg| free_vertex(n as usize, &legs(n), &d, &msq()).unwrap().to_collected_string();
        assert_eq!(v(3), "2*i*a1*(x1+x2+x3)");
        assert_eq!(v(4), "4*i*a1^2*msq+6*i*a2*(x1+x2+x3+x4)+4*i*a1^2*(x1+x2+x3+x4)");
        assert_eq!(v(5), "60*i*a1*a2*msq+24*i*a3*(x1+x2+x3+x4+x5)+36*i*a1*a2*(x1+x2+x3+x4+x5)");
        assert!(free_vertex(2, &legs(2), &d, &msq()).is_err());
        assert!(free_vertex(4, &legs(3), &d, &msq()).is_err());
    }

    #[test]
    fn generalized_small_vertices() {
        let d = DiffeoSpec::symbolic(4);
        let v3 = generalized_vertex(3, &legs(3), &d, EdgeFlavor::Generalized).unwrap();
        assert_eq!(v3.to_collected_string(), "2*i*a1*(X1+X2+X3)");
        let v4 = generalized_vertex(4, &legs(4), &d, EdgeFlavor::Generalized).unwrap();
        assert_eq!(v4.to_collected_string(), "6*i*a2*(X1+X2+X3+X4)+4*i*a1^2*(X[1+2]+X[1+3]+X[1+4])");
    }

    #[test]
    fn interaction_table() {
        let d = DiffeoSpec::symbolic(4);
        let w = |n, s| interaction_vertex(n, s, &Rf::var(Symbol::Coupling(s as u32)), &d).to_string();
        assert_eq!(w(3, 3), "-i*lambda3");
        assert_eq!(w(4, 3), "-12*i*a1*lambda3");
        assert_eq!(w(5, 3), "-60*i*a2*lambda3-60*i*a1^2*lambda3");
        assert_eq!(w(3, 4), "0");
        assert_eq!(w(4, 4), "-i*lambda4");
        assert_eq!(w(5, 4), "-20*i*a1*lambda4");
        assert_eq!(w(6, 4), "-120*i*a2*lambda4-180*i*a1^2*lambda4");
    }

    #[test]
    fn nonlocal_betas() {
        let id = NonlocalSpec::symbolic(0);
        assert_eq!(id.betas(), vec![-msq(), Rf::from_int(1)]);
        let one = NonlocalSpec::symbolic(1);
        let b: Vec<String> = one.betas().iter().map(ToString::to_string).collect();
        assert_eq!(b, ["-msq", "1-2*msq*alpha1", "2*alpha1-msq*alpha1^2", "alpha1^2"]);
    }

    #[test]
    fn propagator_inverts_edge() {
        let e = EdgeVar::new([1, 2].into_iter().collect(), EdgeContext::Rooted { n: 2 }).unwrap();
        let p = propagator(&e, &TheorySpec::free());
        assert_eq!(p.to_string(), "i/x[1+2]");
        let x = Rf::var(e.symbol(EdgeFlavor::Standard)).scale(&-imag_unit());
        assert_eq!(&p * &x, Rf::from_int(1));
    }
}
