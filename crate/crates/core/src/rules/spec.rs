use std::fmt;

use num_traits::{One, Zero};

use super::RuleError;
use crate::algebra::{Bindings, Symbol};
use crate::{Poly, Rf};

/// Field redefinition `phi = sum_j a_j rho^{j+1}` with `a_0 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffeoSpec {
    a: Vec<Rf>,
}

impl DiffeoSpec {
    /// Symbolic `a_1 ..= a_max`.
    pub fn symbolic(max_order: usize) -> Self {
        let a = std::iter::once(Rf::one()).chain((1..=max_order).map(|j| Rf::var(Symbol::DiffeoCoeff(j as u32)))).collect();
        DiffeoSpec { a }
    }

    /// `a[0]` must be 1 and no coefficient may depend on edge variables.
    pub fn from_coeffs(a: Vec<Rf>) -> Result<Self, RuleError> {
        if a.first() != Some(&Rf::one()) {
            return Err(RuleError::InvalidSpec("a0 must equal 1".into()));
        }
        if let Some(j) = a.iter().position(|c| c.contains_symbol(Symbol::is_edge)) {
            return Err(RuleError::InvalidSpec(format!("a{j} depends on an edge variable")));
        }
        Ok(DiffeoSpec { a })
    }

    /// The identity map.
    pub fn identity() -> Self {
        DiffeoSpec { a: vec![Rf::one()] }
    }

    pub fn max_order(&self) -> usize {
        self.a.len() - 1
    }

    /// `a_j`; zero beyond the stored order.
    pub fn a(&self, j: usize) -> Rf {
        self.a.get(j).cloned().unwrap_or_else(Rf::zero)
    }

    pub fn coeffs(&self) -> &[Rf] {
        &self.a
    }

    /// Coefficients `a_0 ..= a_n`, padding with zeros.
    pub fn padded(&self, n: usize) -> Vec<Rf> {
        (0..=n).map(|j| self.a(j)).collect()
    }

    pub fn substitute(&self, bindings: &Bindings<crate::Scalar>) -> Result<Self, RuleError> {
        let a = self.a.iter().map(|c| c.substitute(bindings)).collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(a)
    }
}

impl fmt::Display for DiffeoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbolic = self.a.iter().enumerate().skip(1).all(|(j, c)| *c == Rf::var(Symbol::DiffeoCoeff(j as u32)));
        if symbolic {
            return write!(f, "symbolic(a1..a{})", self.max_order());
        }
        let parts: Vec<String> = self.a.iter().enumerate().skip(1).map(|(j, c)| format!("a{j}={c}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Propagator {
    /// Inverse propagator `x = p^2 - m^2`.
    Standard { mass_sq: Rf },
    /// Inverse propagator `X = sum_k beta_k (p^2)^k`.
    Generalized { beta: Vec<Rf> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interaction {
    pub s: usize,
    pub lambda: Rf,
}

impl Interaction {
    pub fn symbolic(s: usize) -> Self {
        Interaction { s, lambda: Rf::var(Symbol::Coupling(s as u32)) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheorySpec {
    pub propagator: Propagator,
    pub interactions: Vec<Interaction>,
}

impl TheorySpec {
    /// Massive free theory with symbolic `m^2`.
    pub fn free() -> Self {
        TheorySpec { propagator: Propagator::Standard { mass_sq: Rf::var(Symbol::MassSq) }, interactions: Vec::new() }
    }

    /// Free theory plus `lambda_s phi^s` terms with symbolic couplings.
    pub fn with_interactions(powers: &[usize]) -> Result<Self, RuleError> {
        let t = TheorySpec { interactions: powers.iter().map(|&s| Interaction::symbolic(s)).collect(), ..Self::free() };
        t.validate()?;
        Ok(t)
    }

    /// Generalized propagator with symbolic `X` variables.
    pub fn generalized(beta: Vec<Rf>) -> Result<Self, RuleError> {
        let t = TheorySpec { propagator: Propagator::Generalized { beta }, interactions: Vec::new() };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        let mut seen = Vec::new();
        for i in &self.interactions {
            if i.s < 3 {
                return Err(RuleError::InvalidSpec(format!("interaction power {} is below 3", i.s)));
            }
            if seen.contains(&i.s) {
                return Err(RuleError::InvalidSpec(format!("interaction power {} given twice", i.s)));
            }
            seen.push(i.s);
        }
        match &self.propagator {
            Propagator::Generalized { beta } => {
                if beta.is_empty() {
                    return Err(RuleError::InvalidSpec("empty beta list".into()));
                }
                if !self.interactions.is_empty() {
                    return Err(RuleError::InvalidSpec("interactions require the standard propagator".into()));
                }
            }
            Propagator::Standard { mass_sq } => {
                if mass_sq.contains_symbol(Symbol::is_denominator_kind) {
                    return Err(RuleError::InvalidSpec("mass must not depend on edge variables".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_generalized(&self) -> bool {
        matches!(self.propagator, Propagator::Generalized { .. })
    }

    pub fn mass_sq(&self) -> Option<&Rf> {
        match &self.propagator {
            Propagator::Standard { mass_sq } => Some(mass_sq),
            Propagator::Generalized { .. } => None,
        }
    }

    pub fn interaction(&self, s: usize) -> Option<&Interaction> {
        self.interactions.iter().find(|i| i.s == s)
    }

    /// The same theory with only the `phi^s` interaction kept.
    pub fn only_interaction(&self, s: usize) -> Self {
        TheorySpec { propagator: self.propagator.clone(), interactions: self.interaction(s).into_iter().cloned().collect() }
    }

    pub fn without_interactions(&self) -> Self {
        TheorySpec { propagator: self.propagator.clone(), interactions: Vec::new() }
    }
}

impl fmt::Display for TheorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.propagator {
            Propagator::Standard { mass_sq } => write!(f, "standard(msq={mass_sq})")?,
            Propagator::Generalized { beta } => {
                let b: Vec<String> = beta.iter().map(ToString::to_string).collect();
                write!(f, "generalized(beta=[{}])", b.join(", "))?
            }
        }
        for i in &self.interactions {
            write!(f, "+lambda{}={}", i.s, i.lambda)?;
        }
        Ok(())
    }
}

/// Constant-coefficient derivative series `sum_k alpha_k (d^2)^k`, `alpha_0 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlocalSpec {
    pub alpha: Vec<Rf>,
    pub mass_sq: Rf,
}

impl NonlocalSpec {
    pub fn new(alpha: Vec<Rf>, mass_sq: Rf) -> Result<Self, RuleError> {
        if alpha.first() != Some(&Rf::one()) {
            return Err(RuleError::InvalidSpec("alpha0 must equal 1".into()));
        }
        Ok(NonlocalSpec { alpha, mass_sq })
    }

    /// `alpha_0 = 1, alpha_1 ..= alpha_k` symbolic, with symbolic `m^2`.
    pub fn symbolic(k: usize) -> Self {
        let alpha = std::iter::once(Rf::one()).chain((1..=k).map(|j| Rf::var(Symbol::NonlocalCoeff(j as u32)))).collect();
        NonlocalSpec { alpha, mass_sq: Rf::from(Poly::var(Symbol::MassSq)) }
    }

    pub fn alpha(&self, k: usize) -> Rf {
        self.alpha.get(k).cloned().unwrap_or_else(Rf::zero)
    }

    /// Highest index with a possibly non-zero `beta`.
    pub fn beta_degree(&self) -> usize {
        2 * (self.alpha.len() - 1) + 1
    }

    pub fn betas(&self) -> Vec<Rf> {
        (0..=self.beta_degree()).map(|n| super::nonlocal_beta(n, self)).collect()
    }

    pub fn theory(&self) -> Result<TheorySpec, RuleError> {
        TheorySpec::generalized(self.betas())
    }
}
