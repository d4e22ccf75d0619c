use std::collections::BTreeMap;

use serde::Serialize;

use super::TheorySpec;
use crate::algebra::{Leg, Monomial, Symbol};
use crate::{Poly, Rf};

/// Recorded in every rule dump: how the mass term of the diffeomorphism
/// vertex is signed.
pub const MASS_TERM_CONVENTION: &str =
    "iv_n = i*f_n*sum(x) + i*g_n*msq with g_n = n*f_n - c_{n-2}, c_{n-2} = B_{n,2}(1, 2!a1, 3!a2, ...); fixes iv_4 = 4*i*msq*a1^2 + ...";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Free,
    Interaction { s: usize },
    Total,
    Generalized,
}

/// One summand: `coefficient * prod(edge variables)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleTerm {
    pub coefficient: String,
    pub edges: Vec<Vec<Leg>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexRule {
    pub valence: usize,
    pub kind: VertexKind,
    pub theory: String,
    pub mass_term_convention: &'static str,
    pub terms: Vec<RuleTerm>,
    pub text: String,
}

impl VertexRule {
    pub fn new(valence: usize, kind: VertexKind, theory: &TheorySpec, value: &Rf) -> Self {
        let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in value.numerator().terms() {
            let (edges, rest) = m.split(Symbol::is_edge);
            groups.entry(edges).or_default().add_term(rest, c.clone());
        }
        let terms = groups
            .into_iter()
            .map(|(edges, coeff)| {
                let coefficient = Rf::try_new(coeff, value.denominator().clone()).expect("denominator taken from a valid value");
                let edges = edges
                    .factors()
                    .iter()
                    .flat_map(|&(s, e)| std::iter::repeat_n(s.edge_legs().expect("edge factor").iter().collect(), e as usize))
                    .collect();
                RuleTerm { coefficient: coefficient.to_string(), edges }
            })
            .collect();
        VertexRule {
            valence,
            kind,
            theory: theory.to_string(),
            mass_term_convention: MASS_TERM_CONVENTION,
            terms,
            text: value.to_collected_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{free_vertex, DiffeoSpec, EdgeContext, EdgeVar};

    #[test]
    fn dump_groups_by_edge() {
        let ctx = EdgeContext::Unrooted { n: 4 };
        let adj: Vec<EdgeVar> = (1..=4).map(|j| EdgeVar::leg(j, ctx).unwrap()).collect();
        let theory = TheorySpec::free();
        let v = free_vertex(4, &adj, &DiffeoSpec::symbolic(3), theory.mass_sq().unwrap()).unwrap();
        let rule = VertexRule::new(4, VertexKind::Free, &theory, &v);
        assert_eq!(rule.terms.len(), 5);
        assert_eq!(rule.terms[0], RuleTerm { coefficient: "4*i*a1^2*msq".into(), edges: vec![] });
        assert_eq!(rule.terms[1], RuleTerm { coefficient: "6*i*a2+4*i*a1^2".into(), edges: vec![vec![1]] });
        let json = serde_json::to_string(&rule).unwrap();
        assert!(json.starts_with("{\"valence\":4,\"kind\":\"free\""));
    }
}
