use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::topology::{top_partition_groups, TreeTopology, VertexView};
use super::TreeError;
use crate::algebra::{imag_unit, Bindings, LegSet, Monomial, Symbol};
use crate::rules::RuleTable;
use crate::{Poly, Rf, Scalar};

/// Per-vertex choice of Feynman rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decoration {
    Free,
    Interaction(usize),
}

/// One decoration per internal vertex, in pre-order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexDecoration(pub Vec<Decoration>);

impl VertexDecoration {
    pub fn free(tree: &TreeTopology) -> Self {
        VertexDecoration(vec![Decoration::Free; tree.vertex_count()])
    }

    /// Every admissible decoration of `tree` for the given interaction powers.
    pub fn all(tree: &TreeTopology, powers: &[usize]) -> Vec<Self> {
        let mut out = vec![Vec::new()];
        for v in tree.vertices() {
            let options: Vec<Decoration> = std::iter::once(Decoration::Free)
                .chain(powers.iter().filter(|&&s| s <= v.valence()).map(|&s| Decoration::Interaction(s)))
                .collect();
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Decoration>| {
                    options.iter().map(move |d| {
                        let mut p = prefix.clone();
                        p.push(*d);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(VertexDecoration).collect()
    }

    pub fn is_admissible(&self, tree: &TreeTopology) -> bool {
        let vs = tree.vertices();
        vs.len() == self.0.len()
            && vs.iter().zip(&self.0).all(|(v, d)| match d {
                Decoration::Free => true,
                Decoration::Interaction(s) => *s <= v.valence(),
            })
    }
}

impl std::fmt::Display for VertexDecoration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|d| match d {
                Decoration::Free => "v".to_string(),
                Decoration::Interaction(s) => format!("w{s}"),
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

fn onshell_bindings(onshell: LegSet, rules: &RuleTable) -> impl Fn(Symbol) -> bool + Copy {
    let flavor = rules.flavor();
    move |s| matches!(s, Symbol::Edge(f, legs) if f == flavor && legs.len() == 1 && legs.is_subset(onshell))
}

/// Propagator product `prod_e i/x_e` over internal edges (and the root
/// edge when requested).
fn propagators(tree: &TreeTopology, rules: &RuleTable, include_root: bool) -> Rf {
    let mut edges = tree.internal_edges();
    if include_root {
        edges.push(tree.root_edge());
    }
    let den = Monomial::from_factors(edges.iter().map(|e| (rules.edge_symbol(*e), 1)));
    let k = edges.len();
    let phase = (0..k).fold(Scalar::one(), |acc, _| acc * imag_unit());
    Rf::try_new(Poly::constant(phase), den).expect("edge symbols are denominator symbols")
}

/// Amplitude of one decorated tree assembled exactly as written: full
/// vertex rules times internal propagators, and only then the singleton
/// variables of `onshell` legs set to zero.
pub fn amplitude(
    tree: &TreeTopology,
    decoration: &VertexDecoration,
    rules: &RuleTable,
    onshell: LegSet,
    include_root_propagator: bool,
) -> Result<Rf, TreeError> {
    if !decoration.is_admissible(tree) {
        return Err(TreeError::Decoration(tree.encoding()));
    }
    if include_root_propagator && !matches!(tree.context(), crate::rules::EdgeContext::Rooted { .. }) {
        return Err(TreeError::RootPropagator);
    }
    let mut value = propagators(tree, rules, include_root_propagator);
    for (v, d) in tree.vertices().iter().zip(&decoration.0) {
        let factor = match d {
            Decoration::Free => rules.free(&v.adjacent, LegSet::EMPTY),
            Decoration::Interaction(s) => rules
                .interactions(v.valence())
                .iter()
                .find(|(t, _)| t == s)
                .map(|(_, w)| w.clone())
                .unwrap_or_else(Rf::zero),
        };
        value = &value * &factor;
    }
    value
        .drop_symbols(onshell_bindings(onshell, rules))
        .map_err(|e| TreeError::Substitution { tree: tree.encoding(), source: e })
}

/// What is summed over decorations of each tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMode {
    /// Diffeomorphism vertices only.
    Free,
    /// Every admissible decoration (vertex = free + all interactions).
    AllDecorations,
    /// Decorations with exactly one `phi^s` interaction vertex.
    SLinear(usize),
}

/// Value of one tree summed over the decorations selected by `mode`,
/// keyed by the valence of the interaction vertex in `SLinear` mode (key
/// 0 otherwise).
#[derive(Clone, Debug)]
pub(crate) struct TreeValue {
    pub parts: BTreeMap<usize, Rf>,
    pub decorations: u64,
}

pub(crate) fn tree_value(tree: &TreeTopology, rules: &RuleTable, mode: SumMode, onshell: LegSet, include_root: bool) -> TreeValue {
    let vertices: Vec<VertexView> = tree.vertices();
    let props = propagators(tree, rules, include_root);
    let free: Vec<Rf> = vertices.iter().map(|v| rules.free(&v.adjacent, onshell)).collect();
    let mut parts = BTreeMap::new();
    let mut decorations = 1u64;
    match mode {
        SumMode::Free => {
            parts.insert(0, &free.iter().fold(Rf::one(), |acc, f| &acc * f) * &props);
        }
        SumMode::AllDecorations => {
            let mut acc = Rf::one();
            for (v, f) in vertices.iter().zip(&free) {
                let w = rules.interactions(v.valence());
                decorations *= 1 + w.len() as u64;
                acc = &acc * &(f + &rules.interaction_sum(v.valence()));
            }
            parts.insert(0, &acc * &props);
        }
        SumMode::SLinear(s) => {
            decorations = 0;
            // prefix[i] = prod_{u < i} free_u; propagators go on last so
            // the vertex products stay polynomial.
            let mut prefix = vec![Rf::one()];
            for f in &free {
                let next = prefix.last().expect("non-empty") * f;
                prefix.push(next);
            }
            let mut suffix = vec![Rf::one(); free.len() + 1];
            for i in (0..free.len()).rev() {
                suffix[i] = &suffix[i + 1] * &free[i];
            }
            for (i, v) in vertices.iter().enumerate() {
                let Some((_, w)) = rules.interactions(v.valence()).iter().find(|(t, _)| *t == s) else { continue };
                decorations += 1;
                let term = &(&(&prefix[i] * w) * &suffix[i + 1]) * &props;
                let slot = parts.entry(v.valence()).or_insert_with(Rf::zero);
                *slot = &*slot + &term;
            }
        }
    }
    TreeValue { parts, decorations }
}

/// Summed value, split by interaction-vertex valence in `SLinear` mode.
#[derive(Clone, Debug, Default)]
pub(crate) struct Accumulated {
    pub parts: BTreeMap<usize, Rf>,
    pub decorations: u64,
    pub trace: Vec<(String, Rf)>,
}

impl Accumulated {
    fn absorb(&mut self, other: Accumulated) {
        for (k, v) in other.parts {
            let slot = self.parts.entry(k).or_insert_with(Rf::zero);
            *slot = std::mem::take(slot) + v;
        }
        self.decorations += other.decorations;
        self.trace.extend(other.trace);
    }

    pub fn total(&self) -> Rf {
        self.parts.values().fold(Rf::zero(), |acc, v| &acc + v)
    }
}

/// Sums `tree_value` over an enumeration. Groups sharing a top-vertex
/// partition are folded left to right in enumeration order, in parallel
/// across groups; the canonical form makes the result independent of the
/// schedule.
pub(crate) fn sum_trees(
    trees: &[TreeTopology],
    rules: &RuleTable,
    mode: SumMode,
    onshell: LegSet,
    include_root: bool,
    trace: bool,
) -> Accumulated {
    let groups = top_partition_groups(trees);
    let partials: Vec<Accumulated> = groups
        .par_iter()
        .map(|group| {
            let mut acc = Accumulated::default();
            for t in group.iter() {
                let v = tree_value(t, rules, mode, onshell, include_root);
                if trace {
                    let total = v.parts.values().fold(Rf::zero(), |a, x| &a + x);
                    acc.trace.push((t.encoding(), total));
                }
                acc.absorb(Accumulated { parts: v.parts, decorations: v.decorations, trace: Vec::new() });
            }
            acc
        })
        .collect();
    let mut out = Accumulated::default();
    for p in partials {
        out.absorb(p);
    }
    out
}

/// Binds the root edge variable of a rooted `n`-leg context.
pub fn bind_root(value: &Rf, n: u8, flavor: crate::algebra::EdgeFlavor, to: Rf) -> Result<Rf, crate::algebra::AlgebraError> {
    let mut b = Bindings::new();
    b.insert(Symbol::Edge(flavor, LegSet::range(1, n)), to);
    value.substitute(&b)
}

/// Oracle for `AllDecorations`: explicit sum over decoration lists.
pub fn sum_over_decorations(
    tree: &TreeTopology,
    rules: &RuleTable,
    onshell: LegSet,
    include_root_propagator: bool,
) -> Result<Rf, TreeError> {
    let powers: Vec<usize> = rules.theory().interactions.iter().map(|i| i.s).collect();
    let mut acc = Rf::zero();
    for d in VertexDecoration::all(tree, &powers) {
        acc = acc + amplitude(tree, &d, rules, onshell, include_root_propagator)?;
    }
    Ok(acc)
}
