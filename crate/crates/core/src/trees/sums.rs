use num_traits::{One, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::eval::{sum_trees, Accumulated, SumMode};
use super::partitions::{set_partitions, set_partitions_into};
use super::topology::enumerate_trees;
use super::TreeError;
use crate::algebra::{imag_unit, scalar_from_ratio, EdgeFlavor, Leg, LegSet, Ring, Symbol};
use crate::rules::{DiffeoSpec, EdgeContext, EdgeVar, RuleTable, TheorySpec, VertexForm};
use crate::series::{bn_closed_forms, factorial};
use crate::{Poly, Rf, Scalar};

/// Mode of [`tree_sum_bprime`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BprimeMode {
    /// Enumerate trees, summing every interaction-vertex decoration.
    AllVertices,
    /// Free tree sums `b_k` on top with pure `lambda_s` trees hanging from
    /// their lower legs through uncancelled propagators.
    SOnly,
}

/// Per-tree record for `--trace`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub topology: String,
    pub decoration: String,
    pub amplitude: String,
}

/// A tree sum with its provenance and counts.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeSumResult {
    pub kind: &'static str,
    pub n: usize,
    pub offshell: Vec<Leg>,
    pub theory: String,
    pub diffeo: String,
    pub mode: String,
    pub tree_count: u64,
    pub decorated_count: u64,
    pub value: Rf,
    /// Split by interaction-vertex valence, for S-matrix sums.
    pub per_valence: Vec<(usize, Rf)>,
    pub trace: Option<Vec<TraceEntry>>,
}

impl Serialize for TreeSumResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Part {
            valence: usize,
            value: String,
        }
        let mut st = serializer.serialize_struct("TreeSumResult", 10)?;
        st.serialize_field("kind", self.kind)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("offshell_set", &self.offshell)?;
        st.serialize_field("theory", &self.theory)?;
        st.serialize_field("diffeo", &self.diffeo)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("tree_count", &self.tree_count)?;
        st.serialize_field("decorated_count", &self.decorated_count)?;
        st.serialize_field("value", &self.value.to_collected_string())?;
        let parts: Vec<Part> = self.per_valence.iter().map(|(k, v)| Part { valence: *k, value: v.to_string() }).collect();
        st.serialize_field("per_valence", &parts)?;
        if let Some(t) = &self.trace {
            st.serialize_field("trace", t)?;
        }
        st.end()
    }
}

/// Shared knobs for tree sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SumOptions {
    pub form: VertexForm,
    pub trace: bool,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { form: VertexForm::Subset, trace: false }
    }
}

fn form_name(form: VertexForm) -> &'static str {
    match form {
        VertexForm::Compact => "compact",
        VertexForm::Subset => "subset",
    }
}

fn leg_count(n: usize) -> Result<Leg, TreeError> {
    Leg::try_from(n).ok().filter(|&n| n < 63).ok_or(TreeError::TooManyLegs(n))
}

fn trace_entries(acc: &Accumulated, decoration: &str) -> Vec<TraceEntry> {
    acc.trace
        .iter()
        .map(|(t, v)| TraceEntry { topology: t.clone(), decoration: decoration.to_string(), amplitude: v.to_string() })
        .collect()
}

fn rooted_sum(n: usize, theory: &TheorySpec, diffeo: &DiffeoSpec, mode: SumMode, opts: SumOptions) -> Result<(Accumulated, u64), TreeError> {
    let legs = leg_count(n)?;
    let rules = RuleTable::new(theory, diffeo, opts.form, n + 1)?;
    let trees = enumerate_trees(legs, true);
    let acc = sum_trees(&trees, &rules, mode, LegSet::range(1, legs), true, opts.trace);
    Ok((acc, trees.len() as u64))
}

/// `b_n`: rooted free-theory tree sum, leaves onshell, root propagator
/// included.
pub fn tree_sum_b(n: usize, diffeo: &DiffeoSpec, opts: SumOptions) -> Result<TreeSumResult, TreeError> {
    tree_sum_b_in(n, &TheorySpec::free(), diffeo, opts)
}

/// `b_n` for any free theory; a generalized propagator gives the sum over
/// `X` variables.
pub fn tree_sum_b_in(n: usize, theory: &TheorySpec, diffeo: &DiffeoSpec, opts: SumOptions) -> Result<TreeSumResult, TreeError> {
    if n == 0 {
        return Err(TreeError::TooFewLegs(n));
    }
    let theory = theory.without_interactions();
    let base = TreeSumResult {
        kind: "b",
        n,
        offshell: vec![0],
        theory: theory.to_string(),
        diffeo: diffeo.to_string(),
        mode: form_name(opts.form).into(),
        tree_count: 1,
        decorated_count: 1,
        value: Rf::one(),
        per_valence: Vec::new(),
        trace: opts.trace.then(Vec::new),
    };
    if n == 1 {
        return Ok(base);
    }
    let (acc, count) = rooted_sum(n, &theory, diffeo, SumMode::Free, opts)?;
    Ok(TreeSumResult {
        tree_count: count,
        decorated_count: acc.decorations,
        value: acc.total(),
        trace: opts.trace.then(|| trace_entries(&acc, "free")),
        ..base
    })
}

/// `A^J_n`: amputated sum over all trees and decorations with `n` external
/// legs, legs outside `offshell` onshell.
pub fn tree_sum_a(n: usize, offshell: LegSet, theory: &TheorySpec, diffeo: &DiffeoSpec, opts: SumOptions) -> Result<TreeSumResult, TreeError> {
    let legs = leg_count(n)?;
    if n < 3 {
        return Err(TreeError::TooFewLegs(n));
    }
    if !offshell.is_subset(LegSet::range(1, legs)) {
        return Err(TreeError::OffshellSet(format!("{offshell:?}")));
    }
    let rules = RuleTable::new(theory, diffeo, opts.form, n)?;
    let trees = enumerate_trees(legs, false);
    let mode = if theory.interactions.is_empty() { SumMode::Free } else { SumMode::AllDecorations };
    let acc = sum_trees(&trees, &rules, mode, LegSet::range(1, legs).difference(offshell), false, opts.trace);
    Ok(TreeSumResult {
        kind: "A",
        n,
        offshell: offshell.iter().collect(),
        theory: theory.to_string(),
        diffeo: diffeo.to_string(),
        mode: form_name(rules.form()).into(),
        tree_count: trees.len() as u64,
        decorated_count: acc.decorations,
        value: acc.total(),
        per_valence: Vec::new(),
        trace: opts.trace.then(|| trace_entries(&acc, if mode == SumMode::Free { "free" } else { "all" })),
    })
}

/// `S^(s)_n`: all-onshell amputated trees with exactly one `phi^s`
/// interaction vertex, split by that vertex's valence.
pub fn s_linear_tree_sum(n: usize, s: usize, diffeo: &DiffeoSpec, opts: SumOptions) -> Result<TreeSumResult, TreeError> {
    let legs = leg_count(n)?;
    if n < 3 {
        return Err(TreeError::TooFewLegs(n));
    }
    let theory = TheorySpec::with_interactions(&[s])?;
    let rules = RuleTable::new(&theory, diffeo, opts.form, n)?;
    let trees = enumerate_trees(legs, false);
    let acc = sum_trees(&trees, &rules, SumMode::SLinear(s), LegSet::range(1, legs), false, opts.trace);
    Ok(TreeSumResult {
        kind: "S",
        n,
        offshell: Vec::new(),
        theory: theory.to_string(),
        diffeo: diffeo.to_string(),
        mode: format!("linear-lambda{s}"),
        tree_count: trees.len() as u64,
        decorated_count: acc.decorations,
        value: acc.total(),
        per_valence: acc.parts.iter().map(|(k, v)| (*k, v.clone())).collect(),
        trace: opts.trace.then(|| trace_entries(&acc, &format!("one w{s}"))),
    })
}

/// `b'_n` of the `phi^s` theory.
pub fn tree_sum_bprime(n: usize, s: usize, diffeo: &DiffeoSpec, mode: BprimeMode, opts: SumOptions) -> Result<TreeSumResult, TreeError> {
    let theory = TheorySpec::with_interactions(&[s])?;
    let mut out = TreeSumResult {
        kind: "bprime",
        n,
        offshell: vec![0],
        theory: theory.to_string(),
        diffeo: diffeo.to_string(),
        mode: String::new(),
        tree_count: 1,
        decorated_count: 1,
        value: Rf::one(),
        per_valence: Vec::new(),
        trace: opts.trace.then(Vec::new),
    };
    if n == 0 {
        return Err(TreeError::TooFewLegs(n));
    }
    match mode {
        BprimeMode::AllVertices => {
            out.mode = format!("all_vertices/{}", form_name(opts.form));
            if n > 1 {
                let (acc, count) = rooted_sum(n, &theory, diffeo, SumMode::AllDecorations, opts)?;
                out.tree_count = count;
                out.decorated_count = acc.decorations;
                out.value = acc.total();
                out.trace = opts.trace.then(|| trace_entries(&acc, "all"));
            }
        }
        BprimeMode::SOnly => {
            out.mode = "s_only".into();
            let lambda = theory.interactions[0].lambda.clone();
            let (value, count) = bprime_structural(n, s, &lambda, diffeo, EdgeFlavor::Standard);
            out.value = value;
            out.tree_count = count;
            out.decorated_count = count;
        }
    }
    Ok(out)
}

/// Hanging sums `L(B)` over all subsets `B` of `1..=n`: 1 for singletons,
/// else `(i/x_B)(-i lambda) sum_{partitions of B into s-1 blocks} prod L`.
/// Also returns how many pure-interaction trees each `L(B)` stands for.
fn hanging_sums(n: Leg, s: usize, lambda: &Rf, flavor: EdgeFlavor) -> Vec<(Rf, u64)> {
    let full = LegSet::range(1, n).bits() as usize;
    let mut table: Vec<(Rf, u64)> = vec![(Rf::zero(), 0); full + 1];
    let mut subsets: Vec<LegSet> = (1..=full).map(|b| LegSet::from_bits(b as u64)).filter(|b| b.is_subset(LegSet::range(1, n))).collect();
    subsets.sort_by_key(|b| b.len());
    for b in subsets {
        let entry = if b.len() == 1 {
            (Rf::one(), 1)
        } else {
            let mut acc = Rf::zero();
            let mut count = 0;
            for p in set_partitions_into(b, s - 1) {
                let prod = p.iter().fold(Rf::one(), |x, blk| &x * &table[blk.bits() as usize].0);
                count += p.iter().map(|blk| table[blk.bits() as usize].1).product::<u64>();
                acc = acc + prod;
            }
            let prop = Rf::reciprocal_of(Symbol::Edge(flavor, b)).expect("edge symbol");
            (&(&acc * &prop) * lambda, count)
        };
        table[b.bits() as usize] = entry;
    }
    table
}

/// `b'_n = sum_k b_k sum_{partitions into k blocks} prod_B L(B)` with the
/// closed-form `b_k`. Returns the value and the number of trees it sums.
pub fn bprime_structural(n: usize, s: usize, lambda: &Rf, diffeo: &DiffeoSpec, flavor: EdgeFlavor) -> (Rf, u64) {
    let legs = n as Leg;
    let b = bn_closed_forms(n, &diffeo.padded(n));
    let hang = hanging_sums(legs, s, lambda, flavor);
    let mut value = Rf::zero();
    let mut count = 0u64;
    for p in set_partitions(LegSet::range(1, legs)) {
        let k = p.len();
        if b[k].is_zero() && k != 1 {
            continue;
        }
        let prod = p.iter().fold(b[k].clone(), |x, blk| &x * &hang[blk.bits() as usize].0);
        count += p.iter().map(|blk| hang[blk.bits() as usize].1).product::<u64>();
        value = value + prod;
    }
    (value, count)
}

/// `b_n` from the root-vertex recursion over partitions of the leaves and
/// subsets of the top vertex's edges, lower `b` taken from this same
/// recursion and singleton variables set to zero.
pub fn recursive_b(n: usize, diffeo: &DiffeoSpec, flavor: EdgeFlavor) -> Result<TreeSumResult, TreeError> {
    leg_count(n)?;
    if n == 0 {
        return Err(TreeError::TooFewLegs(n));
    }
    let a = diffeo.padded(n + 1);
    let mut b = vec![Rf::zero(), Rf::one()];
    for m in 2..=n {
        let ctx = EdgeContext::Rooted { n: m as Leg };
        let top = EdgeVar::new(LegSet::single(0), ctx)?;
        let mut sum = Rf::zero();
        for p in set_partitions(LegSet::range(1, m as Leg)).into_iter().filter(|p| p.len() >= 2) {
            let k = p.len();
            let coeff = p.iter().fold(Rf::one(), |x, blk| &x * &b[blk.len()]);
            if coeff.is_zero() {
                continue;
            }
            let mut edges: Vec<LegSet> = p.clone();
            edges.push(top.far());
            let mut vertex = Rf::zero();
            for mask in 1u32..(1 << (k + 1)) - 1 {
                let j = mask.count_ones() as usize;
                let w = (&a[k - j] * &a[j - 1]).scale(&Scalar::from_bigint(&(factorial(k + 1 - j) * factorial(j))));
                if w.is_zero() {
                    continue;
                }
                let union = (0..=k).filter(|i| mask & (1 << i) != 0).fold(LegSet::EMPTY, |u, i| u.union(edges[i]));
                let legs_q = ctx.canonical(union);
                if legs_q.len() == 1 {
                    continue;
                }
                vertex = vertex + &w * &Rf::var(Symbol::Edge(flavor, legs_q));
            }
            sum = sum + &coeff * &vertex;
        }
        let top_var = Rf::reciprocal_of(Symbol::Edge(flavor, LegSet::range(1, m as Leg))).expect("edge symbol");
        b.push((&sum * &top_var).scale(&scalar_from_ratio(-1, 2)));
    }
    Ok(TreeSumResult {
        kind: "recursive_b",
        n,
        offshell: vec![0],
        theory: match flavor {
            EdgeFlavor::Standard => "standard".into(),
            EdgeFlavor::Generalized => "generalized".into(),
        },
        diffeo: diffeo.to_string(),
        mode: "recursion".into(),
        tree_count: 0,
        decorated_count: 0,
        value: b[n].clone(),
        per_valence: Vec::new(),
        trace: None,
    })
}

/// `A^4_4` (or `A'^4_4` with cubic and quartic interactions) glued from
/// closed-form `b_2, b_3` and the three exchange channels:
/// `-i b_3 sum x - i lambda_4 + sum_channels M_ab M_cd i/x_ab` with
/// `M_ab = -i b_2 (x_a + x_b) - i lambda_3`.
pub fn glue_a44(diffeo: &DiffeoSpec, theory: &TheorySpec) -> Result<Rf, TreeError> {
    theory.validate()?;
    if theory.is_generalized() {
        return Err(TreeError::Unsupported("gluing needs the standard propagator".into()));
    }
    let b = bn_closed_forms(3, &diffeo.padded(3));
    let ctx = EdgeContext::Unrooted { n: 4 };
    let i = imag_unit();
    let x = |legs: &[Leg]| Rf::var(Symbol::edge(ctx.canonical(legs.iter().copied().collect())));
    let lambda = |s: usize| theory.interaction(s).map(|w| w.lambda.clone()).unwrap_or_else(Rf::zero);
    let sum_x = (1..=4).fold(Rf::zero(), |acc, j| acc + x(&[j]));
    let mut value = (&b[3] * &sum_x).scale(&-i.clone()) - lambda(4).scale(&i);
    let m = |p: Leg, q: Leg| -> Rf { (&b[2] * &(x(&[p]) + x(&[q]))).scale(&-i.clone()) - lambda(3).scale(&i) };
    for (p, q, r, t) in [(1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2, 3)] {
        let prop = Rf::reciprocal_of(Symbol::edge(ctx.canonical([p, q].into_iter().collect()))).expect("edge").scale(&i);
        value = value + &(&m(p, q) * &m(r, t)) * &prop;
    }
    Ok(value)
}

/// `-i c sum_j X_j` over the given legs.
pub fn symmetric_offshell(c: &Rf, legs: LegSet, flavor: EdgeFlavor) -> Rf {
    let sum = legs.iter().fold(Poly::zero(), |acc, j| &acc + &Poly::var(Symbol::Edge(flavor, LegSet::single(j))));
    c.mul_poly(&sum).scale(&-imag_unit())
}
