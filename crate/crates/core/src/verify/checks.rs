use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Case, CheckName, CheckParams, CheckSpec, Fault, VerifyError, Witness};
use crate::algebra::{imag_unit, EdgeFlavor, Leg, LegSet, Ring, Symbol};
use crate::rules::{free_vertex, generalized_vertex, DiffeoSpec, EdgeContext, EdgeVar, NonlocalSpec, TheorySpec};
use crate::series::{adiabatic_coeffs, bn_closed_forms, factorial, fc_functional_residual, sn_bell_formula, PowerSeries};
use crate::trees::kinematics::{evaluate_edges, pair_basis, specialize_generalized, invariant_symbol, EdgeModel, Kinematics};
use crate::trees::{
    bind_root, glue_a44, recursive_b, s_linear_tree_sum, symmetric_offshell, tree_sum_a, tree_sum_b, tree_sum_b_in,
    tree_sum_bprime, BprimeMode, SumOptions,
};
use crate::{Rf, Scalar};

type Parts = Vec<(String, Rf)>;

/// The standard suite: every check at its default size.
pub fn default_suite(seed: u64) -> Vec<CheckSpec> {
    let p = |max_n: usize, s: usize| CheckParams { max_n, s, seed, ..CheckParams::default() };
    vec![
        CheckSpec::new(CheckName::Bn, p(7, 3)),
        CheckSpec::new(CheckName::SmatrixFree, p(7, 3)),
        CheckSpec::new(CheckName::Interaction, p(8, 3)),
        CheckSpec::new(CheckName::Interaction, p(8, 4)),
        CheckSpec::new(CheckName::Bprime, p(6, 3)),
        CheckSpec::new(CheckName::Adiabatic, p(7, 3)),
        CheckSpec::new(CheckName::Adiabatic, p(7, 4)),
        CheckSpec::new(CheckName::Generalized, p(6, 3)),
        CheckSpec::new(CheckName::Nonlocal, p(6, 3)),
        CheckSpec::new(CheckName::Kinematics, p(5, 3)),
        CheckSpec::new(CheckName::Series, p(7, 3)),
    ]
}

/// Re-evaluates the residual a witness points at.
pub fn reproduce(spec: &CheckSpec, witness: &Witness) -> Result<Rf, VerifyError> {
    let (label, part) = witness.case.split_once('/').unwrap_or((witness.case.as_str(), ""));
    let case = cases(spec)?.into_iter().find(|c| c.label == label).ok_or_else(|| VerifyError::UnknownCase(witness.case.clone()))?;
    let parts = (case.eval)()?;
    parts.into_iter().find(|(p, _)| p == part).map(|(_, r)| r).ok_or_else(|| VerifyError::UnknownCase(witness.case.clone()))
}

pub(super) fn cases(spec: &CheckSpec) -> Result<Vec<Case<'static>>, VerifyError> {
    let p = &spec.params;
    match spec.name {
        CheckName::Bn => bn_cases(p.max_n, spec.fault),
        CheckName::SmatrixFree => smatrix_cases(p.max_n, spec.fault),
        CheckName::Interaction => interaction_cases(p.s, p.max_n, spec.fault),
        CheckName::Bprime => bprime_cases(p.s, p.max_n, spec.fault),
        CheckName::Adiabatic => adiabatic_cases(p.s, p.max_n, p.order, spec.fault),
        CheckName::Generalized => {
            let beta = (0..3).map(|k| Rf::var(Symbol::PropagatorBeta(k))).collect();
            generalized_cases(TheorySpec::generalized(beta)?, p.max_n, spec.fault, "")
        }
        CheckName::Nonlocal => nonlocal_cases(p.max_n, spec.fault),
        CheckName::Kinematics => kinematics_cases(p, spec.fault),
        CheckName::Series => series_cases(p, spec.fault),
    }
}

fn part(name: impl Into<String>, r: Rf) -> (String, Rf) {
    (name.into(), r)
}

fn i() -> Scalar {
    imag_unit()
}

fn lambda(s: usize) -> Rf {
    Rf::var(Symbol::Coupling(s as u32))
}

fn x(legs: &[Leg]) -> Rf {
    Rf::var(Symbol::edge(legs.iter().copied().collect()))
}

fn inv_x(legs: &[Leg]) -> Rf {
    Rf::reciprocal_of(Symbol::edge(legs.iter().copied().collect())).expect("edge symbol")
}

fn xp() -> Rf {
    Rf::var(Symbol::FixedOffshell)
}

fn perturbed(d: &DiffeoSpec, fault: Option<Fault>) -> Result<DiffeoSpec, VerifyError> {
    let Some(Fault::PerturbDiffeoCoefficient { index }) = fault else { return Ok(d.clone()) };
    let mut a = d.padded(index.max(d.max_order()));
    a[index] = &a[index] + &Rf::one();
    Ok(DiffeoSpec::from_coeffs(a)?)
}

/// `1` when the fault targets the expected value at `n`.
fn shift(fault: Option<Fault>, n: usize) -> Rf {
    match fault {
        Some(Fault::PerturbExpected { n: m }) if m == n => Rf::one(),
        _ => Rf::zero(),
    }
}

fn is_kinematic(s: Symbol) -> bool {
    s.is_edge() || s == Symbol::MassSq
}

fn bn_cases(max_n: usize, fault: Option<Fault>) -> Result<Vec<Case<'static>>, VerifyError> {
    let d = DiffeoSpec::symbolic(max_n);
    let computed = perturbed(&d, fault)?;
    let closed = bn_closed_forms(max_n, &d.padded(max_n));
    let a = |j: u32| Rf::var(Symbol::DiffeoCoeff(j));
    let goldens = [
        (2, a(1).scale(&Scalar::from_int(-2))),
        (3, a(2).scale(&Scalar::from_int(-6)) + a(1).pow(2).scale(&Scalar::from_int(12))),
    ];
    Ok((2..=max_n)
        .map(|n| {
            let (computed, expected) = (computed.clone(), &closed[n] + &shift(fault, n));
            let golden = goldens.iter().find(|(m, _)| *m == n).map(|(_, g)| g.clone());
            Case::new(format!("b{n}"), Some(n), move || {
                let enumerated = tree_sum_b(n, &computed, SumOptions::default())?.value;
                let inverse = PowerSeries::from_shifted(&computed.padded(n), n).invert()?;
                let from_series = inverse.coeff(n).scale(&Scalar::from_bigint(&factorial(n)));
                let stray = if enumerated.contains_symbol(is_kinematic) { enumerated.clone() } else { Rf::zero() };
                let mut parts = vec![
                    part("enumerated-closed", &enumerated - &expected),
                    part("series-closed", &from_series - &expected),
                    part("kinematic-symbols", stray),
                ];
                if let Some(g) = &golden {
                    parts.push(part("worked-example", &expected - g));
                }
                Ok(parts)
            })
        })
        .collect())
}

/// `A^4_4 = -i b3 sum x - i b2^2 sum_channels (x_a+x_b)(x_c+x_d)/x_ab`.
fn a44_golden(b: &[Rf]) -> Rf {
    let sum_x = (1..=4).fold(Rf::zero(), |acc, j| acc + x(&[j]));
    let mut out = (&b[3] * &sum_x).scale(&-i());
    for (p, q, r, t) in [(1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2, 3)] {
        let term = &(&(x(&[p]) + x(&[q])) * &(x(&[r]) + x(&[t]))) * &inv_x(&[p, q]);
        out = out - (&b[2].pow(2) * &term).scale(&i());
    }
    out
}

fn smatrix_cases(max_n: usize, fault: Option<Fault>) -> Result<Vec<Case<'static>>, VerifyError> {
    let d = DiffeoSpec::symbolic(max_n);
    let computed = perturbed(&d, fault)?;
    let closed = bn_closed_forms(max_n, &d.padded(max_n));
    let free = TheorySpec::free();
    Ok((3..=max_n)
        .map(|n| {
            let (computed, closed, free) = (computed.clone(), closed.clone(), free.clone());
            Case::new(format!("A{n}"), Some(n), move || {
                let legs = n as Leg;
                let opts = SumOptions::default();
                let sh = shift(fault, n);
                let mut parts = vec![part("A0", &tree_sum_a(n, LegSet::EMPTY, &free, &computed, opts)?.value - &sh)];
                for j in [1, legs] {
                    let got = tree_sum_a(n, LegSet::single(j), &free, &computed, opts)?.value;
                    let expected = &symmetric_offshell(&closed[n - 1], LegSet::single(j), EdgeFlavor::Standard) + &sh;
                    parts.push(part(format!("A1[{j}]"), &got - &expected));
                    if j == legs {
                        // Meta-vertex: the single offshell leg carries x_p.
                        let mut b = crate::algebra::Bindings::new();
                        b.insert(Symbol::edge(LegSet::single(legs)), xp());
                        let bound = got.substitute(&b)?;
                        let expected = (&xp() * &closed[n - 1]).scale(&-i());
                        parts.push(part("meta-vertex", &bound - &(&expected + &sh)));
                    }
                }
                if n == 4 {
                    let all = tree_sum_a(4, LegSet::range(1, 4), &free, &computed, opts)?.value;
                    parts.push(part("A44-glued", &all - &glue_a44(&computed, &free)?));
                    parts.push(part("A44-worked-example", &all - &(&a44_golden(&closed) + &sh)));
                    let singleton = |s: Symbol| matches!(s, Symbol::Edge(_, l) if l.len() == 1);
                    let high = if all.numerator().total_degree_in(singleton) > 2 { all.clone() } else { Rf::zero() };
                    parts.push(part("A44-degree", high));
                }
                Ok(parts)
            })
        })
        .collect())
}

fn interaction_cases(s: usize, max_n: usize, fault: Option<Fault>) -> Result<Vec<Case<'static>>, VerifyError> {
    let d = DiffeoSpec::symbolic(max_n);
    let computed = perturbed(&d, fault)?;
    let a = d.padded(max_n);
    let b = bn_closed_forms(max_n, &a);
    Ok((3..=max_n)
        .map(|n| {
            let (computed, a, b) = (computed.clone(), a.clone(), b.clone());
            Case::new(format!("S{n}"), Some(n), move || {
                let enumerated = s_linear_tree_sum(n, s, &computed, SumOptions::default())?;
                let bell = sn_bell_formula(s, n, &a, &b);
                let delta = if n == s { lambda(s).scale(&-i()) } else { Rf::zero() };
                let expected = &delta + &shift(fault, n);
                let mut valences: Vec<usize> = enumerated.per_valence.iter().map(|(k, _)| *k).collect();
                valences.extend(bell.per_valence.iter().map(|(k, _)| *k));
                valences.sort_unstable();
                valences.dedup();
                let lookup = |v: &[(usize, Rf)], k: usize| v.iter().find(|(m, _)| *m == k).map(|(_, r)| r.clone()).unwrap_or_else(Rf::zero);
                let mut parts: Parts = valences
                    .into_iter()
                    .map(|k| part(format!("valence{k}"), &lookup(&enumerated.per_valence, k) - &lookup(&bell.per_valence, k)))
                    .collect();
                parts.push(part("enumerated", &enumerated.value - &expected));
                parts.push(part("bell", &bell.total - &expected));
                if s == 3 && n == 4 {
                    let single = (&lambda(3) * &Rf::var(Symbol::DiffeoCoeff(1))).scale(&(i() * Scalar::from_int(12)));
                    parts.push(part("worked-example-3", &lookup(&bell.per_valence, 3) - &single));
                    parts.push(part("worked-example-4", &lookup(&bell.per_valence, 4) + &single));
                }
                Ok(parts)
            })
        })
        .collect())
}

/// `b'_2` with root variable `x_root`: `b_2 + lambda_3 / x_root`.
fn bprime2(b2: &Rf, root: &[Leg]) -> Rf {
    b2 + &(&lambda(3) * &inv_x(root))
}

fn bprime_goldens(b: &[Rf], n: usize) -> Option<Rf> {
    let w = lambda(3).scale(&-i());
    match n {
        2 => Some(bprime2(&b[2], &[1, 2])),
        3 => {
            let hang = (inv_x(&[2, 3]) + inv_x(&[1, 3]) + inv_x(&[1, 2])).scale(&i());
            Some(&b[3] + &(&(&bprime2(&b[2], &[1, 2, 3]) * &w) * &hang))
        }
        4 => {
            let pairs: Vec<[Leg; 2]> = vec![[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]];
            let single = pairs.iter().fold(Rf::zero(), |acc, p| acc + inv_x(p).scale(&i()));
            let minus_one = -Scalar::one();
            let double = [([1, 2], [3, 4]), ([1, 3], [2, 4]), ([1, 4], [2, 3])]
                .iter()
                .fold(Rf::zero(), |acc, (p, q)| acc + (&inv_x(p) * &inv_x(q)).scale(&minus_one));
            let mut nested = Rf::zero();
            for t in [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]] {
                for (u, v) in [(0, 1), (0, 2), (1, 2)] {
                    nested = nested + (&inv_x(&[t[u], t[v]]) * &inv_x(&t)).scale(&minus_one);
                }
            }
            let top = &bprime2(&b[2], &[1, 2, 3, 4]) * &w.pow(2);
            Some(&(&b[4] + &(&(&b[3] * &w) * &single)) + &(&top * &(double + nested)))
        }
        _ => None,
    }
}

fn bprime_cases(s: usize, max_n: usize, fault: Option<Fault>) -> Result<Vec<Case<'static>>, VerifyError> {
    let d = DiffeoSpec::symbolic(max_n.max(4));
    let computed = perturbed(&d, fault)?;
    let b = bn_closed_forms(max_n.max(4), &d.padded(max_n.max(4)));
    let theory = TheorySpec::with_interactions(&[s])?;
    Ok((1..=max_n)
        .map(|n| {
            let (d, computed, b, theory) = (d.clone(), computed.clone(), b.clone(), theory.clone());
            Case::new(format!("bprime{n}"), Some(n), move || {
                let opts = SumOptions::default();
                let all = tree_sum_bprime(n, s, &computed, BprimeMode::AllVertices, opts)?.value;
                let only = &tree_sum_bprime(n, s, &d, BprimeMode::SOnly, opts)?.value + &shift(fault, n);
                let mut parts = vec![part("modes", &all - &only)];
                if n + 1 < s || n == 1 {
                    parts.push(part("below-s", &all - &b[n]));
                }
                if s == 3 {
                    if let Some(g) = bprime_goldens(&b, n) {
                        parts.push(part("worked-example", &all - &g));
                    }
                    if n == 4 {
                        let offshell = tree_sum_a(4, LegSet::range(1, 4), &theory, &computed, opts)?.value;
                        parts.push(part("A44-glued", &offshell - &glue_a44(&d, &theory)?));
                        let sum_x = (1..=4).fold(Rf::zero(), |acc, j| acc + x(&[j]));
                        let w = lambda(3).scale(&-i());
                        let m = &w - &(&b[2] * &sum_x).scale(&i());
                        let chans = (inv_x(&[1, 2]) + inv_x(&[1, 3]) + inv_x(&[1, 4])).scale(&i());
                        let golden = &(&(&w * &m) * &chans) + &a44_golden(&b);
                        parts.push(part("A44-worked-example", &offshell - &golden));
                    }
                }
                Ok(parts)
            })
        })
        .collect())
}

fn series_as_rf<R: Clone + Into<Rf>>(coeffs: &[R]) -> Rf {
    let t = Rf::var(Symbol::generic("t"));
    coeffs.iter().enumerate().fold(Rf::zero(), |acc, (k, c)| acc + &c.clone().into() * &t.pow(k as u32))
}

fn adiabatic_cases(s: usize, max_n: usize, order: usize, fault: Option<Fault>) -> Result<Vec<Case<'static>>, VerifyError> {
    let d = DiffeoSpec::from_coeffs(adiabatic_coeffs(s, max_n))?;
    let computed = perturbed(&d, fault)?;
    let closed = bn_closed_forms(max_n, &computed.padded(max_n));
    let tuned = (&lambda(s) * &Rf::reciprocal_of(Symbol::FixedOffshell)?).scale(&-Scalar::one());
    let expected = move |k: usize| if k == s - 1 { tuned.clone() } else { Rf::zero() };
    let mut cases = vec![Case::new("functional-equation", None, move || {
        let r: PowerSeries<Rf> = fc_functional_residual(s - 1, order);
        Ok(vec![part("residual", series_as_rf(r.coeffs()))])
    })];
    for k in 2..=max_n {
        let (computed, closed_k, want) = (computed.clone(), closed[k].clone(), &expected(k) + &shift(fault, k));
        let half = (&lambda(3) * &Rf::reciprocal_of(Symbol::FixedOffshell)?).scale(&crate::algebra::scalar_from_ratio(1, 2));
        cases.push(Case::new(format!("b{k}"), Some(k), move || {
            let enumerated = tree_sum_b(k, &computed, SumOptions::default())?.value;
            let mut parts = vec![part("closed", &closed_k - &want), part("enumerated", &enumerated - &want)];
            if s == 3 && k == 2 {
                parts.push(part("a1", &computed.a(1) - &half));
            }
            Ok(parts)
        }));
    }
    for n in 2..=max_n {
        let computed = computed.clone();
        cases.push(Case::new(format!("bprime{n}"), Some(n), move || {
            let mut parts = Vec::new();
            for (name, mode) in [("all-vertices", BprimeMode::AllVertices), ("s-only", BprimeMode::SOnly)] {
                let v = tree_sum_bprime(n, s, &computed, mode, SumOptions::default())?.value;
                let bound = bind_root(&v, n as Leg, EdgeFlavor::Standard, xp())?;
                parts.push(part(name, &bound - &shift(fault, n)));
            }
            Ok(parts)
        }));
    }
    Ok(cases)
}

/// The generalized-propagator suite over `theory`; case labels get `prefix`.
fn generalized_cases(theory: TheorySpec, max_n: usize, fault: Option<Fault>, prefix: &str) -> Result<Vec<Case<'static>>, VerifyError> {
    let d = DiffeoSpec::symbolic(max_n);
    let computed = perturbed(&d, fault)?;
    let closed = bn_closed_forms(max_n, &d.padded(max_n));
    let beta = match &theory.propagator {
        crate::rules::Propagator::Generalized { beta } => beta.clone(),
        crate::rules::Propagator::Standard { .. } => return Err(VerifyError::Tree(crate::trees::TreeError::Unsupported("standard propagator".into()))),
    };
    let mut cases = Vec::new();
    for n in 1..=max_n {
        let (computed, closed, theory, beta) = (computed.clone(), closed.clone(), theory.clone(), beta.clone());
        cases.push(Case::new(format!("{prefix}n{n}"), Some(n), move || {
            let opts = SumOptions::default();
            let sh = shift(fault, n);
            let want = &closed[n] + &sh;
            let mut parts = vec![
                part("b", &tree_sum_b_in(n, &theory, &computed, opts)?.value - &want),
                part("recursive", &recursive_b(n, &computed, EdgeFlavor::Generalized)?.value - &want),
                part("recursive-standard", &recursive_b(n, &computed, EdgeFlavor::Standard)?.value - &want),
            ];
            if n >= 3 {
                for j in [1, n as Leg] {
                    let got = tree_sum_a(n, LegSet::single(j), &theory, &computed, opts)?.value;
                    let expected = &symmetric_offshell(&closed[n - 1], LegSet::single(j), EdgeFlavor::Generalized) + &sh;
                    parts.push(part(format!("A1[{j}]"), &got - &expected));
                    // X_j -> sum_k beta_k s_j^k on both sides.
                    let s_j = Rf::var(invariant_symbol(LegSet::single(j)));
                    let poly = beta.iter().rev().fold(Rf::zero(), |acc, c| &(&acc * &s_j) + c);
                    let specialized = &(&closed[n - 1] * &poly).scale(&-i()) + &sh;
                    parts.push(part(format!("A1[{j}]-specialized"), &specialize_generalized(&got, &beta)? - &specialized));
                }
            }
            Ok(parts)
        }));
    }
    for j in 3..=5usize {
        for k in 3..=5usize {
            let computed = computed.clone();
            let total = j + k - 2;
            cases.push(
                Case::new(format!("{prefix}edge[{j},{k}]"), Some(total), move || {
                    let ctx = EdgeContext::Unrooted { n: total as Leg };
                    let leg = |l: usize| EdgeVar::leg(l as Leg, ctx);
                    let e = EdgeVar::new(LegSet::range(j as Leg, total as Leg), ctx)?;
                    let mut left = vec![e];
                    left.extend((1..j).map(leg).collect::<Result<Vec<_>, _>>()?);
                    let mut right = vec![e.reversed()];
                    right.extend((j..=total).map(leg).collect::<Result<Vec<_>, _>>()?);
                    let all: Vec<EdgeVar> = (1..=total).map(leg).collect::<Result<_, _>>()?;
                    let flavor = EdgeFlavor::Generalized;
                    let xe = e.symbol(flavor);
                    let prop = Rf::reciprocal_of(xe)?.scale(&i());
                    let tree = &(&generalized_vertex(j, &left, &computed, flavor)? * &prop) * &generalized_vertex(k, &right, &computed, flavor)?;
                    let merged = generalized_vertex(total, &all, &computed, flavor)?;
                    Ok(vec![part("X_e", (&tree + &merged).coefficient_of(xe, 1))])
                })
                .with_tree(format!("v{j}-e-v{k}")),
            );
        }
    }
    Ok(cases)
}

fn nonlocal_cases(max_n: usize, fault: Option<Fault>) -> Result<Vec<Case<'static>>, VerifyError> {
    let msq = Rf::var(Symbol::MassSq);
    let spec = NonlocalSpec::symbolic(1);
    let mut cases = vec![
        Case::new("identity", None, {
            let msq = msq.clone();
            move || {
                let betas = NonlocalSpec::new(vec![Rf::one()], msq.clone())?.betas();
                let mut parts = vec![part("beta0", &betas[0] + &msq), part("beta1", &betas[1] - &Rf::one())];
                parts.extend(betas.iter().enumerate().skip(2).map(|(k, b)| part(format!("beta{k}"), b.clone())));
                Ok(parts)
            }
        }),
        Case::new("beta-formula", None, {
            let spec = spec.clone();
            move || {
                // beta(s) = (s - m^2) (sum_k alpha_k s^k)^2 as a product of series.
                let deg = spec.beta_degree();
                let alpha = PowerSeries::new((0..=deg).map(|k| spec.alpha(k)).collect(), deg);
                let kinetic = PowerSeries::new(vec![-spec.mass_sq.clone(), Rf::one()], deg);
                let oracle = kinetic.mul(&alpha.mul(&alpha)?)?;
                Ok(spec.betas().iter().enumerate().map(|(k, b)| part(format!("beta{k}"), b - oracle.coeff(k))).collect())
            }
        }),
    ];
    cases.extend(generalized_cases(spec.theory()?, max_n, fault, "nonlocal-")?);
    Ok(cases)
}

fn seed_for(seed: u64, n: usize, trial: usize) -> u64 {
    seed ^ ((n as u64) << 40) ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn random_mass(seed: u64) -> Scalar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    Scalar::new(BigRational::new(BigInt::from(rng.gen_range(1i64..=20)), BigInt::from(rng.gen_range(1i64..=7))), BigRational::zero())
}

fn kinematics_cases(p: &CheckParams, fault: Option<Fault>) -> Result<Vec<Case<'static>>, VerifyError> {
    let d = DiffeoSpec::symbolic(p.max_n);
    let computed = perturbed(&d, fault)?;
    let (trials, seed, dim) = (p.trials, p.seed, p.dim);
    let mut cases: Vec<Case<'static>> = (3..=p.max_n)
        .map(|n| {
            let (d, computed) = (d.clone(), computed.clone());
            Case::new(format!("vertex{n}"), Some(n), move || {
                let ctx = EdgeContext::Unrooted { n: n as Leg };
                let legs: Vec<EdgeVar> = (1..=n as Leg).map(|l| EdgeVar::leg(l, ctx)).collect::<Result<_, _>>()?;
                let msq = Rf::var(Symbol::MassSq);
                let compact = free_vertex(n, &legs, &computed, &msq)?;
                let subset = &generalized_vertex(n, &legs, &d, EdgeFlavor::Standard)? + &shift(fault, n);
                let diff = &compact - &subset;
                let mut parts = vec![part("symbolic-basis", pair_basis(&diff, n as Leg, &msq)?)];
                for t in 0..trials {
                    let s = seed_for(seed, n, t);
                    let kin = Kinematics::random(LegSet::range(1, n as Leg), dim, s)?;
                    let model = EdgeModel::Standard { mass_sq: random_mass(s) };
                    let value = evaluate_edges(&diff, &kin, &model)?;
                    let again = evaluate_edges(&diff, &kin, &model)?;
                    parts.push(part(format!("trial{t}"), value.clone()));
                    parts.push(part(format!("trial{t}-determinism"), &value - &again));
                }
                Ok(parts)
            })
        })
        .collect();
    cases.push(Case::new("conservation4", Some(4), move || {
        let identity = x(&[1, 2]) + x(&[1, 3]) + x(&[2, 3]) - x(&[1]) - x(&[2]) - x(&[3]) - x(&[4]) - Rf::var(Symbol::MassSq);
        let mut parts = Vec::new();
        for t in 0..trials {
            let s = seed_for(seed, 4, t);
            let kin = Kinematics::random(LegSet::range(1, 4), dim, s)?;
            let model = EdgeModel::Standard { mass_sq: random_mass(s) };
            parts.push(part(format!("trial{t}"), &evaluate_edges(&identity, &kin, &model)? - &shift(fault, 4)));
        }
        Ok(parts)
    }));
    Ok(cases)
}

fn random_series(order: usize, seed: u64) -> Vec<Rf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![Rf::one()];
    a.extend((1..order).map(|_| {
        let q = BigRational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=6)));
        Rf::constant(Scalar::new(q, BigRational::zero()))
    }));
    a
}

fn series_cases(p: &CheckParams, fault: Option<Fault>) -> Result<Vec<Case<'static>>, VerifyError> {
    let order = p.order;
    let round_trip = move |a: Vec<Rf>| -> Result<Parts, VerifyError> {
        let f = PowerSeries::from_shifted(&a, order);
        let g = f.invert()?;
        let bent = match fault {
            Some(Fault::PerturbDiffeoCoefficient { index }) if index < order => {
                let mut b = a.clone();
                b[index] = &b[index] + &Rf::one();
                PowerSeries::from_shifted(&b, order)
            }
            _ => f.clone(),
        };
        let mut id = PowerSeries::identity(order).coeffs().to_vec();
        for (k, c) in id.iter_mut().enumerate() {
            *c = &*c + &shift(fault, k);
        }
        let left = g.compose(&bent)?;
        let right = bent.compose(&g)?;
        let naive = bent.compose_naive(&g)?;
        let residual = |s: &PowerSeries<Rf>| series_as_rf(&s.coeffs().iter().zip(&id).map(|(u, v)| u - v).collect::<Vec<_>>());
        Ok(vec![
            part("invert-then-compose", residual(&left)),
            part("compose-then-invert", residual(&right)),
            part("faa-di-bruno-vs-naive", series_as_rf(&right.sub(&naive)?.coeffs().to_vec())),
        ])
    };
    let mut cases: Vec<Case<'static>> = (0..p.trials)
        .map(|t| {
            let a = random_series(order, p.seed.wrapping_add(t as u64));
            Case::new(format!("random{t}"), Some(order), move || round_trip(a.clone()))
        })
        .collect();
    let symbolic_order = order.min(8);
    cases.push(Case::new("symbolic", Some(symbolic_order), move || {
        let a = DiffeoSpec::symbolic(symbolic_order).padded(symbolic_order);
        let f = PowerSeries::from_shifted(&a, symbolic_order);
        let left = f.invert()?.compose(&f)?;
        let id = PowerSeries::<Rf>::identity(symbolic_order);
        Ok(vec![part("invert-then-compose", series_as_rf(left.sub(&id)?.coeffs()))])
    }));
    Ok(cases)
}
