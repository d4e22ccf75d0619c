//! Acceptance harness: one line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use diffeo_core::algebra::{imag_unit, EdgeFlavor, Leg, LegSet, Ring, Symbol};
use diffeo_core::rules::{free_vertex, generalized_vertex, interaction_vertex, DiffeoSpec, EdgeContext, EdgeVar, TheorySpec};
use diffeo_core::trees::{tree_sum_a, tree_sum_b, tree_sum_bprime, BprimeMode, SumOptions};
use diffeo_core::verify::{default_suite, reproduce, run_check, run_suite, CheckName, CheckParams, CheckSpec, Fault, Report, Status};
use diffeo_core::{Rf, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

const SEED: u64 = 2024;
const SUITE_BUDGET: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;

fn a(j: u32) -> Rf {
    Rf::var(Symbol::DiffeoCoeff(j))
}

fn lambda(s: u32) -> Rf {
    Rf::var(Symbol::Coupling(s))
}

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn i_times(c: i64) -> Scalar {
    imag_unit() * int(c)
}

/// Edge variable `x_S` in the unrooted `n`-leg context, canonicalized.
fn x_in(n: Leg, legs: &[Leg], flavor: EdgeFlavor) -> Rf {
    let e = EdgeVar::new(legs.iter().copied().collect(), EdgeContext::Unrooted { n }).expect("proper subset");
    Rf::var(e.symbol(flavor))
}

/// Rooted edge variable; the block below the edge is already canonical.
fn x_rooted(legs: &[Leg]) -> Rf {
    Rf::var(Symbol::edge(legs.iter().copied().collect()))
}

fn inv(r: &Rf) -> Rf {
    r.try_inv().expect("edge variables are units")
}

fn sum_x(n: Leg, flavor: EdgeFlavor) -> Rf {
    (1..=n).fold(Rf::zero(), |acc, j| acc + x_in(n, &[j], flavor))
}

fn legs(n: Leg) -> Vec<EdgeVar> {
    (1..=n).map(|l| EdgeVar::leg(l, EdgeContext::Unrooted { n }).expect("leg")).collect()
}

fn expect_eq(label: &str, got: &Rf, want: &Rf) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want}"))
    }
}

/// Runs a golden comparison and enforces the per-example time limit.
fn timed(label: &str, f: impl FnOnce() -> Result<(), String>) -> Result<(), String> {
    let start = Instant::now();
    f()?;
    let t = start.elapsed();
    if t > Duration::from_secs(1) {
        return Err(format!("{label} took {t:?}"));
    }
    Ok(())
}

fn goldens() -> Outcome {
    let d = DiffeoSpec::symbolic(6);
    let opts = SumOptions::default();
    let msq = Rf::var(Symbol::MassSq);
    let std = EdgeFlavor::Standard;
    let mut count = 0;
    let mut check = |label: &str, f: &dyn Fn() -> Result<(Rf, Rf), String>| -> Result<(), String> {
        count += 1;
        timed(label, || {
            let (got, want) = f()?;
            expect_eq(label, &got, &want)
        })
    };
    let err = |e: &dyn std::fmt::Display| e.to_string();

    let b2 = a(1).scale(&int(-2));
    let b3 = a(2).scale(&int(-6)) + a(1).pow(2).scale(&int(12));
    check("b2", &|| Ok((tree_sum_b(2, &d, opts).map_err(|e| err(&e))?.value, b2.clone())))?;
    check("b3", &|| Ok((tree_sum_b(3, &d, opts).map_err(|e| err(&e))?.value, b3.clone())))?;

    // Diffeomorphism vertices with their m^2 terms.
    let iv = [
        (3, a(1).scale(&i_times(2)), Rf::zero()),
        (4, a(2).scale(&i_times(6)) + a(1).pow(2).scale(&i_times(4)), a(1).pow(2).scale(&i_times(4))),
        (5, a(3).scale(&i_times(24)) + (&a(1) * &a(2)).scale(&i_times(36)), (&a(1) * &a(2)).scale(&i_times(60))),
    ];
    for (n, f, g) in iv {
        check(&format!("iv{n}"), &|| {
            let got = free_vertex(n as usize, &legs(n), &d, &msq).map_err(|e| err(&e))?;
            Ok((got, &(&f * &sum_x(n, std)) + &(&g * &msq)))
        })?;
    }

    // Interaction vertices -i w^(s)_n.
    let w = [
        (3, 3, lambda(3).scale(&i_times(-1))),
        (3, 4, (&lambda(3) * &a(1)).scale(&i_times(-12))),
        (3, 5, (&lambda(3) * &(a(2) + a(1).pow(2))).scale(&i_times(-60))),
        (4, 3, Rf::zero()),
        (4, 4, lambda(4).scale(&i_times(-1))),
        (4, 5, (&lambda(4) * &a(1)).scale(&i_times(-20))),
        (4, 6, (&lambda(4) * &(a(2).scale(&int(2)) + a(1).pow(2).scale(&int(3)))).scale(&i_times(-60))),
    ];
    for (s, n, want) in w {
        check(&format!("w{s}_{n}"), &|| Ok((interaction_vertex(n, s, &lambda(s as u32), &d), want.clone())))?;
    }

    // b'_n for s = 3. b'_2(S) is b'_2 with its root variable set to x_S.
    let b4 = tree_sum_b(4, &d, opts).map_err(|e| err(&e))?.value;
    let bp2 = |root: &[Leg]| &b2 + &(&lambda(3) * &inv(&x_rooted(root)));
    let vertex = lambda(3).scale(&i_times(-1));
    let prop = |l: &[Leg]| inv(&x_rooted(l)).scale(&imag_unit());
    let bprime = |n: usize| -> Result<Rf, String> { Ok(tree_sum_bprime(n, 3, &d, BprimeMode::AllVertices, opts).map_err(|e| err(&e))?.value) };
    check("bprime2", &|| Ok((bprime(2)?, bp2(&[1, 2]))))?;
    check("bprime3", &|| {
        let hang = prop(&[2, 3]) + prop(&[1, 3]) + prop(&[1, 2]);
        Ok((bprime(3)?, &b3 + &(&(&bp2(&[1, 2, 3]) * &vertex) * &hang)))
    })?;
    check("bprime4", &|| {
        let pairs: [[Leg; 2]; 6] = [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]];
        let single = pairs.iter().fold(Rf::zero(), |acc, p| acc + prop(p));
        let disjoint = [([1, 2], [3, 4]), ([1, 3], [2, 4]), ([1, 4], [2, 3])]
            .iter()
            .fold(Rf::zero(), |acc, (p, q)| acc + &prop(p) * &prop(q));
        // A pair nested in a triple: 4 triples with 3 pairs each.
        let mut nested = Rf::zero();
        for t in [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]] {
            for (u, v) in [(0, 1), (0, 2), (1, 2)] {
                nested = nested + &prop(&[t[u], t[v]]) * &prop(&t);
            }
        }
        let top = &bp2(&[1, 2, 3, 4]) * &vertex.pow(2);
        Ok((bprime(4)?, &(&b4 + &(&(&b3 * &vertex) * &single)) + &(&top * &(disjoint + nested))))
    })?;

    // Four-point amplitudes of the free theory.
    let free = TheorySpec::free();
    check("A1_4", &|| {
        let mut total = Rf::zero();
        for j in 1..=4 {
            total = total + tree_sum_a(4, LegSet::single(j), &free, &d, opts).map_err(|e| err(&e))?.value;
        }
        Ok((total, (&b3 * &sum_x(4, std)).scale(&i_times(-1))))
    })?;
    check("A4_4", &|| {
        let got = tree_sum_a(4, LegSet::range(1, 4), &free, &d, opts).map_err(|e| err(&e))?.value;
        let x = |l: &[Leg]| x_in(4, l, std);
        let mut want = (&b3 * &sum_x(4, std)).scale(&i_times(-1));
        for (p, q, r, t) in [(1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2, 3)] {
            let channel = &(&(x(&[p]) + x(&[q])) * &(x(&[r]) + x(&[t]))) * &inv(&x(&[p, q]));
            want = want + (&b2.pow(2) * &channel).scale(&i_times(-1));
        }
        Ok((got, want))
    })?;

    // Generalized four-valent vertex; X_{2+3} is the same variable as X_{1+4}.
    check("generalized iv4", &|| {
        let gen = EdgeFlavor::Generalized;
        let x = |l: &[Leg]| x_in(4, l, gen);
        let want = &(&a(2) * &sum_x(4, gen)).scale(&i_times(6)) + &(&a(1).pow(2) * &(x(&[1, 2]) + x(&[1, 3]) + x(&[2, 3]))).scale(&i_times(4));
        Ok((generalized_vertex(4, &legs(4), &d, gen).map_err(|e| err(&e))?, want))
    })?;
    Ok(format!("{count} goldens, each under 1 s"))
}

/// `n! [t^n] g` where `g` inverts `t + sum_k a_k t^(k+1)`, by fixed-point
/// iteration over plain rationals.
fn inverse_coefficient(a: &[BigRational], n: usize) -> BigRational {
    let mul = |p: &[BigRational], q: &[BigRational]| {
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, x) in p.iter().enumerate() {
            for (j, y) in q.iter().enumerate().take(n + 1 - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let mut t = vec![BigRational::zero(); n + 1];
    t[1] = BigRational::one();
    let mut g = t.clone();
    for _ in 0..n {
        let mut next = t.clone();
        let mut power = g.clone();
        for ak in a.iter().skip(1) {
            power = mul(&power, &g);
            for (c, p) in next.iter_mut().zip(&power) {
                *c -= ak * p;
            }
        }
        g = next;
    }
    let fact: BigInt = (1..=n).map(BigInt::from).product();
    &g[n] * BigRational::from_integer(fact)
}

fn numeric_b_oracle(max_n: usize) -> Result<(), String> {
    let q = |p: i64, r: i64| BigRational::new(p.into(), r.into());
    // a_0 = 1, a_j = (-1)^j (j+1)/(j+2).
    let coeffs: Vec<BigRational> = (0..max_n as i64).map(|j| if j == 0 { q(1, 1) } else { q(if j % 2 == 0 { j + 1 } else { -j - 1 }, j + 2) }).collect();
    let d = DiffeoSpec::from_coeffs(coeffs.iter().map(|c| Rf::constant(Scalar::new(c.clone(), BigRational::zero()))).collect()).map_err(|e| e.to_string())?;
    for n in 2..=max_n {
        let got = tree_sum_b(n, &d, SumOptions::default()).map_err(|e| e.to_string())?.value;
        let want = Rf::constant(Scalar::new(inverse_coefficient(&coeffs, n), BigRational::zero()));
        expect_eq(&format!("numeric b{n}"), &got, &want)?;
    }
    Ok(())
}

fn find<'r>(reports: &'r [Report], name: CheckName, s: Option<usize>) -> Result<&'r Report, String> {
    reports
        .iter()
        .find(|r| r.check == name && s.map_or(true, |s| r.params.s == s))
        .ok_or_else(|| format!("no {name} report in the default suite"))
}

/// The report passed, at least at the given size, with residuals checked.
fn passed(reports: &[Report], name: CheckName, s: Option<usize>, min_n: usize) -> Result<usize, String> {
    let r = find(reports, name, s)?;
    if r.status != Status::Pass {
        let w = r.witness.as_ref().map(|w| format!("{}: {}", w.case, w.residual)).unwrap_or_default();
        return Err(format!("{name} {}: {w}", r.status));
    }
    if r.params.max_n < min_n {
        return Err(format!("{name} ran only to n = {}", r.params.max_n));
    }
    if r.residuals_checked == 0 {
        return Err(format!("{name} checked nothing"));
    }
    Ok(r.residuals_checked)
}

fn symmetric_a1(max_n: usize) -> Result<(), String> {
    let d = DiffeoSpec::symbolic(max_n);
    let free = TheorySpec::free();
    for n in 3..=max_n {
        let legs = n as Leg;
        let b = tree_sum_b(n - 1, &d, SumOptions::default()).map_err(|e| e.to_string())?.value;
        let mut total = Rf::zero();
        for j in 1..=legs {
            total = total + tree_sum_a(n, LegSet::single(j), &free, &d, SumOptions::default()).map_err(|e| e.to_string())?.value;
        }
        expect_eq(&format!("sum_j A1_{n}"), &total, &(&b * &sum_x(legs, EdgeFlavor::Standard)).scale(&i_times(-1)))?;
    }
    Ok(())
}

fn fault_injection() -> Result<usize, String> {
    let p = |max_n: usize, s: usize| CheckParams { max_n, s, order: 5, trials: 3, seed: SEED, dim: 4 };
    let specs = [
        (CheckName::Bn, p(4, 3)),
        (CheckName::SmatrixFree, p(4, 3)),
        (CheckName::Interaction, p(4, 3)),
        (CheckName::Bprime, p(3, 3)),
        (CheckName::Adiabatic, p(3, 3)),
        (CheckName::Generalized, p(3, 3)),
        (CheckName::Nonlocal, p(3, 3)),
        (CheckName::Kinematics, p(3, 3)),
        (CheckName::Series, p(3, 3)),
    ];
    for (name, params) in specs.clone() {
        let spec = CheckSpec::new(name, params).with_fault(Fault::PerturbDiffeoCoefficient { index: 1 });
        let report = run_check(&spec);
        let w = report.witness.as_ref().ok_or_else(|| format!("{name}: fault gave no witness"))?;
        if report.status != Status::Fail {
            return Err(format!("{name}: fault not detected"));
        }
        let again = reproduce(&spec, w).map_err(|e| format!("{name}: {e}"))?;
        if again.is_zero() || again.to_string() != w.residual {
            return Err(format!("{name}: witness {} did not reproduce", w.case));
        }
    }
    Ok(specs.len())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let reports = run_suite(&default_suite(SEED));
    let suite_time = start.elapsed();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("worked-example goldens", Box::new(goldens)),
        (
            "b_n constant and equal to the closed form, 2 <= n <= 7",
            Box::new(|| {
                let k = passed(&reports, CheckName::Bn, None, 7)?;
                numeric_b_oracle(7)?;
                Ok(format!("{k} residuals; numeric inversion oracle agrees"))
            }),
        ),
        (
            "A0_n = 0 and A1_n = -i b_(n-1) sum x_j, 3 <= n <= 7",
            Box::new(|| {
                let k = passed(&reports, CheckName::SmatrixFree, None, 7)?;
                symmetric_a1(5)?;
                Ok(format!("{k} residuals; full symmetrization for n <= 5"))
            }),
        ),
        (
            "S_n = -i lambda_s delta_ns for s in {3,4}, n <= 8, enumeration vs Bell sum",
            Box::new(|| {
                let k3 = passed(&reports, CheckName::Interaction, Some(3), 8)?;
                let k4 = passed(&reports, CheckName::Interaction, Some(4), 8)?;
                Ok(format!("{} residuals", k3 + k4))
            }),
        ),
        (
            "b'_n all-vertex and s-only modes agree, s = 3, n <= 6",
            Box::new(|| Ok(format!("{} residuals", passed(&reports, CheckName::Bprime, Some(3), 6)?))),
        ),
        (
            "Fuss-Catalan coefficients: b_k, b'_n and the functional residual vanish",
            Box::new(|| {
                let k3 = passed(&reports, CheckName::Adiabatic, Some(3), 7)?;
                let k4 = passed(&reports, CheckName::Adiabatic, Some(4), 7)?;
                for s in [3, 4] {
                    if find(&reports, CheckName::Adiabatic, Some(s))?.params.order < 10 {
                        return Err("functional residual checked below order 10".into());
                    }
                }
                Ok(format!("{} residuals", k3 + k4))
            }),
        ),
        (
            "generalized propagator: A1_n, X_e cancellation, recursive b_n, n <= 6",
            Box::new(|| Ok(format!("{} residuals", passed(&reports, CheckName::Generalized, None, 6)?))),
        ),
        (
            "non-local transformation: identity betas and induced generalized theory",
            Box::new(|| Ok(format!("{} residuals", passed(&reports, CheckName::Nonlocal, None, 6)?))),
        ),
        (
            "kinematic oracle: 50 exact conserving points in D = 4, n in {3,4,5}",
            Box::new(|| {
                let k = passed(&reports, CheckName::Kinematics, None, 5)?;
                let p = &find(&reports, CheckName::Kinematics, None)?.params;
                if p.trials < 50 || p.dim != 4 {
                    return Err(format!("ran {} trials in D = {}", p.trials, p.dim));
                }
                Ok(format!("{k} residuals"))
            }),
        ),
        (
            "series round trip to order 10 and fault injection",
            Box::new(|| {
                let k = passed(&reports, CheckName::Series, None, 0)?;
                if find(&reports, CheckName::Series, None)?.params.order < 10 {
                    return Err("round trip checked below order 10".into());
                }
                let faults = fault_injection()?;
                if suite_time > SUITE_BUDGET {
                    return Err(format!("default suite took {suite_time:?}"));
                }
                Ok(format!("{k} residuals; {faults} injected faults caught and reproduced; suite {:.0?}", suite_time))
            }),
        ),
    ];

    let mut failures = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2}  {title}  ({detail})", k + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2}  {title}  ({why})", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
