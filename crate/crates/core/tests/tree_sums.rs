use diffeo_core::algebra::{EdgeFlavor, LegSet, Symbol};
use diffeo_core::rules::{DiffeoSpec, TheorySpec};
use diffeo_core::series::bn_closed_forms;
use diffeo_core::trees::{
    recursive_b, s_linear_tree_sum, symmetric_offshell, tree_sum_a, tree_sum_b, tree_sum_b_in, tree_sum_bprime,
    BprimeMode, SumOptions,
};
use diffeo_core::Rf;
use num_traits::Zero;

fn opts() -> SumOptions {
    SumOptions::default()
}

#[test]
fn b_small_values() {
    let d = DiffeoSpec::symbolic(6);
    assert_eq!(tree_sum_b(1, &d, opts()).unwrap().value.to_string(), "1");
    assert_eq!(tree_sum_b(2, &d, opts()).unwrap().value.to_string(), "-2*a1");
    assert_eq!(tree_sum_b(3, &d, opts()).unwrap().value.to_string(), "-6*a2+12*a1^2");
}

#[test]
fn b_matches_closed_form_through_seven() {
    let d = DiffeoSpec::symbolic(7);
    let closed = bn_closed_forms(7, &d.padded(7));
    for n in 1..=7 {
        let r = tree_sum_b(n, &d, opts()).unwrap();
        assert_eq!(r.value, closed[n], "n={n}");
    }
}

#[test]
fn recursive_b_matches_closed_form() {
    let d = DiffeoSpec::symbolic(7);
    let closed = bn_closed_forms(6, &d.padded(6));
    for n in 1..=6 {
        for flavor in [EdgeFlavor::Standard, EdgeFlavor::Generalized] {
            assert_eq!(recursive_b(n, &d, flavor).unwrap().value, closed[n], "n={n} {flavor:?}");
        }
    }
}

#[test]
fn free_amputated_sums() {
    let d = DiffeoSpec::symbolic(7);
    let t = TheorySpec::free();
    let closed = bn_closed_forms(6, &d.padded(6));
    for n in 3..=6u8 {
        assert!(tree_sum_a(n as usize, LegSet::EMPTY, &t, &d, opts()).unwrap().value.is_zero(), "n={n}");
        let one = tree_sum_a(n as usize, LegSet::single(1), &t, &d, opts()).unwrap().value;
        let expected = symmetric_offshell(&closed[n as usize - 1], LegSet::single(1), EdgeFlavor::Standard);
        assert_eq!(one, expected, "n={n}");
    }
}

#[test]
fn generalized_one_offshell() {
    let d = DiffeoSpec::symbolic(7);
    let beta: Vec<Rf> = (0..3).map(|k| Rf::var(Symbol::PropagatorBeta(k))).collect();
    let t = TheorySpec::generalized(beta).unwrap();
    let closed = bn_closed_forms(6, &d.padded(6));
    for n in 3..=6u8 {
        let one = tree_sum_a(n as usize, LegSet::single(1), &t, &d, opts()).unwrap().value;
        let expected = symmetric_offshell(&closed[n as usize - 1], LegSet::single(1), EdgeFlavor::Generalized);
        assert_eq!(one, expected, "n={n}");
        assert_eq!(tree_sum_b_in(n as usize, &t, &d, opts()).unwrap().value, closed[n as usize], "n={n}");
    }
}

#[test]
fn s_linear_cancels() {
    let d = DiffeoSpec::symbolic(8);
    for s in [3usize, 4] {
        for n in 3..=7 {
            let r = s_linear_tree_sum(n, s, &d, opts()).unwrap();
            let expected = if n == s { format!("-i*lambda{s}") } else { "0".into() };
            assert_eq!(r.value.to_string(), expected, "s={s} n={n}");
        }
    }
}

#[test]
fn bprime_modes_agree() {
    let d = DiffeoSpec::symbolic(6);
    assert_eq!(tree_sum_bprime(2, 3, &d, BprimeMode::AllVertices, opts()).unwrap().value.to_string(), "-2*a1+lambda3/x[1+2]");
    for n in 1..=6 {
        let a = tree_sum_bprime(n, 3, &d, BprimeMode::AllVertices, opts()).unwrap();
        let b = tree_sum_bprime(n, 3, &d, BprimeMode::SOnly, opts()).unwrap();
        assert_eq!(a.value, b.value, "n={n}");
    }
}
