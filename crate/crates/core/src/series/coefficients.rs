use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{bell_table, binomial, factorial, PowerSeries};
use crate::algebra::{imag_unit, Ring, Symbol};
use crate::{Poly, Rf};

/// `a_j`, with coefficients beyond the slice read as zero.
fn coeff<R: Ring>(a: &[R], j: usize) -> R {
    a.get(j).cloned().unwrap_or_else(R::zero)
}

fn int<R: Ring>(n: &BigInt) -> R {
    R::from_bigint(n)
}

/// `F_m(a, b) = b/(ma+b) * C(ma+b, m)`.
pub fn fuss_catalan(m: usize, a: usize, b: usize) -> BigInt {
    assert!(b > 0, "Fuss-Catalan numbers need b >= 1");
    let top = m * a + b;
    BigInt::from(b) * binomial(top, m) / BigInt::from(top)
}

/// `sum_m F_m(a, b) t^m` to order `n`.
pub fn fc_series<R: Ring>(a: usize, b: usize, n: usize) -> PowerSeries<R> {
    PowerSeries::new((0..=n).map(|m| int(&fuss_catalan(m, a, b))).collect(), n)
}

/// `C - (t C^a + 1)` for `C = sum_m F_m(a, 1) t^m`; the zero series.
pub fn fc_functional_residual<R: Ring>(a: usize, n: usize) -> PowerSeries<R> {
    let c: PowerSeries<R> = fc_series(a, 1, n);
    let rhs = PowerSeries::identity(n).mul(&c.pow(a)).and_then(|x| x.add(&PowerSeries::one(n))).expect("equal orders");
    c.sub(&rhs).expect("equal orders")
}

/// Coupling constants of the diffeomorphism vertex: `iv_n = i f_n sum x + i g_n m^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexCoefficients<R> {
    pub f: R,
    /// `c_{n-2}`.
    pub c: R,
    pub g: R,
}

/// `a` holds `a_0 = 1, a_1, a_2, ...`.
pub fn vertex_coefficients<R: Ring>(n: usize, a: &[R]) -> VertexCoefficients<R> {
    assert!(n >= 2, "vertex coefficients start at n = 2");
    let shifted: Vec<R> = (1..=n).map(|i| int::<R>(&factorial(i + 1)) * coeff(a, i)).collect();
    let table = bell_table(n - 2, &shifted);
    let f = table[n - 2].get(1).cloned().unwrap_or_else(R::zero) + table[n - 2].get(2).cloned().unwrap_or_else(R::zero);
    let args: Vec<R> = (1..=n).map(|i| int::<R>(&factorial(i)) * coeff(a, i - 1)).collect();
    let c = bell_table(n, &args)[n][2].clone();
    let g = R::from_int(n as i64) * f.clone() - c.clone();
    VertexCoefficients { f, c, g }
}

/// `g_n = n (n-2)!/2 sum_k a_{n-k-2} a_k (n-k-2) k`, the expanded form.
pub fn g_explicit<R: Ring>(n: usize, a: &[R]) -> R {
    let mut acc = R::zero();
    for k in 0..=n - 2 {
        let w = BigInt::from((n - k - 2) * k);
        if !w.is_zero() {
            acc = acc + int::<R>(&w) * coeff(a, n - k - 2) * coeff(a, k);
        }
    }
    let pre = BigRational::new(BigInt::from(n) * factorial(n - 2), BigInt::from(2));
    acc * R::from_rational(&pre)
}

/// `b_1 ..= b_{n_max}` (index 0 is unused and zero) from
/// `b_{m+1} = sum_k (m+k)!/m! B_{m,k}(-1! a_1, -2! a_2, ...)`.
pub fn bn_closed_forms<R: Ring>(n_max: usize, a: &[R]) -> Vec<R> {
    let mut out = vec![R::zero(); n_max + 1];
    if n_max == 0 {
        return out;
    }
    out[1] = R::one();
    let args: Vec<R> = (1..n_max).map(|i| -(int::<R>(&factorial(i)) * coeff(a, i))).collect();
    let table = bell_table(n_max - 1, &args);
    for m in 1..n_max {
        let mut acc = R::zero();
        for k in 1..=m {
            acc = acc + int::<R>(&(factorial(m + k) / factorial(m))) * table[m][k].clone();
        }
        out[m + 1] = acc;
    }
    out
}

pub fn bn_closed_form<R: Ring>(n: usize, a: &[R]) -> R {
    assert!(n >= 1, "b_n starts at n = 1");
    bn_closed_forms(n, a).swap_remove(n)
}

/// Diffeomorphism coefficients `a_0 ..= a_{max_j}` that remove the `phi^s`
/// interaction at offshellness `x_p`: `a_{j(s-2)} = (lambda_s/((s-1)! x_p))^j F_j(s-1, 1)`,
/// all others zero.
pub fn adiabatic_coeffs(s: usize, max_j: usize) -> Vec<Rf> {
    assert!(s >= 3, "interaction powers start at 3");
    let base = (&Rf::var(Symbol::Coupling(s as u32)) * &Rf::reciprocal_of(Symbol::FixedOffshell).expect("x_p is a denominator symbol"))
        .scale(&crate::Scalar::from_rational(&BigRational::new(One::one(), factorial(s - 1))));
    (0..=max_j)
        .map(|k| {
            if k % (s - 2) != 0 {
                return Rf::zero();
            }
            let j = k / (s - 2);
            base.pow(j as u32).scale(&crate::Scalar::from_bigint(&fuss_catalan(j, s - 1, 1)))
        })
        .collect()
}

/// The summands `B_{k,s}(1, 2! a_1, ...) B_{n,k}(b_1, b_2, ...)` for
/// `k = s ..= n`. `b[i]` holds `b_i`.
pub fn sn_bell_terms<R: Ring>(s: usize, n: usize, a: &[R], b: &[R]) -> Vec<(usize, R)> {
    let upper: Vec<R> = (1..=n).map(|i| int::<R>(&factorial(i)) * coeff(a, i - 1)).collect();
    let lower: Vec<R> = (1..=n).map(|i| coeff(b, i)).collect();
    let up = bell_table(n, &upper);
    let low = bell_table(n, &lower);
    (s..=n).map(|k| (k, up[k][s].clone() * low[n][k].clone())).collect()
}

/// S-matrix element linear in `lambda_s`, split by the valence `k` of the
/// interaction vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct SnBell {
    pub per_valence: Vec<(usize, Rf)>,
    pub total: Rf,
}

pub fn sn_bell_formula(s: usize, n: usize, a: &[Rf], b: &[Rf]) -> SnBell {
    let pre = Rf::from(Poly::var(Symbol::Coupling(s as u32))).scale(&-imag_unit());
    let per_valence: Vec<(usize, Rf)> = sn_bell_terms(s, n, a, b).into_iter().map(|(k, t)| (k, &pre * &t)).collect();
    let total = per_valence.iter().fold(Rf::zero(), |acc, (_, t)| &acc + t);
    SnBell { per_valence, total }
}
