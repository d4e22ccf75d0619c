use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::SeriesError;
use crate::algebra::Ring;

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// All partial Bell polynomials `B[n][k]` for `n <= n_max`, evaluated at
/// `args[0] = x_1, args[1] = x_2, ...`. Missing arguments are never read
/// because `B_{n,k}` only involves `x_1 .. x_{n-k+1}`; callers check length.
pub fn bell_table<R: Ring>(n_max: usize, args: &[R]) -> Vec<Vec<R>> {
    let mut table: Vec<Vec<R>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row = vec![R::zero(); n + 1];
        if n == 0 {
            row[0] = R::one();
        }
        for (k, slot) in row.iter_mut().enumerate().skip(1) {
            // B_{n,k} = sum_i C(n-1, i-1) x_i B_{n-i,k-1}
            let mut acc = R::zero();
            for i in 1..=n + 1 - k {
                let prev = &table[n - i];
                if k - 1 >= prev.len() || prev[k - 1].is_zero() {
                    continue;
                }
                let Some(x) = args.get(i - 1) else { continue };
                if x.is_zero() {
                    continue;
                }
                acc = acc + R::from_bigint(&binomial(n - 1, i - 1)) * x.clone() * prev[k - 1].clone();
            }
            *slot = acc;
        }
        table.push(row);
    }
    table
}

/// Partial Bell polynomial `B_{n,k}(x_1, ..., x_{n-k+1})`.
pub fn bell_partial<R: Ring>(n: usize, k: usize, args: &[R]) -> Result<R, SeriesError> {
    if k > n {
        return Ok(R::zero());
    }
    if n == 0 {
        return Ok(R::one());
    }
    if k == 0 {
        return Ok(R::zero());
    }
    if args.len() < n - k + 1 {
        return Err(SeriesError::InsufficientBellArgs { n, k, have: args.len() });
    }
    Ok(bell_table(n, args).swap_remove(n).swap_remove(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn edge_cases() {
        let x = [q(2), q(3), q(5)];
        assert_eq!(bell_partial(0, 0, &x).unwrap(), q(1));
        assert_eq!(bell_partial(3, 0, &x).unwrap(), q(0));
        assert_eq!(bell_partial(2, 3, &x).unwrap(), q(0));
        assert_eq!(bell_partial(3, 1, &x).unwrap(), q(5));
        assert!(bell_partial(4, 1, &x).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 5), BigInt::zero());
        assert_eq!(factorial(6), BigInt::from(720));
    }
}
