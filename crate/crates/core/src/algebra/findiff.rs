use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{binomial, factorial, LinearValue, Rational};

/// Signed Stirling numbers of the first kind, `s(n, k)` for `n, k <= max`.
fn stirling_first(max: u32) -> Vec<Vec<BigInt>> {
    let m = max as usize;
    let mut s = vec![vec![BigInt::zero(); m + 1]; m + 1];
    s[0][0] = BigInt::one();
    for n in 0..m {
        for k in 0..=n {
            let cur = s[n][k].clone();
            s[n + 1][k + 1] += &cur;
            s[n + 1][k] -= cur * BigInt::from(n as u64);
        }
    }
    s
}

fn vectors_between(lower: &[u32], total_max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = lower.to_vec();
    let base: u32 = lower.iter().sum();
    if base > total_max {
        return out;
    }
    fn rec(i: usize, cur: &mut Vec<u32>, lower: &[u32], slack: u32, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for extra in 0..=slack {
            cur[i] = lower[i] + extra;
            rec(i + 1, cur, lower, slack - extra, out);
        }
        cur[i] = lower[i];
    }
    rec(0, &mut cur, lower, total_max - base, &mut out);
    out
}

/// Evaluation points and weights whose weighted sum of `f` equals
/// `monomial! * [coefficient of monomial in f]` for every polynomial `f`
/// of total degree at most `total_degree`.
///
/// Built from the Newton forward-difference expansion at the origin: the
/// binomial basis `C(x, k)` is converted to monomials with Stirling numbers.
pub fn stencil_points(monomial: &[u32], total_degree: u32) -> Vec<(Vec<i64>, Rational)> {
    let stirling = stirling_first(total_degree.max(1));
    let mfact: BigInt = monomial.iter().map(|&m| factorial(m)).product();
    let mut weights: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    for k in vectors_between(monomial, total_degree) {
        // coefficient of Delta^k f(0) in the monomial coefficient
        let mut ck = Rational::from_integer(mfact.clone());
        for (&ki, &mi) in k.iter().zip(monomial) {
            ck *= Rational::new(stirling[ki as usize][mi as usize].clone(), factorial(ki));
        }
        if ck.is_zero() {
            continue;
        }
        // Delta^k f(0) = sum_{j <= k} (-1)^{|k - j|} prod C(k_i, j_i) f(j)
        let zero = vec![0u32; k.len()];
        for j in vectors_between(&zero, k.iter().sum()) {
            if j.iter().zip(&k).any(|(a, b)| a > b) {
                continue;
            }
            let mut w = ck.clone();
            let mut sign_odd = false;
            for (&ji, &ki) in j.iter().zip(&k) {
                w *= Rational::from_integer(binomial(ki, ji));
                sign_odd ^= (ki - ji) % 2 == 1;
            }
            if sign_odd {
                w = -w;
            }
            *weights.entry(j).or_insert_with(Rational::zero) += w;
        }
    }
    weights
        .into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(j, w)| (j.into_iter().map(i64::from).collect(), w))
        .collect()
}

/// Returns `monomial! * coefficient` of `monomial` in `f`, using only integer
/// evaluations of `f`. Exact whenever `f` is a polynomial of total degree at
/// most `total_degree` with values in `V`.
pub fn finite_difference_extract<V, F>(f: F, monomial: &[u32], total_degree: u32) -> V
where
    V: LinearValue,
    F: Fn(&[i64]) -> V + Sync,
{
    let stencil = stencil_points(monomial, total_degree);
    if stencil.is_empty() {
        let origin = vec![0i64; monomial.len()];
        return f(&origin).zero_like();
    }
    let values: Vec<V> = stencil.par_iter().map(|(p, _)| f(p)).collect();
    let mut acc = values[0].zero_like();
    for ((_, w), v) in stencil.iter().zip(&values) {
        acc.add_scaled(v, w);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, MultiPoly};

    #[test]
    fn footnote_example() {
        // f(x, y) = a x^2 + b x y + c y^2 with (a, b, c) = (3, -5, 11)
        let f = |p: &[i64]| int(3 * p[0] * p[0] - 5 * p[0] * p[1] + 11 * p[1] * p[1]);
        assert_eq!(finite_difference_extract(f, &[1, 1], 2), int(-5));
        let zero = |_: &[i64]| int(0);
        assert_eq!(finite_difference_extract(zero, &[1, 1], 2), int(0));
    }

    #[test]
    fn square_of_sum() {
        let f = |p: &[i64]| int((p[0] + p[1]) * (p[0] + p[1]));
        assert_eq!(finite_difference_extract(f, &[1, 1], 2), int(2));
        // normalized by 2! for the square monomial
        assert_eq!(finite_difference_extract(f, &[2, 0], 2), int(2));
    }

    #[test]
    fn lower_degree_monomials_are_exact() {
        let v = MultiPoly::indexed_vars("a", 2);
        let mut p = MultiPoly::zero(&v);
        p.add_term(vec![3, 0], int(2));
        p.add_term(vec![1, 2], int(-7));
        p.add_term(vec![1, 0], int(4));
        p.add_term(vec![0, 0], int(9));
        let f = |x: &[i64]| p.eval_int(x);
        assert_eq!(finite_difference_extract(&f, &[1, 0], 3), int(4));
        assert_eq!(finite_difference_extract(&f, &[0, 0], 3), int(9));
        assert_eq!(finite_difference_extract(&f, &[1, 2], 3), int(-7 * 2));
        assert_eq!(finite_difference_extract(&f, &[0, 1], 3), int(0));
    }
}
