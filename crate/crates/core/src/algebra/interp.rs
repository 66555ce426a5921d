use num_traits::{One, Zero};

use super::{int, MultiPoly, Rational};
use crate::error::{Error, Result};

/// Exact univariate interpolation in the variable `r`.
///
/// The first `degree_bound + 1` samples determine the polynomial; every
/// further sample must lie on it, otherwise the degree bound was too small.
pub fn lagrange_interpolate(samples: &[(i64, Rational)], degree_bound: usize) -> Result<MultiPoly> {
    let needed = degree_bound + 1;
    if samples.len() < needed {
        return Err(Error::Interpolation(format!(
            "{} samples cannot determine a polynomial of degree {degree_bound}",
            samples.len()
        )));
    }
    for (i, (x, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(y, _)| y == x) {
            return Err(Error::Interpolation(format!("duplicated sample point {x}")));
        }
    }
    let base = &samples[..needed];
    // coefficients, lowest degree first
    let mut coeffs = vec![Rational::zero(); needed];
    for (i, (xi, yi)) in base.iter().enumerate() {
        let mut basis = vec![Rational::one()];
        let mut denom = Rational::one();
        for (j, (xj, _)) in base.iter().enumerate() {
            if i == j {
                continue;
            }
            // basis *= (r - xj)
            let mut next = vec![Rational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * int(*xj);
            }
            basis = next;
            denom *= int(xi - xj);
        }
        let w = yi / denom;
        for (k, c) in basis.iter().enumerate() {
            coeffs[k] += c * &w;
        }
    }
    let poly = MultiPoly::univariate("r", &coeffs);
    for (x, y) in &samples[needed..] {
        if &poly.eval_int(&[*x]) != y {
            return Err(Error::Interpolation(format!(
                "sample at {x} is inconsistent with degree bound {degree_bound}"
            )));
        }
    }
    Ok(poly)
}

/// Closed form of `sum_{a=1}^{x} a^k` as a polynomial in `x`.
pub fn faulhaber_sum(k: u32) -> MultiPoly {
    let mut acc = Rational::zero();
    let mut samples = Vec::with_capacity(k as usize + 2);
    for x in 0..=(k as i64 + 1) {
        if x > 0 {
            acc += int(x).pow(k as i32);
        }
        samples.push((x, acc.clone()));
    }
    let p = lagrange_interpolate(&samples, k as usize + 1).expect("power sums are polynomial");
    let coeffs: Vec<Rational> =
        (0..=k + 1).map(|e| p.coefficient(&[e])).collect();
    MultiPoly::univariate("x", &coeffs)
}
