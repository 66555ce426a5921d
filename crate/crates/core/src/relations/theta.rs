use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::{int, rat, Binding, Coefficient, MultiPoly, Rational};
use crate::error::{Error, Result};
use crate::strata::{BoundaryDivisor, Stratum, TautClass};

/// Subsets of {1..n} as sorted label lists, in bitmask order.
fn subsets(n: u32) -> Vec<Vec<u32>> {
    (0u32..1 << n).map(|mask| (1..=n).filter(|&i| mask & (1 << (i - 1)) != 0).collect()).collect()
}

fn a_sum(vars: &[String], p: &[u32]) -> MultiPoly {
    let mut s = MultiPoly::zero(vars);
    for &i in p {
        s = s.add(&MultiPoly::var(vars, &vars[i as usize - 1]).expect("indexed variable"));
    }
    s
}

/// The terms (h, P) of the Θ-divisor with their coefficients -a_P²/4, one
/// entry per pair as written (so each divisor appears twice).
fn written_terms(g: u32, n: u32) -> Vec<(BoundaryDivisor, MultiPoly)> {
    let vars = MultiPoly::indexed_vars("a", n as usize);
    let quarter = rat(-1, 4);
    let mut out = Vec::new();
    for h in 0..=g {
        for p in subsets(n) {
            let coeff = a_sum(&vars, &p).pow(2).scale(&quarter);
            out.push((BoundaryDivisor::separating(h, &p), coeff));
        }
    }
    out
}

/// The same sum with (h, P) and (g - h, P^c) merged and the vanishing
/// unstable divisors dropped.
fn merged_terms(g: u32, n: u32) -> Vec<(BoundaryDivisor, MultiPoly)> {
    let mut merged: BTreeMap<(u32, Vec<u32>), (BoundaryDivisor, MultiPoly)> = BTreeMap::new();
    for (d, c) in written_terms(g, n) {
        let BoundaryDivisor::Separating { genus: h, legs } = &d else { unreachable!() };
        let p: Vec<u32> = legs.iter().copied().collect();
        let pc: Vec<u32> = (1..=n).filter(|i| !legs.contains(i)).collect();
        let key = std::cmp::min((*h, p), (g - h, pc));
        if (key.0 == 0 && key.1.is_empty()) || (key.0 == g && key.1.len() == n as usize) {
            continue;
        }
        let entry = merged.entry(key.clone()).or_insert_with(|| {
            (BoundaryDivisor::separating(key.0, &key.1), MultiPoly::zero(c.variables()))
        });
        entry.1 = entry.1.add(&c);
    }
    merged.into_values().filter(|(_, c)| !c.is_zero()).collect()
}

fn check_ramification(a: &[i64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidInput("at least one marking is required".into()));
    }
    if a.iter().sum::<i64>() != 0 {
        return Err(Error::InvalidInput(format!("ramification vector {a:?} does not sum to zero")));
    }
    Ok(())
}

fn numeric_terms(g: u32, a: &[i64]) -> Vec<(BoundaryDivisor, Rational)> {
    merged_terms(g, a.len() as u32)
        .into_iter()
        .map(|(d, c)| (d, c.eval_int(a)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

fn mul_terms<C: Coefficient>(x: &TautClass<C>, terms: &[(BoundaryDivisor, C)]) -> Result<TautClass<C>> {
    let mut out = TautClass::zero(x.genus(), x.markings());
    for (d, c) in terms {
        let part = x.mul_divisor(d)?.mul_coefficient(c);
        out = out.add(&part)?;
    }
    Ok(out)
}

fn symbolic_fundamental(g: u32, n: u32) -> Result<TautClass<MultiPoly>> {
    let vars = MultiPoly::indexed_vars("a", n as usize);
    Ok(TautClass::single(Stratum::fundamental(g, n)?, MultiPoly::one(&vars)))
}

/// The divisor -¼ Σ_{h=0}^{g} Σ_{P ⊆ [n]} a_P² δ_h^P on M̄_{g,n}, with
/// coefficients in a1..an and the conventions δ_0^{i} = δ_g^{[n]∖i} = -ψ_i,
/// δ_0^∅ = δ_g^{[n]} = 0.
pub fn theta_divisor(g: u32, n: u32) -> Result<TautClass<MultiPoly>> {
    let one = symbolic_fundamental(g, n)?;
    mul_terms(&one, &written_terms(g, n))
}

/// The Θ-divisor evaluated at an integer vector with zero sum.
pub fn theta_divisor_at(g: u32, a: &[i64]) -> Result<TautClass> {
    check_ramification(a)?;
    mul_terms(&TautClass::fundamental(g, a.len() as u32)?, &numeric_terms(g, a))
}

/// Θ^d with coefficients in a1..an.
pub fn theta_power_symbolic(g: u32, n: u32, d: u32) -> Result<TautClass<MultiPoly>> {
    let terms = merged_terms(g, n);
    let mut x = symbolic_fundamental(g, n)?;
    for _ in 0..d {
        x = mul_terms(&x, &terms)?;
    }
    Ok(x)
}

/// Θ^{g+1} at an integer vector: a relation on compact type.
pub fn theta_power_relation(g: u32, a: &[i64]) -> Result<TautClass> {
    check_ramification(a)?;
    let terms = numeric_terms(g, a);
    let mut x = TautClass::fundamental(g, a.len() as u32)?;
    for _ in 0..=g {
        x = mul_terms(&x, &terms)?;
    }
    Ok(x)
}

/// Σ_{d ≤ max_degree} Θ^d / d! at an integer vector.
pub fn theta_exp(g: u32, a: &[i64], max_degree: u32) -> Result<TautClass> {
    check_ramification(a)?;
    let terms = numeric_terms(g, a);
    let mut power = TautClass::fundamental(g, a.len() as u32)?;
    let mut out = power.clone();
    let mut fact = Rational::one();
    for d in 1..=max_degree {
        power = mul_terms(&power, &terms)?;
        fact *= int(d as i64);
        out = out.add(&power.scale(&(Rational::one() / &fact)))?;
    }
    Ok(out)
}

/// Substitutes a_n = -(a_1 + … + a_{n-1}) in every coefficient.
pub fn eliminate_last(c: &TautClass<MultiPoly>) -> Result<TautClass<MultiPoly>> {
    let n = c.markings() as usize;
    if n == 0 {
        return Ok(c.clone());
    }
    let vars = MultiPoly::indexed_vars("a", n);
    let mut minus = MultiPoly::zero(&vars);
    for v in &vars[..n - 1] {
        minus = minus.sub(&MultiPoly::var(&vars, v)?);
    }
    let last = vars[n - 1].clone();
    let mut terms = Vec::new();
    for (s, p) in c.terms() {
        terms.push((s.clone(), p.substitute(&[(last.as_str(), Binding::Poly(minus.clone()))])?));
    }
    TautClass::from_terms(c.genus(), c.markings(), terms)
}

/// Coefficient of the a-monomial with exponents `m` (one per variable).
pub fn a_coefficient(c: &TautClass<MultiPoly>, m: &[u32]) -> TautClass {
    c.map_coefficients(|p| p.coefficient(m))
}

/// ½ Σ a_i² ψ_i on M̄_{g,n}, symbolically.
pub fn half_sum_psi(g: u32, n: u32) -> Result<TautClass<MultiPoly>> {
    let vars = MultiPoly::indexed_vars("a", n as usize);
    let mut terms = Vec::new();
    for i in 1..=n {
        let mut e = vec![0; n as usize];
        e[i as usize - 1] = 2;
        let mut psi = vec![0; n as usize];
        psi[i as usize - 1] = 1;
        terms.push((Stratum::monomial(g, &psi, &[])?, MultiPoly::monomial(&vars, e, rat(1, 2))));
    }
    TautClass::from_terms(g, n, terms)
}
