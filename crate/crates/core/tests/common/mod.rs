//! Intersection numbers computed independently of the library's relation
//! code: Witten–Kontsevich numbers by the DVV recursion, κ integrals by the
//! permutation formula for pushing forward ψ powers, and integrals of strata
//! as products over vertices.
#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use taut_core::algebra::{rat, Rational};
use taut_core::strata::{BoundaryDivisor, TautClass};

fn double_factorial(n: i64) -> BigInt {
    let mut out = BigInt::one();
    let mut k = n;
    while k > 1 {
        out *= k;
        k -= 2;
    }
    out
}

fn df(n: i64) -> Rational {
    Rational::from_integer(double_factorial(n))
}

thread_local! {
    static WK: RefCell<HashMap<(u32, Vec<u32>), Rational>> = RefCell::new(HashMap::new());
}

/// ⟨τ_{d_1}⋯τ_{d_n}⟩_g.
pub fn wk(g: u32, d: &[u32]) -> Rational {
    let mut d = d.to_vec();
    d.sort_unstable();
    let n = d.len() as i64;
    if 2 * g as i64 - 2 + n <= 0 || d.iter().sum::<u32>() as i64 != 3 * g as i64 - 3 + n {
        return Rational::zero();
    }
    let key = (g, d.clone());
    if let Some(v) = WK.with(|m| m.borrow().get(&key).cloned()) {
        return v;
    }
    let v = if g == 0 && d == [0, 0, 0] {
        Rational::one()
    } else if g == 1 && d == [1] {
        rat(1, 24)
    } else if d.iter().all(|&x| x == 0) {
        Rational::zero()
    } else {
        let top = d.pop().unwrap();
        let k = top as i64 - 1;
        let mut acc = Rational::zero();
        for j in 0..d.len() {
            let dj = d[j] as i64;
            let mut e = d.clone();
            e[j] += k as u32;
            acc += df(2 * k + 2 * dj + 1) / df(2 * dj - 1) * wk(g, &e);
        }
        for r in 0..k {
            let s = k - 1 - r;
            let w = df(2 * r + 1) * df(2 * s + 1) * rat(1, 2);
            if g > 0 {
                let mut e = d.clone();
                e.push(r as u32);
                e.push(s as u32);
                acc += w.clone() * wk(g - 1, &e);
            }
            for mask in 0u32..1 << d.len() {
                let (i, jj): (Vec<usize>, Vec<usize>) = (0..d.len()).partition(|&x| mask & (1 << x) != 0);
                for g1 in 0..=g {
                    let mut a: Vec<u32> = i.iter().map(|&x| d[x]).collect();
                    a.push(r as u32);
                    let mut b: Vec<u32> = jj.iter().map(|&x| d[x]).collect();
                    b.push(s as u32);
                    acc += w.clone() * wk(g1, &a) * wk(g - g1, &b);
                }
            }
        }
        acc / df(2 * k + 3)
    };
    WK.with(|m| m.borrow_mut().insert(key, v.clone()));
    v
}

fn permutations(l: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(l - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, l - 1);
            out.push(q);
        }
    }
    out
}

fn cycle_sums(p: &[usize], b: &[u32]) -> Vec<u32> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut t = s;
        let mut sum = 0;
        while !seen[t] {
            seen[t] = true;
            sum += b[t];
            t = p[t];
        }
        out.push(sum);
    }
    out.sort_unstable();
    out
}

/// ∫_{M̄_{g,n}} ψ^d κ_{b_1}⋯κ_{b_l}.
pub fn vertex_integral(g: u32, psi: &[u32], kappa: &[u32]) -> Rational {
    if kappa.is_empty() {
        return wk(g, psi);
    }
    let mut ext = psi.to_vec();
    ext.extend(kappa.iter().map(|b| b + 1));
    let mut acc = wk(g, &ext);
    for p in permutations(kappa.len()) {
        if p.iter().enumerate().all(|(i, &x)| i == x) {
            continue;
        }
        acc -= vertex_integral(g, psi, &cycle_sums(&p, kappa));
    }
    acc
}

/// Integral of the top-degree part of a class.
pub fn integrate(c: &TautClass) -> Rational {
    let dim = 3 * c.genus() as i64 - 3 + c.markings() as i64;
    let mut acc = Rational::zero();
    for (s, coeff) in c.terms() {
        if s.codimension() as i64 != dim {
            continue;
        }
        let mut prod = coeff.clone();
        for v in 0..s.num_vertices() {
            let local: Vec<u32> = s.half_edges_at(v).into_iter().map(|h| s.psi(h)).collect();
            prod *= vertex_integral(s.vertex_genus(v), &local, s.kappa(v));
        }
        acc += prod;
    }
    acc
}

/// Boundary divisors of M̄_{g,n}, each once.
pub fn boundary_divisors(g: u32, n: u32) -> Vec<BoundaryDivisor> {
    let mut out: Vec<(BoundaryDivisor, TautClass)> = Vec::new();
    if g > 0 {
        out.push((BoundaryDivisor::Irreducible, TautClass::delta_irr(g, n).unwrap()));
    }
    for h in 0..=g {
        for mask in 0u32..1 << n {
            let legs: Vec<u32> = (1..=n).filter(|&l| mask & (1 << (l - 1)) != 0).collect();
            let left = 2 * h as i64 - 2 + legs.len() as i64 + 1;
            let right = 2 * (g - h) as i64 - 2 + (n as i64 - legs.len() as i64) + 1;
            if left <= 0 || right <= 0 {
                continue;
            }
            let d = BoundaryDivisor::separating(h, &legs);
            let class = TautClass::divisor(g, n, &d).unwrap();
            if !out.iter().any(|(_, c)| c == &class) {
                out.push((d, class));
            }
        }
    }
    out.into_iter().map(|(d, _)| d).collect()
}

#[derive(Clone)]
enum Generator {
    Psi(u32),
    Kappa(u32),
    Divisor(usize),
}

impl Generator {
    fn degree(&self) -> u32 {
        match self {
            Generator::Kappa(a) => *a,
            _ => 1,
        }
    }
}

fn multisets(gens: &[Generator], start: usize, degree: u32, out: &mut Vec<Vec<Generator>>, cur: &mut Vec<Generator>) {
    if degree == 0 {
        out.push(cur.clone());
        return;
    }
    for i in start..gens.len() {
        if gens[i].degree() <= degree {
            cur.push(gens[i].clone());
            multisets(gens, i, degree - gens[i].degree(), out, cur);
            cur.pop();
        }
    }
}

/// Checks ∫ c·β = 0 for every product β of ψ, κ and boundary divisors of
/// complementary degree. Returns the number of pairings checked.
pub fn assert_numerically_zero(c: &TautClass, degree: u32) -> usize {
    let (g, n) = (c.genus(), c.markings());
    let dim = 3 * g + n - 3;
    let divisors = boundary_divisors(g, n);
    let mut gens: Vec<Generator> = (1..=n).map(Generator::Psi).collect();
    gens.extend((1..=dim).map(Generator::Kappa));
    gens.extend((0..divisors.len()).map(Generator::Divisor));
    let mut products = Vec::new();
    multisets(&gens, 0, dim - degree, &mut products, &mut Vec::new());
    for beta in &products {
        let mut x = c.clone();
        for gen in beta {
            x = match gen {
                Generator::Psi(i) => x.mul_psi(*i).unwrap(),
                Generator::Kappa(a) => x.mul_kappa(*a).unwrap(),
                Generator::Divisor(k) => x.mul_divisor(&divisors[*k]).unwrap(),
            };
        }
        assert_eq!(integrate(&x), Rational::zero(), "non-zero pairing with a product of {} generators", beta.len());
    }
    products.len()
}
