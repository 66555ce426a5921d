use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::weighting::{solve, SpanningTree, Weighting};
use crate::algebra::{binomial, factorial, lagrange_interpolate, MultiPoly, Rational};
use crate::error::{Error, Result};
use crate::graphs::{enumerate_stable_graphs, StableGraph};
use crate::strata::{Stratum, TautClass};

/// Number of times the interpolation window is moved further out before an
/// inconsistency is reported.
const RETRIES: u32 = 3;

struct GraphData {
    graph: StableGraph,
    aut: u64,
    tree: SpanningTree,
    /// Edge exponent vectors k with E + |k| within the degree window.
    kvecs: Vec<Vec<u32>>,
    /// Expansion terms of each k vector, before the leg factors.
    templates: Vec<Vec<Template>>,
}

/// One term of Π_e (ψ_h + ψ_h')^{k_e} · Π_i ψ_i^{b_i}: the canonical stratum,
/// the binomial coefficient, and the leg exponents b.
struct Template {
    id: usize,
    coeff: Rational,
    legs: Vec<u32>,
}

/// The polynomial in r attached to one (graph, edge exponents) pair: the
/// coefficient of Π_e (ψ_h + ψ_h')^{k_e} before the leg factors.
#[derive(Clone, Debug)]
pub struct RPolynomial {
    pub graph: StableGraph,
    pub kvec: Vec<u32>,
    pub poly: MultiPoly,
}

/// Pixton's graph sum for fixed (g, n) and degree window, with the graph
/// list, automorphism counts and spanning trees computed once.
pub struct OmegaEngine {
    g: u32,
    n: u32,
    max_degree: u32,
    graphs: Vec<GraphData>,
    /// Canonical strata referenced by the templates.
    strata: Vec<Stratum>,
    /// Interpolated constant terms by graph, vertex sums of A and sample count.
    memo: Mutex<HashMap<(usize, Vec<i64>, Option<usize>), Vec<Rational>>>,
}

fn kvecs(edges: usize, budget: u32) -> Vec<Vec<u32>> {
    if edges == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=budget {
        for mut rest in kvecs(edges - 1, budget - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl OmegaEngine {
    pub fn new(g: u32, n: u32, max_degree: u32) -> Result<Self> {
        Self::with_degrees(g, n, 0, max_degree)
    }

    /// Engine producing only the parts of degree `min_degree..=max_degree`.
    pub fn with_degrees(g: u32, n: u32, min_degree: u32, max_degree: u32) -> Result<Self> {
        let mut ids: HashMap<Stratum, usize> = HashMap::new();
        let mut strata = Vec::new();
        let mut graphs = Vec::new();
        for graph in enumerate_stable_graphs(g, n, max_degree as usize)? {
            let e = graph.num_edges() as u32;
            let kv = kvecs(graph.num_edges(), max_degree - e);
            let mut templates = Vec::with_capacity(kv.len());
            for k in &kv {
                let mut ts = Vec::new();
                for (s, coeff, legs) in expansion_terms(&graph, k, n, min_degree, max_degree) {
                    if s.exceeds_dimension() {
                        continue;
                    }
                    let c = s.canonical();
                    let id = *ids.entry(c.clone()).or_insert_with(|| {
                        strata.push(c);
                        strata.len() - 1
                    });
                    ts.push(Template { id, coeff, legs });
                }
                templates.push(ts);
            }
            graphs.push(GraphData {
                aut: graph.automorphism_count(),
                tree: SpanningTree::new(&graph),
                kvecs: kv,
                templates,
                graph,
            });
        }
        Ok(OmegaEngine { g, n, max_degree, graphs, strata, memo: Mutex::new(HashMap::new()) })
    }

    /// Restricts the engine to strata accepted by `keep`. Graphs and edge
    /// exponents none of whose expansion terms pass are dropped before any
    /// weighting is enumerated.
    pub fn prune(&mut self, keep: impl Fn(&Stratum) -> bool) {
        let kept: Vec<bool> = self.strata.iter().map(&keep).collect();
        for gd in &mut self.graphs {
            for ts in &mut gd.templates {
                ts.retain(|t| kept[t.id]);
            }
            let mut i = 0;
            while i < gd.kvecs.len() {
                if gd.templates[i].is_empty() {
                    gd.kvecs.remove(i);
                    gd.templates.remove(i);
                } else {
                    i += 1;
                }
            }
        }
        self.graphs.retain(|gd| !gd.kvecs.is_empty());
        log::debug!(
            "pruned Ω engine on M({},{}) to {} graphs, {} edge-exponent vectors",
            self.g,
            self.n,
            self.graphs.len(),
            self.graphs.iter().map(|gd| gd.kvecs.len()).sum::<usize>()
        );
    }

    pub fn num_graphs(&self) -> usize {
        self.graphs.len()
    }

    fn check(&self, a: &[i64]) -> Result<()> {
        if a.len() != self.n as usize {
            return Err(Error::InvalidInput(format!("expected {} ramification entries", self.n)));
        }
        if a.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidInput("ramification entries must sum to zero".into()));
        }
        Ok(())
    }

    /// Σ_w Π_e (w_h w_h')^{k_e+1} over all weightings, for every k vector.
    fn moments(&self, gd: &GraphData, a: &[i64], r: u32) -> Vec<BigInt> {
        match self.moments_small(gd, a, r) {
            Some(v) => v.into_iter().map(BigInt::from).collect(),
            None => self.moments_big(gd, a, r),
        }
    }

    fn for_each_weighting(&self, gd: &GraphData, a: &[i64], r: u32, mut f: impl FnMut(&Weighting) -> bool) {
        let h1 = gd.tree.free.len() as u32;
        let mut w = Weighting { r, legs: Vec::new(), edges: Vec::new() };
        let mut free = vec![0u32; h1 as usize];
        for code in 0..(r as u64).pow(h1) {
            let mut c = code;
            for x in free.iter_mut() {
                *x = (c % r as u64) as u32;
                c /= r as u64;
            }
            solve(&gd.graph, &gd.tree, a, r, &free, &mut w);
            if !f(&w) {
                return;
            }
        }
    }

    /// Machine-integer version; `None` on overflow.
    fn moments_small(&self, gd: &GraphData, a: &[i64], r: u32) -> Option<Vec<i128>> {
        let max_k = gd.kvecs.iter().flatten().copied().max().unwrap_or(0) as usize;
        let mut acc = vec![0i128; gd.kvecs.len()];
        let mut ok = true;
        let mut powers: Vec<Vec<i128>> = Vec::new();
        self.for_each_weighting(gd, a, r, |w| {
            powers.clear();
            for &(x, y) in &w.edges {
                let p = x as i128 * y as i128;
                if p == 0 {
                    return true;
                }
                let mut row = Vec::with_capacity(max_k + 1);
                let mut cur = p;
                for _ in 0..=max_k {
                    row.push(cur);
                    match cur.checked_mul(p) {
                        Some(next) => cur = next,
                        None => cur = i128::MAX,
                    }
                }
                powers.push(row);
            }
            for (slot, k) in acc.iter_mut().zip(&gd.kvecs) {
                let mut t = 1i128;
                for (e, &ke) in k.iter().enumerate() {
                    let pe = powers[e][ke as usize];
                    match (pe != i128::MAX).then(|| t.checked_mul(pe)).flatten() {
                        Some(v) => t = v,
                        None => {
                            ok = false;
                            return false;
                        }
                    }
                }
                match slot.checked_add(t) {
                    Some(v) => *slot = v,
                    None => {
                        ok = false;
                        return false;
                    }
                }
            }
            true
        });
        ok.then_some(acc)
    }

    fn moments_big(&self, gd: &GraphData, a: &[i64], r: u32) -> Vec<BigInt> {
        let max_k = gd.kvecs.iter().flatten().copied().max().unwrap_or(0) as usize;
        let mut acc = vec![BigInt::zero(); gd.kvecs.len()];
        self.for_each_weighting(gd, a, r, |w| {
            let powers: Vec<Vec<BigInt>> = w
                .edges
                .iter()
                .map(|&(x, y)| {
                    let p = BigInt::from(x as u64 * y as u64);
                    let mut out = Vec::with_capacity(max_k + 1);
                    let mut cur = p.clone();
                    for _ in 0..=max_k {
                        out.push(cur.clone());
                        cur *= &p;
                    }
                    out
                })
                .collect();
            if powers.iter().any(|p| p[0].is_zero()) {
                return true;
            }
            for (slot, k) in acc.iter_mut().zip(&gd.kvecs) {
                let mut t = BigInt::one();
                for (e, &ke) in k.iter().enumerate() {
                    t *= &powers[e][ke as usize];
                }
                *slot += t;
            }
            true
        });
        acc
    }

    /// Coefficient of Π_e (ψ_h+ψ_h')^{k_e} at parameter r, before leg factors.
    fn graph_coefficients(&self, gd: &GraphData, a: &[i64], r: u32) -> Vec<Rational> {
        let h1 = gd.tree.free.len() as u32;
        let denom = BigInt::from(r).pow(h1) * BigInt::from(gd.aut);
        self.moments(gd, a, r)
            .into_iter()
            .zip(&gd.kvecs)
            .map(|(s, k)| edge_prefactor(k) * Rational::new(s, denom.clone()))
            .collect()
    }

    /// Ω^r_{g,A} truncated to the degree window.
    pub fn omega_r(&self, a: &[i64], r: u32) -> Result<TautClass> {
        self.check(a)?;
        if r == 0 {
            return Err(Error::InvalidInput("r must be positive".into()));
        }
        let lf = leg_factors(a, self.max_degree);
        let parts: Vec<Vec<(usize, Rational)>> = self
            .graphs
            .par_iter()
            .map(|gd| {
                let coeffs = if gd.graph.num_edges() == 0 {
                    vec![Rational::one()]
                } else {
                    self.graph_coefficients(gd, a, r)
                };
                let mut out = Vec::new();
                for (ts, c) in gd.templates.iter().zip(&coeffs) {
                    expand_into(ts, c, &lf, &mut out);
                }
                out
            })
            .collect();
        Ok(self.assemble(parts))
    }

    fn assemble(&self, parts: Vec<Vec<(usize, Rational)>>) -> TautClass {
        let mut acc: HashMap<usize, Rational> = HashMap::new();
        for (id, c) in parts.into_iter().flatten() {
            *acc.entry(id).or_insert_with(Rational::zero) += c;
        }
        TautClass::from_canonical_terms(
            self.g,
            self.n,
            acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(id, c)| (self.strata[id].clone(), c)),
        )
    }

    /// Interpolated polynomials in r for every (graph, k) with at least one
    /// edge, using the sample window starting after `r0`; the second half of
    /// the window checks the first.
    pub fn r_polynomials_window(&self, a: &[i64], r0: u32, samples: Option<usize>) -> Result<Vec<RPolynomial>> {
        self.check(a)?;
        self.r_polynomials_from(a, r0, samples)
    }

    fn r_polynomials_from(&self, a: &[i64], r0: u32, samples: Option<usize>) -> Result<Vec<RPolynomial>> {
        let per_graph: Vec<Result<Vec<RPolynomial>>> = self
            .graphs
            .par_iter()
            .filter(|gd| gd.graph.num_edges() > 0)
            .map(|gd| {
                let polys = self.graph_polynomials(gd, a, r0, samples)?;
                Ok(gd
                    .kvecs
                    .iter()
                    .zip(polys)
                    .map(|(k, poly)| RPolynomial { graph: gd.graph.clone(), kvec: k.clone(), poly })
                    .collect())
            })
            .collect();
        let mut out = Vec::new();
        for part in per_graph {
            out.extend(part?);
        }
        Ok(out)
    }

    /// One polynomial in r per k vector of `gd`, from samples r0+1, r0+2, …;
    /// the second half of the samples checks the first.
    fn graph_polynomials(&self, gd: &GraphData, a: &[i64], r0: u32, samples: Option<usize>) -> Result<Vec<MultiPoly>> {
        let e = gd.graph.num_edges();
        let bound = |k: &Vec<u32>| -> usize {
            match samples {
                Some(s) => s.saturating_sub(1),
                None => 2 * (k.iter().sum::<u32>() as usize + e),
            }
        };
        let needed = gd.kvecs.iter().map(|k| bound(k) + 1).max().unwrap_or(1);
        let rs: Vec<u32> = (1..=2 * needed as u32).map(|i| r0 + i).collect();
        let table: Vec<Vec<Rational>> = rs.iter().map(|&r| self.graph_coefficients(gd, a, r)).collect();
        let mut out = Vec::with_capacity(gd.kvecs.len());
        for (i, k) in gd.kvecs.iter().enumerate() {
            let d = bound(k);
            let pts: Vec<(i64, Rational)> =
                rs.iter().take(2 * (d + 1)).enumerate().map(|(j, &r)| (r as i64, table[j][i].clone())).collect();
            out.push(lagrange_interpolate(&pts, d)?);
        }
        Ok(out)
    }

    /// Polynomials in r, retrying further out when the check samples disagree.
    pub fn r_polynomials(&self, a: &[i64], samples: Option<usize>) -> Result<Vec<RPolynomial>> {
        self.check(a)?;
        let mut r0 = a.iter().map(|x| x.unsigned_abs() as u32).sum::<u32>();
        let mut last = None;
        for _ in 0..=RETRIES {
            match self.r_polynomials_from(a, r0, samples) {
                Ok(p) => return Ok(p),
                Err(e @ Error::Interpolation(_)) => {
                    log::warn!("r-interpolation failed after r = {r0}: {e}");
                    last = Some(e);
                    r0 = 2 * r0 + 16;
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// The constant term in r of Ω^r_{g,A}, i.e. Pixton's class Ω_{g,A},
    /// truncated to the degree window.
    pub fn constant_term(&self, a: &[i64]) -> Result<TautClass> {
        self.constant_term_with(a, None)
    }

    /// As [`Self::constant_term`] with a fixed number of r-samples. Trees
    /// have a single weighting, whose edge products w·w' have constant term
    /// -a_S² (a_S the sum over the legs on one side); graphs with cycles
    /// are interpolated.
    pub fn constant_term_with(&self, a: &[i64], samples: Option<usize>) -> Result<TautClass> {
        self.check(a)?;
        let polys = self.interpolate(a, samples, |gd| gd.graph.h1() > 0)?;
        let lf = leg_factors(a, self.max_degree);
        let mut parts: Vec<Vec<(usize, Rational)>> = Vec::new();
        for gd in self.graphs.iter().filter(|gd| gd.graph.h1() == 0) {
            let coeffs = self.tree_constant_terms(gd, a);
            let mut out = Vec::new();
            for (ts, c) in gd.templates.iter().zip(&coeffs) {
                expand_into(ts, c, &lf, &mut out);
            }
            parts.push(out);
        }
        for (gi, consts) in polys {
            let mut out = Vec::new();
            for (ts, c) in self.graphs[gi].templates.iter().zip(&consts) {
                expand_into(ts, c, &lf, &mut out);
            }
            parts.push(out);
        }
        Ok(self.assemble(parts))
    }

    /// The constant term with every graph, trees included, interpolated in r.
    pub fn constant_term_interpolated(&self, a: &[i64], samples: Option<usize>) -> Result<TautClass> {
        self.check(a)?;
        let lf = leg_factors(a, self.max_degree);
        let mut parts: Vec<Vec<(usize, Rational)>> = Vec::new();
        if let Some(trivial) = self.graphs.iter().find(|gd| gd.graph.num_edges() == 0) {
            let mut out = Vec::new();
            expand_into(&trivial.templates[0], &Rational::one(), &lf, &mut out);
            parts.push(out);
        }
        for (gi, consts) in self.interpolate(a, samples, |gd| gd.graph.num_edges() > 0)? {
            let mut out = Vec::new();
            for (ts, c) in self.graphs[gi].templates.iter().zip(&consts) {
                expand_into(ts, c, &lf, &mut out);
            }
            parts.push(out);
        }
        Ok(self.assemble(parts))
    }

    fn tree_constant_terms(&self, gd: &GraphData, a: &[i64]) -> Vec<Rational> {
        if gd.graph.num_edges() == 0 {
            return vec![Rational::one()];
        }
        let big = 2 * a.iter().map(|x| x.unsigned_abs()).sum::<u64>() as u32 + 3;
        let mut w = Weighting { r: big, legs: Vec::new(), edges: Vec::new() };
        solve(&gd.graph, &gd.tree, a, big, &[], &mut w);
        let products: Vec<BigInt> = w
            .edges
            .iter()
            .map(|&(x, _)| {
                let s = if x <= big / 2 { x as i64 } else { x as i64 - big as i64 };
                BigInt::from(-s * s)
            })
            .collect();
        let aut = Rational::from_integer(BigInt::from(gd.aut));
        gd.kvecs
            .iter()
            .map(|k| {
                let mut m = BigInt::one();
                for (p, &ke) in products.iter().zip(k) {
                    m *= p.pow(ke + 1);
                }
                edge_prefactor(k) * Rational::from_integer(m) / &aut
            })
            .collect()
    }

    /// Constant terms of the interpolated r-polynomials of the graphs
    /// selected by `pick`. The weighting sums depend on A only through the
    /// leg sums at each vertex, which key the memo.
    fn interpolate(
        &self,
        a: &[i64],
        samples: Option<usize>,
        pick: impl Fn(&GraphData) -> bool + Sync,
    ) -> Result<Vec<(usize, Vec<Rational>)>> {
        self.graphs
            .par_iter()
            .enumerate()
            .filter(|(_, gd)| pick(gd))
            .map(|(gi, gd)| {
                let mut sums = vec![0i64; gd.graph.num_vertices()];
                for (l, &v) in gd.graph.legs().iter().enumerate() {
                    sums[v] += a[l];
                }
                let key = (gi, sums, samples);
                if let Some(c) = self.memo.lock().expect("memo lock").get(&key) {
                    return Ok((gi, c.clone()));
                }
                let consts = self.graph_constant_terms(gd, a, &key.1, samples)?;
                self.memo.lock().expect("memo lock").insert(key, consts.clone());
                Ok((gi, consts))
            })
            .collect()
    }

    /// Interpolates one graph, moving the window further out on inconsistency.
    fn graph_constant_terms(&self, gd: &GraphData, a: &[i64], sums: &[i64], samples: Option<usize>) -> Result<Vec<Rational>> {
        let mut r0 = sums.iter().map(|x| x.unsigned_abs() as u32).sum::<u32>();
        let mut last = None;
        for _ in 0..=RETRIES {
            match self.graph_polynomials(gd, a, r0, samples) {
                Ok(p) => return Ok(p.iter().map(MultiPoly::constant_term).collect()),
                Err(e @ Error::Interpolation(_)) => {
                    log::warn!("r-interpolation failed after r = {r0}: {e}");
                    last = Some(e);
                    r0 = 2 * r0 + 16;
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

/// (a_i²/2)^b / b! for every leg and b ≤ `max`.
fn leg_factors(a: &[i64], max: u32) -> Vec<Vec<Rational>> {
    a.iter()
        .map(|&ai| {
            let half = Rational::new(BigInt::from(ai * ai), BigInt::from(2));
            let mut row = vec![Rational::one()];
            for b in 1..=max {
                let next = &row[b as usize - 1] * &half / Rational::from_integer(BigInt::from(b));
                row.push(next);
            }
            row
        })
        .collect()
}

fn expand_into(templates: &[Template], c: &Rational, lf: &[Vec<Rational>], out: &mut Vec<(usize, Rational)>) {
    if c.is_zero() {
        return;
    }
    for t in templates {
        let mut v = c * &t.coeff;
        for (i, &b) in t.legs.iter().enumerate() {
            if b > 0 {
                v *= &lf[i][b as usize];
            }
        }
        if !v.is_zero() {
            out.push((t.id, v));
        }
    }
}

/// Terms of Π_e (ψ_h + ψ_h')^{k_e} · Π_i ψ_i^{b_i} within the degree window,
/// with their binomial coefficients and the leg exponents b.
fn expansion_terms(
    graph: &StableGraph,
    k: &[u32],
    n: u32,
    min_degree: u32,
    max_degree: u32,
) -> Vec<(Stratum, Rational, Vec<u32>)> {
    let base = graph.num_edges() as u32 + k.iter().sum::<u32>();
    if base > max_degree {
        return Vec::new();
    }
    let slack = max_degree - base;
    let mut out = Vec::new();
    for split in splits(k) {
        let mut coeff = Rational::one();
        for (&ke, &j) in k.iter().zip(&split) {
            coeff *= Rational::from_integer(binomial(ke, j));
        }
        let edges_psi: Vec<(u32, u32)> = k.iter().zip(&split).map(|(&ke, &j)| (j, ke - j)).collect();
        for legs in kvecs(n as usize, slack) {
            let deg = base + legs.iter().sum::<u32>();
            if deg < min_degree {
                continue;
            }
            let kappa = vec![Vec::new(); graph.num_vertices()];
            let s = Stratum::new(graph, kappa, legs.clone(), edges_psi.clone()).expect("shape fits graph");
            out.push((s, coeff.clone(), legs));
        }
    }
    out
}

/// All ways to split each k_e as j + (k_e - j).
fn splits(k: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &ke in k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..=ke).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    out
}

/// Π_e (-1)^{k_e} / (2^{k_e+1} (k_e+1)!), the series coefficients of the edge
/// factor (1 - exp(-x(ψ+ψ')/2))/(ψ+ψ') with x = w w'.
fn edge_prefactor(k: &[u32]) -> Rational {
    let mut out = Rational::one();
    for &ke in k {
        let den = BigInt::from(2).pow(ke + 1) * factorial(ke + 1);
        let sign = if ke % 2 == 0 { 1 } else { -1 };
        out *= Rational::new(BigInt::from(sign), den);
    }
    out
}

/// Ω^r_{g,A} through degree `max_degree` at a single r.
pub fn omega_r(g: u32, a: &[i64], r: u32, max_degree: u32) -> Result<TautClass> {
    OmegaEngine::new(g, a.len() as u32, max_degree)?.omega_r(a, r)
}

/// Pixton's class Ω_{g,A} through degree `max_degree`.
pub fn omega_constant_term(g: u32, a: &[i64], max_degree: u32) -> Result<TautClass> {
    OmegaEngine::new(g, a.len() as u32, max_degree)?.constant_term(a)
}
