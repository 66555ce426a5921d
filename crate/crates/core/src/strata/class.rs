use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::local;
use super::stratum::{DecorationJson, Stratum};
use crate::algebra::{Coefficient, Rational};
use crate::error::{Error, Result};
use crate::graphs::{one_edge_degenerations, CanonicalKey, GraphJson, HalfEdge, StableGraph};

/// Finite linear combination of decorated strata on M̄_{g,n}, in normal form:
/// canonical strata, merged, no zero coefficients, nothing above dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct TautClass<C: Coefficient = Rational> {
    g: u32,
    n: u32,
    terms: BTreeMap<Stratum, C>,
}

/// Loci used for restriction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Locus {
    /// Smooth curves: edgeless graphs only.
    Open,
    /// Trees with a vertex of full genus.
    RationalTails,
    /// Trees.
    CompactType,
}

/// Boundary divisors δ_h^P and δ_irr.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryDivisor {
    Irreducible,
    Separating { genus: u32, legs: BTreeSet<u32> },
}

/// What multiplying by a boundary divisor amounts to, after the unstable
/// conventions δ_0^{i} = δ_g^{[n]∖i} = -ψ_i and δ_0^∅ = δ_g^{[n]} = 0.
#[derive(Clone, Debug, PartialEq)]
pub enum DivisorAction {
    Zero,
    MinusPsi(u32),
    Graph(StableGraph),
}

impl BoundaryDivisor {
    pub fn separating(genus: u32, legs: &[u32]) -> Self {
        BoundaryDivisor::Separating { genus, legs: legs.iter().copied().collect() }
    }

    pub fn resolve(&self, g: u32, n: u32) -> Result<DivisorAction> {
        match self {
            BoundaryDivisor::Irreducible => {
                if g == 0 {
                    return Err(Error::InvalidInput("no non-separating divisor in genus 0".into()));
                }
                let gr = StableGraph::new(vec![g - 1], vec![0; n as usize], vec![(0, 0)])?;
                Ok(DivisorAction::Graph(gr))
            }
            BoundaryDivisor::Separating { genus: h, legs } => {
                if *h > g || legs.iter().any(|&l| l == 0 || l > n) {
                    return Err(Error::InvalidInput(format!("divisor δ_{h}^{legs:?} not on M({g},{n})")));
                }
                let comp: Vec<u32> = (1..=n).filter(|l| !legs.contains(l)).collect();
                if (*h == 0 && legs.is_empty()) || (*h == g && comp.is_empty()) {
                    return Ok(DivisorAction::Zero);
                }
                if *h == 0 && legs.len() == 1 {
                    return Ok(DivisorAction::MinusPsi(*legs.iter().next().unwrap()));
                }
                if *h == g && comp.len() == 1 {
                    return Ok(DivisorAction::MinusPsi(comp[0]));
                }
                let leg_vertex = (1..=n).map(|l| if legs.contains(&l) { 0 } else { 1 }).collect();
                let gr = StableGraph::new(vec![*h, g - h], leg_vertex, vec![(0, 1)])?;
                Ok(DivisorAction::Graph(gr))
            }
        }
    }
}

/// Serialized class: terms in canonical-key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TautClassJson {
    pub genus: u32,
    pub markings: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub graph: GraphJson,
    pub decoration: DecorationJson,
    pub coefficient: String,
}

fn check_stable(g: u32, n: u32) -> Result<()> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::InvalidInput(format!("M({g},{n}) is not a stable moduli space")));
    }
    Ok(())
}

impl<C: Coefficient> TautClass<C> {
    pub fn zero(g: u32, n: u32) -> Self {
        TautClass { g, n, terms: BTreeMap::new() }
    }

    pub fn from_terms(g: u32, n: u32, terms: impl IntoIterator<Item = (Stratum, C)>) -> Result<Self> {
        let mut out = Self::zero(g, n);
        for (s, c) in terms {
            if s.genus() != g || s.num_legs() != n {
                return Err(Error::MixedAmbient(g, n, s.genus(), s.num_legs()));
            }
            out.push(s, c);
        }
        Ok(out)
    }

    /// Builds a class from strata already in canonical form.
    pub(crate) fn from_canonical_terms(g: u32, n: u32, terms: impl IntoIterator<Item = (Stratum, C)>) -> Self {
        let mut out = Self::zero(g, n);
        for (s, c) in terms {
            debug_assert_eq!(s, s.canonical());
            if !c.coeff_is_zero() && !s.exceeds_dimension() {
                out.push_canonical(s, c);
            }
        }
        out
    }

    pub fn single(s: Stratum, c: C) -> Self {
        let mut out = Self::zero(s.genus(), s.num_legs());
        out.push(s, c);
        out
    }

    /// Adds a term, canonicalizing and dropping zero or over-dimension strata.
    pub fn push(&mut self, s: Stratum, c: C) {
        debug_assert_eq!((s.genus(), s.num_legs()), (self.g, self.n));
        if c.coeff_is_zero() || s.exceeds_dimension() {
            return;
        }
        self.push_canonical(s.canonical(), c);
    }

    fn push_canonical(&mut self, s: Stratum, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(s) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().coeff_is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Normalizes raw terms in parallel and merges them.
    fn collect(g: u32, n: u32, raw: Vec<(Stratum, C)>) -> Self {
        let canon: Vec<(Stratum, C)> = raw
            .into_par_iter()
            .filter(|(s, c)| !c.coeff_is_zero() && !s.exceeds_dimension())
            .map(|(s, c)| (s.canonical(), c))
            .collect();
        let mut out = Self::zero(g, n);
        for (s, c) in canon {
            out.push_canonical(s, c);
        }
        out
    }

    fn flat_map<F>(&self, g: u32, n: u32, f: F) -> Self
    where
        F: Fn(&Stratum, &C) -> Vec<(Stratum, C)> + Sync,
    {
        let raw: Vec<(Stratum, C)> = self.terms.par_iter().flat_map_iter(|(s, c)| f(s, c)).collect();
        Self::collect(g, n, raw)
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn markings(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Stratum, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `s` (any presentation) or `None` if absent.
    pub fn coefficient(&self, s: &Stratum) -> Option<&C> {
        self.terms.get(&s.canonical())
    }

    fn same_ambient(&self, other: &Self) -> Result<()> {
        if (self.g, self.n) != (other.g, other.n) {
            return Err(Error::MixedAmbient(self.g, self.n, other.g, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.push_canonical(s.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &Rational) -> Result<()> {
        self.same_ambient(other)?;
        for (s, c) in &other.terms {
            self.push_canonical(s.clone(), c.scale(factor));
        }
        Ok(())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.g, self.n);
        for (k, c) in &self.terms {
            out.push_canonical(k.clone(), c.scale(s));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// Multiplies every coefficient by `c`.
    pub fn mul_coefficient(&self, c: &C) -> Self {
        let mut out = Self::zero(self.g, self.n);
        for (k, d) in &self.terms {
            out.push_canonical(k.clone(), d.mul(c));
        }
        out
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> TautClass<D> {
        let mut out = TautClass::zero(self.g, self.n);
        for (k, c) in &self.terms {
            out.push_canonical(k.clone(), f(c));
        }
        out
    }

    /// Terms of codimension exactly `d`.
    pub fn degree_part(&self, d: u32) -> Self {
        self.filter(|s| s.codimension() == d)
    }

    /// Terms of codimension at most `d`.
    pub fn truncate(&self, d: u32) -> Self {
        self.filter(|s| s.codimension() <= d)
    }

    pub fn filter(&self, keep: impl Fn(&Stratum) -> bool) -> Self {
        TautClass {
            g: self.g,
            n: self.n,
            terms: self.terms.iter().filter(|(s, _)| keep(s)).map(|(s, c)| (s.clone(), c.clone())).collect(),
        }
    }

    pub fn restrict_locus(&self, locus: Locus) -> Self {
        let g = self.g;
        self.filter(|s| match locus {
            Locus::Open => s.num_edges() == 0,
            Locus::CompactType => s.num_edges() + 1 == s.num_vertices(),
            Locus::RationalTails => {
                s.num_edges() + 1 == s.num_vertices()
                    && (g == 0 || s.genera().iter().filter(|&&x| x == g).count() == 1)
            }
        })
    }

    /// Part supported on strata with at least one edge.
    pub fn boundary_part(&self) -> Self {
        self.filter(|s| s.num_edges() > 0)
    }

    pub fn max_codimension(&self) -> Option<u32> {
        self.terms.keys().map(Stratum::codimension).max()
    }

    pub fn mul_psi(&self, i: u32) -> Result<Self> {
        if i == 0 || i > self.n {
            return Err(Error::InvalidInput(format!("no leg {i} on M({},{})", self.g, self.n)));
        }
        Ok(self.flat_map(self.g, self.n, |s, c| vec![(s.with_psi(HalfEdge::Leg(i), 1), c.clone())]))
    }

    pub fn mul_kappa(&self, a: u32) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidInput("κ index must be at least 1".into()));
        }
        Ok(self.flat_map(self.g, self.n, |s, c| {
            (0..s.num_vertices()).map(|v| (s.with_kappa(v, a), c.clone())).collect()
        }))
    }

    /// Product with the divisor class of `d`, i.e. ξ_{B*}(1)/|Aut B| for its
    /// one-edge graph B.
    pub fn mul_divisor(&self, d: &BoundaryDivisor) -> Result<Self> {
        match d.resolve(self.g, self.n)? {
            DivisorAction::Zero => Ok(Self::zero(self.g, self.n)),
            DivisorAction::MinusPsi(i) => Ok(self.mul_psi(i)?.neg()),
            DivisorAction::Graph(b) => Ok(self.mul_one_edge_graph(&b)),
        }
    }

    fn mul_one_edge_graph(&self, b: &StableGraph) -> Self {
        let key = b.canonical_key();
        self.flat_map(self.g, self.n, |s, c| divisor_terms(s, &key).into_iter().map(|(t, w)| (t, c.scale(&w))).collect())
    }

    /// Pullback along the map forgetting a new leg `n + 1`.
    pub fn pullback(&self) -> Self {
        self.flat_map(self.g, self.n + 1, |s, c| {
            pullback_stratum(s).into_iter().map(|(t, w)| (t, c.scale(&w))).collect()
        })
    }

    /// Pushforward along the map forgetting the last leg.
    pub fn pushforward(&self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::InvalidInput("no leg to forget".into()));
        }
        check_stable(self.g, self.n - 1)?;
        Ok(self.flat_map(self.g, self.n - 1, |s, c| {
            pushforward_stratum(s).into_iter().map(|(t, w)| (t, c.scale(&w))).collect()
        }))
    }

    /// Pushforward forgetting the last `m` legs.
    pub fn pushforward_many(&self, m: u32) -> Result<Self> {
        let mut out = self.clone();
        for _ in 0..m {
            out = out.pushforward()?;
        }
        Ok(out)
    }

    /// Relabels legs by `perm[old - 1] = new`.
    pub fn relabel_legs(&self, perm: &[u32]) -> Result<Self> {
        let mut seen: Vec<u32> = perm.to_vec();
        seen.sort_unstable();
        if seen != (1..=self.n).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of 1..{}", self.n)));
        }
        Ok(self.flat_map(self.g, self.n, |s, c| vec![(s.relabel_legs(perm), c.clone())]))
    }

    /// Forgets the legs listed in `forget` (each must be forgettable): moves
    /// them to the end preserving order of the rest, then pushes forward.
    pub fn forget_legs(&self, forget: &[u32]) -> Result<Self> {
        let kept: Vec<u32> = (1..=self.n).filter(|l| !forget.contains(l)).collect();
        let mut perm = vec![0u32; self.n as usize];
        for (pos, &l) in kept.iter().chain(forget.iter()).enumerate() {
            perm[l as usize - 1] = pos as u32 + 1;
        }
        self.relabel_legs(&perm)?.pushforward_many(forget.len() as u32)
    }

    pub fn to_json(&self) -> TautClassJson {
        let mut terms: Vec<(CanonicalKey, TermJson)> = self
            .terms
            .iter()
            .map(|(s, c)| {
                (
                    s.key(),
                    TermJson {
                        graph: s.graph().to_json(),
                        decoration: s.decoration_json(),
                        coefficient: c.to_text(),
                    },
                )
            })
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        TautClassJson { genus: self.g, markings: self.n, terms: terms.into_iter().map(|t| t.1).collect() }
    }

    pub fn from_json(j: &TautClassJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            terms.push((Stratum::from_json(&t.graph, &t.decoration)?, C::from_text(&t.coefficient)?));
        }
        Self::from_terms(j.genus, j.markings, terms)
    }

    /// One term per line, for diagnostics.
    pub fn describe(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms.iter().map(|(s, c)| format!("({}) {}", c.to_text(), s.describe())).collect::<Vec<_>>().join("\n")
    }
}

impl TautClass<Rational> {
    pub fn fundamental(g: u32, n: u32) -> Result<Self> {
        Ok(Self::single(Stratum::fundamental(g, n)?, Rational::one()))
    }

    /// The monomial Π ψ_i^{psi[i-1]} Π κ_a over `kappa`.
    pub fn monomial(g: u32, psi: &[u32], kappa: &[u32]) -> Result<Self> {
        Ok(Self::single(Stratum::monomial(g, psi, kappa)?, Rational::one()))
    }

    pub fn psi(g: u32, n: u32, i: u32) -> Result<Self> {
        Self::fundamental(g, n)?.mul_psi(i)
    }

    pub fn kappa(g: u32, n: u32, a: u32) -> Result<Self> {
        Self::fundamental(g, n)?.mul_kappa(a)
    }

    pub fn divisor(g: u32, n: u32, d: &BoundaryDivisor) -> Result<Self> {
        Self::fundamental(g, n)?.mul_divisor(d)
    }

    pub fn delta_irr(g: u32, n: u32) -> Result<Self> {
        Self::divisor(g, n, &BoundaryDivisor::Irreducible)
    }

    /// Pullback of a single stratum, taken before any dimension truncation of
    /// the input (so ψ_1 on M̄_{0,3} pulls back to ψ_1 - δ_0^{1,4}).
    pub fn pullback_of(s: &Stratum) -> Self {
        Self::collect(s.genus(), s.num_legs() + 1, pullback_stratum(s))
    }
}

/// Composes decorated strata at the vertices of `graph`; the class at vertex
/// `v` lives on M̄_{g(v), n(v)} with local legs ordered as in
/// [`StableGraph::half_edges_at`].
pub fn gluing_pushforward<C: Coefficient>(graph: &StableGraph, vertex_classes: &[TautClass<C>]) -> Result<TautClass<C>> {
    if vertex_classes.len() != graph.num_vertices() {
        return Err(Error::InvalidInput("one class per vertex is required".into()));
    }
    for (v, c) in vertex_classes.iter().enumerate() {
        let want = (graph.vertex_genus(v), graph.valence(v) as u32);
        if (c.g, c.n) != want {
            return Err(Error::MixedAmbient(want.0, want.1, c.g, c.n));
        }
    }
    let mut partial: Vec<(Stratum, Option<C>)> = vec![(Stratum::undecorated(graph), None)];
    for (v, class) in vertex_classes.iter().enumerate() {
        let mut next = Vec::with_capacity(partial.len() * class.len());
        for (s, c) in &partial {
            for (l, d) in class.terms() {
                let coeff = match c {
                    Some(c) => c.mul(d),
                    None => d.clone(),
                };
                next.push((s.substitute_vertex(v, l), Some(coeff)));
            }
        }
        partial = next;
    }
    let raw = partial.into_iter().map(|(s, c)| (s, c.expect("graph has a vertex"))).collect();
    Ok(TautClass::collect(graph.genus(), graph.num_legs(), raw))
}

/// Raw terms of `ξ_{A*}(α) · [D_B]` where `key` is the canonical key of B.
fn divisor_terms(s: &Stratum, key: &CanonicalKey) -> Vec<(Stratum, Rational)> {
    let mut out = Vec::new();
    let graph = s.graph();
    let minus = -Rational::one();
    for e in 0..s.num_edges() {
        if graph.contract_all_but(e).canonical_key() == *key {
            out.push((s.with_psi(HalfEdge::Edge(e, 0), 1), minus.clone()));
            out.push((s.with_psi(HalfEdge::Edge(e, 1), 1), minus.clone()));
        }
    }
    let new_edge = s.num_edges();
    for v in 0..s.num_vertices() {
        let local = s.local_at(v);
        let trivial = StableGraph::trivial(s.vertex_genus(v), local.num_legs()).expect("vertex is stable");
        for (b, _) in one_edge_degenerations(&trivial) {
            let deeper = s.substitute_vertex(v, &Stratum::undecorated(&b));
            if deeper.graph().contract_all_but(new_edge).canonical_key() != *key {
                continue;
            }
            let w = Rational::new(1.into(), b.automorphism_count().into());
            for t in local::transport(&local, &b) {
                out.push((s.substitute_vertex(v, &t), w.clone()));
            }
        }
    }
    out
}

fn pullback_stratum(s: &Stratum) -> Vec<(Stratum, Rational)> {
    let mut out = Vec::new();
    for v in 0..s.num_vertices() {
        let raised = s.with_new_leg(v);
        let local = s.local_at(v);
        let m = local.num_legs();
        let p = (1..=s.num_legs()).filter(|&l| s.leg_vertex(l) == v).count() as u32;
        // local labels: legs at v keep positions, the new leg (last) moves to p+1
        let perm: Vec<u32> = (0..=m).map(|i| if i == m { p + 1 } else if i < p { i + 1 } else { i + 2 }).collect();
        for (l, c) in local::pullback(&local) {
            out.push((raised.substitute_vertex(v, &l.relabel_legs(&perm)), c));
        }
    }
    out
}

fn pushforward_stratum(s: &Stratum) -> Vec<(Stratum, Rational)> {
    let n = s.num_legs();
    let v = s.leg_vertex(n);
    let lowered = s.without_last_leg();
    let gv = s.vertex_genus(v) as i64;
    let nv = s.valence(v) as i64;
    if 2 * gv - 2 + nv - 1 > 0 {
        let f = s.half_edges_at(v).iter().position(|&h| h == HalfEdge::Leg(n)).unwrap();
        local::pushforward(&s.local_at(v), f)
            .into_iter()
            .map(|(l, c)| (lowered.substitute_vertex(v, &l), c))
            .collect()
    } else if s.vertex_degree(v) == 0 {
        vec![(lowered.contract_bivalent(v), Rational::one())]
    } else {
        Vec::new()
    }
}

impl<C: Coefficient> crate::algebra::LinearValue for TautClass<C> {
    fn zero_like(&self) -> Self {
        Self::zero(self.g, self.n)
    }

    fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        TautClass::add_scaled(self, other, factor).expect("values of one family share an ambient space");
    }
}
