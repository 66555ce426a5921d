use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{canonicalize, CanonicalKey, GraphJson, HalfEdge, Shape, StableGraph};

/// A stable graph decorated by κ-monomials at vertices and ψ-powers at
/// half-edges: the basic class ξ_{Γ*}(γ) without automorphism factors.
///
/// The underlying [`Shape`] stores the κ-multiset of each vertex as a sorted
/// list of indices and the ψ exponent of each half-edge next to its vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Stratum {
    shape: Shape,
}

/// Decoration in serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecorationJson {
    /// κ indices present at each vertex, with repetition.
    pub kappa: Vec<Vec<u32>>,
    /// ψ exponent of each leg, by label.
    pub legs_psi: Vec<u32>,
    /// ψ exponents of the two sides of each edge.
    pub edges_psi: Vec<[u32; 2]>,
}

impl Stratum {
    pub fn new(
        graph: &StableGraph,
        kappa: Vec<Vec<u32>>,
        legs_psi: Vec<u32>,
        edges_psi: Vec<(u32, u32)>,
    ) -> Result<Self> {
        if kappa.len() != graph.num_vertices()
            || legs_psi.len() != graph.num_legs() as usize
            || edges_psi.len() != graph.num_edges()
        {
            return Err(Error::InvalidInput("decoration does not fit the graph".into()));
        }
        if kappa.iter().flatten().any(|&a| a == 0) {
            return Err(Error::InvalidInput("κ indices start at 1".into()));
        }
        let mut shape = graph.shape();
        shape.colors = kappa;
        for (l, p) in shape.legs.iter_mut().zip(legs_psi) {
            l.1 = p;
        }
        for (e, (a, b)) in shape.edges.iter_mut().zip(edges_psi) {
            e.0 .1 = a;
            e.1 .1 = b;
        }
        Ok(Self::from_shape(shape))
    }

    pub fn undecorated(graph: &StableGraph) -> Self {
        Self::from_shape(graph.shape())
    }

    pub fn fundamental(g: u32, n: u32) -> Result<Self> {
        Ok(Self::undecorated(&StableGraph::trivial(g, n)?))
    }

    /// Single vertex with the given ψ exponents (by label) and κ indices.
    pub fn monomial(g: u32, psi: &[u32], kappa: &[u32]) -> Result<Self> {
        let graph = StableGraph::trivial(g, psi.len() as u32)?;
        Self::new(&graph, vec![kappa.to_vec()], psi.to_vec(), Vec::new())
    }

    pub(crate) fn from_shape(mut shape: Shape) -> Self {
        for c in &mut shape.colors {
            c.sort_unstable();
        }
        Stratum { shape }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn graph(&self) -> StableGraph {
        StableGraph::from_shape(&self.shape)
    }

    pub fn genus(&self) -> u32 {
        let s = &self.shape;
        (s.edges.len() + 1 - s.genera.len()) as u32 + s.genera.iter().sum::<u32>()
    }

    pub fn num_legs(&self) -> u32 {
        self.shape.legs.len() as u32
    }

    pub fn num_vertices(&self) -> usize {
        self.shape.genera.len()
    }

    pub fn num_edges(&self) -> usize {
        self.shape.edges.len()
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.shape.genera[v]
    }

    pub fn genera(&self) -> &[u32] {
        &self.shape.genera
    }

    pub fn kappa(&self, v: usize) -> &[u32] {
        &self.shape.colors[v]
    }

    pub fn leg_vertex(&self, label: u32) -> usize {
        self.shape.legs[label as usize - 1].0
    }

    pub fn leg_psi(&self, label: u32) -> u32 {
        self.shape.legs[label as usize - 1].1
    }

    pub fn edge(&self, e: usize) -> ((usize, u32), (usize, u32)) {
        self.shape.edges[e]
    }

    pub fn psi(&self, h: HalfEdge) -> u32 {
        match h {
            HalfEdge::Leg(l) => self.leg_psi(l),
            HalfEdge::Edge(e, 0) => self.shape.edges[e].0 .1,
            HalfEdge::Edge(e, _) => self.shape.edges[e].1 .1,
        }
    }

    fn psi_mut(&mut self, h: HalfEdge) -> &mut u32 {
        match h {
            HalfEdge::Leg(l) => &mut self.shape.legs[l as usize - 1].1,
            HalfEdge::Edge(e, 0) => &mut self.shape.edges[e].0 .1,
            HalfEdge::Edge(e, _) => &mut self.shape.edges[e].1 .1,
        }
    }

    fn vertex_mut(&mut self, h: HalfEdge) -> &mut usize {
        match h {
            HalfEdge::Leg(l) => &mut self.shape.legs[l as usize - 1].0,
            HalfEdge::Edge(e, 0) => &mut self.shape.edges[e].0 .0,
            HalfEdge::Edge(e, _) => &mut self.shape.edges[e].1 .0,
        }
    }

    /// Half-edges at `v`: legs by label, then edge sides in edge order. The
    /// i-th entry is local leg `i + 1` of the vertex moduli space.
    pub fn half_edges_at(&self, v: usize) -> Vec<HalfEdge> {
        let mut out: Vec<HalfEdge> = (0..self.shape.legs.len())
            .filter(|&i| self.shape.legs[i].0 == v)
            .map(|i| HalfEdge::Leg(i as u32 + 1))
            .collect();
        for (e, &((a, _), (b, _))) in self.shape.edges.iter().enumerate() {
            if a == v {
                out.push(HalfEdge::Edge(e, 0));
            }
            if b == v {
                out.push(HalfEdge::Edge(e, 1));
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.half_edges_at(v).len()
    }

    /// Degree of the decoration at `v`.
    pub fn vertex_degree(&self, v: usize) -> u32 {
        self.shape.colors[v].iter().sum::<u32>()
            + self.half_edges_at(v).into_iter().map(|h| self.psi(h)).sum::<u32>()
    }

    pub fn decoration_degree(&self) -> u32 {
        let s = &self.shape;
        s.colors.iter().flatten().sum::<u32>()
            + s.legs.iter().map(|l| l.1).sum::<u32>()
            + s.edges.iter().map(|e| e.0 .1 + e.1 .1).sum::<u32>()
    }

    /// Codimension: decoration degree plus number of edges.
    pub fn codimension(&self) -> u32 {
        self.decoration_degree() + self.shape.edges.len() as u32
    }

    /// Local dimension of the vertex space `3g(v) - 3 + n(v)`.
    pub fn vertex_dimension(&self, v: usize) -> i64 {
        3 * self.shape.genera[v] as i64 - 3 + self.valence(v) as i64
    }

    /// True if some vertex carries a decoration above its dimension, in which
    /// case the class vanishes.
    pub fn exceeds_dimension(&self) -> bool {
        (0..self.num_vertices()).any(|v| self.vertex_degree(v) as i64 > self.vertex_dimension(v))
    }

    pub fn is_undecorated(&self) -> bool {
        self.decoration_degree() == 0
    }

    pub fn canonical(&self) -> Stratum {
        Stratum { shape: canonicalize(&self.shape).0 }
    }

    pub fn key(&self) -> CanonicalKey {
        CanonicalKey(canonicalize(&self.shape).0.encode())
    }

    /// Number of automorphisms of the decorated graph.
    pub fn automorphism_count(&self) -> u64 {
        crate::graphs::shape_automorphism_count(&self.shape)
    }

    /// The decoration at `v` as a single-vertex stratum of
    /// M̄_{g(v), n(v)}, local legs ordered as in [`Self::half_edges_at`].
    pub fn local_at(&self, v: usize) -> Stratum {
        let legs = self.half_edges_at(v).into_iter().map(|h| (0, self.psi(h))).collect();
        Stratum {
            shape: Shape {
                genera: vec![self.shape.genera[v]],
                colors: vec![self.shape.colors[v].clone()],
                legs,
                edges: Vec::new(),
            },
        }
    }

    /// Replaces vertex `v` (and its decoration) by the stratum `local` of
    /// M̄_{g(v), n(v)}; local leg `i + 1` is glued to the i-th half-edge at
    /// `v`. Decorations away from `v` are kept.
    pub fn substitute_vertex(&self, v: usize, local: &Stratum) -> Stratum {
        let hv = self.half_edges_at(v);
        debug_assert_eq!(hv.len(), local.shape.legs.len());
        debug_assert_eq!(local.genus(), self.shape.genera[v]);
        let base = self.num_vertices();
        let map = |u: usize| if u == 0 { v } else { base + u - 1 };
        let mut out = self.clone();
        out.shape.genera[v] = local.shape.genera[0];
        out.shape.colors[v] = local.shape.colors[0].clone();
        for u in 1..local.num_vertices() {
            out.shape.genera.push(local.shape.genera[u]);
            out.shape.colors.push(local.shape.colors[u].clone());
        }
        for (h, &(lv, lp)) in hv.iter().zip(&local.shape.legs) {
            *out.vertex_mut(*h) = map(lv);
            *out.psi_mut(*h) = lp;
        }
        for &((a, p), (b, q)) in &local.shape.edges {
            out.shape.edges.push(((map(a), p), (map(b), q)));
        }
        out
    }

    pub fn with_psi(&self, h: HalfEdge, k: u32) -> Stratum {
        let mut out = self.clone();
        *out.psi_mut(h) += k;
        out
    }

    pub fn with_kappa(&self, v: usize, a: u32) -> Stratum {
        let mut out = self.clone();
        out.shape.colors[v].push(a);
        out.shape.colors[v].sort_unstable();
        out
    }

    /// Relabels legs by `perm[old - 1] = new`.
    pub fn relabel_legs(&self, perm: &[u32]) -> Stratum {
        let mut out = self.clone();
        for (i, &l) in self.shape.legs.iter().enumerate() {
            out.shape.legs[perm[i] as usize - 1] = l;
        }
        out
    }

    /// Appends a new undecorated leg at `v`.
    pub fn with_new_leg(&self, v: usize) -> Stratum {
        let mut out = self.clone();
        out.shape.legs.push((v, 0));
        out
    }

    pub(crate) fn without_last_leg(&self) -> Stratum {
        let mut out = self.clone();
        out.shape.legs.pop();
        out
    }

    /// Removes a bivalent genus-0 vertex `v`, joining its two half-edges.
    /// The far-side decorations survive; the decoration at `v` must be empty.
    pub(crate) fn contract_bivalent(&self, v: usize) -> Stratum {
        let hv = self.half_edges_at(v);
        debug_assert_eq!(hv.len(), 2);
        let mut out = self.clone();
        let far = |h: HalfEdge| match h {
            HalfEdge::Edge(e, 0) => self.shape.edges[e].1,
            HalfEdge::Edge(e, _) => self.shape.edges[e].0,
            HalfEdge::Leg(_) => unreachable!(),
        };
        match (hv[0], hv[1]) {
            (HalfEdge::Leg(l), h @ HalfEdge::Edge(e, _)) => {
                out.shape.legs[l as usize - 1] = far(h);
                out.shape.edges.remove(e);
            }
            (h1 @ HalfEdge::Edge(e1, _), h2 @ HalfEdge::Edge(e2, _)) => {
                debug_assert_ne!(e1, e2);
                let joined = (far(h1), far(h2));
                out.shape.edges.remove(e1.max(e2));
                out.shape.edges.remove(e1.min(e2));
                out.shape.edges.push(joined);
            }
            _ => unreachable!("bivalent vertex with two legs has no stable ambient"),
        }
        out.remove_vertex(v);
        out
    }

    fn remove_vertex(&mut self, v: usize) {
        let fix = |u: &mut usize| {
            if *u > v {
                *u -= 1;
            }
        };
        self.shape.genera.remove(v);
        self.shape.colors.remove(v);
        for l in &mut self.shape.legs {
            fix(&mut l.0);
        }
        for e in &mut self.shape.edges {
            fix(&mut e.0 .0);
            fix(&mut e.1 .0);
        }
    }

    pub fn decoration_json(&self) -> DecorationJson {
        DecorationJson {
            kappa: self.shape.colors.clone(),
            legs_psi: self.shape.legs.iter().map(|l| l.1).collect(),
            edges_psi: self.shape.edges.iter().map(|e| [e.0 .1, e.1 .1]).collect(),
        }
    }

    pub fn from_json(graph: &GraphJson, dec: &DecorationJson) -> Result<Self> {
        let g = StableGraph::from_json(graph)?;
        Self::new(
            &g,
            dec.kappa.clone(),
            dec.legs_psi.clone(),
            dec.edges_psi.iter().map(|&[a, b]| (a, b)).collect(),
        )
    }

    /// Human-readable description, e.g. `[g0,g0] e(0-1) psi1^2 kappa1@0`.
    pub fn describe(&self) -> String {
        let s = &self.shape;
        let mut parts = vec![format!(
            "[{}]",
            s.genera.iter().map(|g| format!("g{g}")).collect::<Vec<_>>().join(",")
        )];
        for &((a, p), (b, q)) in &s.edges {
            let side = |v: usize, k: u32| {
                if k == 0 {
                    format!("{v}")
                } else {
                    format!("{v}:psi^{k}")
                }
            };
            parts.push(format!("e({}-{})", side(a, p), side(b, q)));
        }
        for (i, &(v, p)) in s.legs.iter().enumerate() {
            let base = format!("{}@{v}", i + 1);
            parts.push(if p > 0 { format!("{base}:psi^{p}") } else { base });
        }
        for (v, c) in s.colors.iter().enumerate() {
            for k in c {
                parts.push(format!("kappa{k}@{v}"));
            }
        }
        parts.join(" ")
    }
}
