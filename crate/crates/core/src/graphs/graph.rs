use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::canon::{self, Shape};
use crate::error::{Error, Result};

/// A half-edge of a stable graph: either the leg with the given label, or one
/// side (0 or 1) of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HalfEdge {
    Leg(u32),
    Edge(usize, u8),
}

/// Dual graph of a stable curve.
///
/// Legs are stored by label: `legs[i]` is the vertex carrying leg `i + 1`.
/// Each edge stores its two endpoint vertices; the two sides are half-edges
/// `(e, 0)` and `(e, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StableGraph {
    genera: Vec<u32>,
    legs: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

/// Isomorphism type of a stable graph with legs fixed pointwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub Vec<u8>);

impl CanonicalKey {
    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Serialized graph: genera, edges as `[[v, local], [w, local]]`, legs as
/// `[label, vertex]`. Local indices count legs at a vertex first (by label),
/// then edge sides in edge order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<u32>,
    pub edges: Vec<[[usize; 2]; 2]>,
    pub legs: Vec<[usize; 2]>,
}

impl StableGraph {
    /// Builds and validates a graph.
    pub fn new(genera: Vec<u32>, legs: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = StableGraph { genera, legs, edges };
        g.validate()?;
        Ok(g)
    }

    /// Single vertex of genus `g` carrying legs `1..=n`.
    pub fn trivial(g: u32, n: u32) -> Result<Self> {
        Self::new(vec![g], vec![0; n as usize], Vec::new())
    }

    /// Builds a graph from raw half-edge data: `vertex_of[h]`, the involution
    /// `involution[h]`, and leg labels assigned to fixed points.
    pub fn from_half_edges(
        genera: Vec<u32>,
        vertex_of: &[usize],
        involution: &[usize],
        leg_labels: &[(usize, u32)],
    ) -> Result<Self> {
        let nh = vertex_of.len();
        if involution.len() != nh {
            return Err(Error::InvalidGraph("involution length differs from half-edge count".into()));
        }
        for (h, &j) in involution.iter().enumerate() {
            if j >= nh || involution[j] != h {
                return Err(Error::InvalidGraph(format!("involution is not an involution at {h}")));
            }
        }
        if let Some(&v) = vertex_of.iter().find(|&&v| v >= genera.len()) {
            return Err(Error::InvalidGraph(format!("half-edge attached to missing vertex {v}")));
        }
        let fixed: BTreeSet<usize> = (0..nh).filter(|&h| involution[h] == h).collect();
        let labelled: BTreeSet<usize> = leg_labels.iter().map(|&(h, _)| h).collect();
        let labels: BTreeSet<u32> = leg_labels.iter().map(|&(_, l)| l).collect();
        let n = fixed.len() as u32;
        if labelled != fixed
            || labelled.len() != leg_labels.len()
            || labels != (1..=n).collect::<BTreeSet<u32>>()
        {
            return Err(Error::InvalidGraph("leg labels are not a bijection with 1..n".into()));
        }
        let mut legs = vec![0; n as usize];
        for &(h, l) in leg_labels {
            legs[l as usize - 1] = vertex_of[h];
        }
        let edges = (0..nh)
            .filter(|&h| involution[h] > h)
            .map(|h| (vertex_of[h], vertex_of[involution[h]]))
            .collect();
        Self::new(genera, legs, edges)
    }

    fn validate(&self) -> Result<()> {
        let nv = self.genera.len();
        if nv == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        for &v in self.legs.iter().chain(self.edges.iter().flat_map(|(a, b)| [a, b])) {
            if v >= nv {
                return Err(Error::InvalidGraph(format!("reference to missing vertex {v}")));
            }
        }
        for v in 0..nv {
            if 2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 <= 0 {
                return Err(Error::InvalidGraph(format!(
                    "vertex {v} of genus {} and valence {} is unstable",
                    self.genera[v],
                    self.valence(v)
                )));
            }
        }
        if !self.is_connected() {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let nv = self.genera.len();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_legs(&self) -> u32 {
        self.legs.len() as u32
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.genera[v]
    }

    /// Vertex of each leg, indexed by label minus one.
    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn leg_vertex(&self, label: u32) -> usize {
        self.legs[label as usize - 1]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_of(&self, h: HalfEdge) -> usize {
        match h {
            HalfEdge::Leg(l) => self.leg_vertex(l),
            HalfEdge::Edge(e, 0) => self.edges[e].0,
            HalfEdge::Edge(e, _) => self.edges[e].1,
        }
    }

    pub fn valence(&self, v: usize) -> usize {
        self.legs.iter().filter(|&&x| x == v).count()
            + self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum::<usize>()
    }

    /// Half-edges at `v`: legs by label, then edge sides in edge order.
    pub fn half_edges_at(&self, v: usize) -> Vec<HalfEdge> {
        let mut out: Vec<HalfEdge> = (0..self.legs.len())
            .filter(|&i| self.legs[i] == v)
            .map(|i| HalfEdge::Leg(i as u32 + 1))
            .collect();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if a == v {
                out.push(HalfEdge::Edge(e, 0));
            }
            if b == v {
                out.push(HalfEdge::Edge(e, 1));
            }
        }
        out
    }

    pub fn h1(&self) -> u32 {
        (self.edges.len() + 1 - self.genera.len()) as u32
    }

    /// Arithmetic genus `h1 + sum g(v)`.
    pub fn genus(&self) -> u32 {
        self.h1() + self.genera.iter().sum::<u32>()
    }

    pub fn is_tree(&self) -> bool {
        self.h1() == 0
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].0 == self.edges[e].1
    }

    pub fn shape(&self) -> Shape {
        Shape {
            genera: self.genera.clone(),
            colors: vec![Vec::new(); self.genera.len()],
            legs: self.legs.iter().map(|&v| (v, 0)).collect(),
            edges: self.edges.iter().map(|&(a, b)| ((a, 0), (b, 0))).collect(),
        }
    }

    pub fn from_shape(shape: &Shape) -> Self {
        StableGraph {
            genera: shape.genera.clone(),
            legs: shape.legs.iter().map(|&(v, _)| v).collect(),
            edges: shape.edges.iter().map(|&((a, _), (b, _))| (a, b)).collect(),
        }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        CanonicalKey(canon::canonicalize(&self.shape()).0.encode())
    }

    /// The canonical representative of this graph's isomorphism class.
    pub fn canonical(&self) -> StableGraph {
        Self::from_shape(&canon::canonicalize(&self.shape()).0)
    }

    pub fn is_isomorphic(&self, other: &StableGraph) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    pub fn automorphism_count(&self) -> u64 {
        canon::automorphism_count(&self.shape())
    }

    /// Contracts edge `e`. A loop raises the genus of its vertex; otherwise the
    /// endpoints merge (the higher index is folded into the lower one).
    pub fn contract_edge(&self, e: usize) -> StableGraph {
        let (a, b) = self.edges[e];
        let mut edges = self.edges.clone();
        edges.remove(e);
        if a == b {
            let mut genera = self.genera.clone();
            genera[a] += 1;
            return StableGraph { genera, legs: self.legs.clone(), edges };
        }
        let (keep, gone) = (a.min(b), a.max(b));
        let remap = |v: usize| {
            let v = if v == gone { keep } else { v };
            if v > gone {
                v - 1
            } else {
                v
            }
        };
        let mut genera = self.genera.clone();
        genera[keep] += genera[gone];
        genera.remove(gone);
        StableGraph {
            genera,
            legs: self.legs.iter().map(|&v| remap(v)).collect(),
            edges: edges.into_iter().map(|(x, y)| (remap(x), remap(y))).collect(),
        }
    }

    /// Contracts every edge except `e`.
    pub fn contract_all_but(&self, e: usize) -> StableGraph {
        let mut g = self.clone();
        let mut keep = e;
        while g.edges.len() > 1 {
            let victim = if keep == 0 { 1 } else { 0 };
            g = g.contract_edge(victim);
            if victim < keep {
                keep -= 1;
            }
        }
        g
    }

    pub fn to_json(&self) -> GraphJson {
        let mut local = std::collections::HashMap::new();
        for v in 0..self.genera.len() {
            for (i, h) in self.half_edges_at(v).into_iter().enumerate() {
                local.insert(h, i);
            }
        }
        GraphJson {
            vertices: self.genera.clone(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(e, &(a, b))| {
                    [[a, local[&HalfEdge::Edge(e, 0)]], [b, local[&HalfEdge::Edge(e, 1)]]]
                })
                .collect(),
            legs: self.legs.iter().enumerate().map(|(i, &v)| [i + 1, v]).collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self> {
        let nv = j.vertices.len();
        let mut legs = vec![usize::MAX; j.legs.len()];
        let mut legs_at = vec![0usize; nv];
        for &[label, v] in &j.legs {
            if label == 0 || label > legs.len() || legs[label - 1] != usize::MAX {
                return Err(Error::InvalidGraph("leg labels are not a bijection with 1..n".into()));
            }
            if v >= nv {
                return Err(Error::InvalidGraph(format!("leg {label} on missing vertex {v}")));
            }
            legs[label - 1] = v;
            legs_at[v] += 1;
        }
        let mut slots: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
        for &[[a, i], [b, k]] in &j.edges {
            for (v, idx) in [(a, i), (b, k)] {
                if v >= nv {
                    return Err(Error::InvalidGraph(format!("edge on missing vertex {v}")));
                }
                if idx < legs_at[v] || !slots[v].insert(idx) {
                    return Err(Error::InvalidGraph(format!(
                        "local index {idx} at vertex {v} is reused or collides with a leg"
                    )));
                }
            }
        }
        for (v, s) in slots.iter().enumerate() {
            if s.iter().copied().ne(legs_at[v]..legs_at[v] + s.len()) {
                return Err(Error::InvalidGraph(format!("local indices at vertex {v} have gaps")));
            }
        }
        let edges = j.edges.iter().map(|&[[a, _], [b, _]]| (a, b)).collect();
        Self::new(j.vertices.clone(), legs, edges)
    }
}
