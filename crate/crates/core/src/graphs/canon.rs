//! Canonical labeling of small vertex-colored multigraphs with fixed legs.
//!
//! A [`Shape`] is the common denominator of plain stable graphs and decorated
//! strata: every vertex carries a genus and an arbitrary ordered color (the
//! κ-multiset for strata), every half-edge carries a small integer (the ψ
//! exponent for strata). The canonical form is the lexicographically smallest
//! encoding over all vertex orderings compatible with a refined partition.

use std::collections::BTreeMap;

/// Half-edge endpoint: vertex index and per-half-edge datum.
pub type End = (usize, u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub genera: Vec<u32>,
    pub colors: Vec<Vec<u32>>,
    /// Indexed by leg label minus one.
    pub legs: Vec<End>,
    pub edges: Vec<(End, End)>,
}

impl Shape {
    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    /// Relabels vertices by `perm[old] = new` and normalizes edge order.
    pub fn permuted(&self, perm: &[usize]) -> Shape {
        let n = self.genera.len();
        let mut genera = vec![0; n];
        let mut colors = vec![Vec::new(); n];
        for v in 0..n {
            genera[perm[v]] = self.genera[v];
            colors[perm[v]] = self.colors[v].clone();
        }
        let legs = self.legs.iter().map(|&(v, d)| (perm[v], d)).collect();
        let mut edges: Vec<(End, End)> = self
            .edges
            .iter()
            .map(|&((v, a), (w, b))| {
                let x = (perm[v], a);
                let y = (perm[w], b);
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        edges.sort();
        Shape { genera, colors, legs, edges }
    }

    /// Byte encoding of the shape as stored (no canonicalization).
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let push = |out: &mut Vec<u8>, x: u64| out.extend_from_slice(&(x as u32).to_be_bytes());
        push(&mut out, self.genera.len() as u64);
        for (g, c) in self.genera.iter().zip(&self.colors) {
            push(&mut out, *g as u64);
            push(&mut out, c.len() as u64);
            for &k in c {
                push(&mut out, k as u64);
            }
        }
        push(&mut out, self.legs.len() as u64);
        for &(v, d) in &self.legs {
            push(&mut out, v as u64);
            push(&mut out, d as u64);
        }
        push(&mut out, self.edges.len() as u64);
        for &((v, a), (w, b)) in &self.edges {
            for x in [v as u32, a, w as u32, b] {
                push(&mut out, x as u64);
            }
        }
        out
    }
}

/// Ordered blocks of vertices that are indistinguishable by iterated
/// neighbourhood refinement. The order of blocks is isomorphism-invariant.
pub fn vertex_blocks(shape: &Shape) -> Vec<Vec<usize>> {
    let n = shape.num_vertices();
    let mut leg_sig: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (i, &(v, d)) in shape.legs.iter().enumerate() {
        leg_sig[v].push((i as u32, d));
    }
    // initial invariant: genus, color, legs carried
    let initial: Vec<(u32, Vec<u32>, Vec<(u32, u32)>)> = (0..n)
        .map(|v| (shape.genera[v], shape.colors[v].clone(), leg_sig[v].clone()))
        .collect();
    let mut color = ranks(&initial);
    loop {
        let mut sig: Vec<(usize, Vec<(u32, usize, u32, bool)>)> =
            (0..n).map(|v| (color[v], Vec::new())).collect();
        for &((v, a), (w, b)) in &shape.edges {
            let is_loop = v == w;
            sig[v].1.push((a, color[w], b, is_loop));
            sig[w].1.push((b, color[v], a, is_loop));
        }
        for s in &mut sig {
            s.1.sort();
        }
        let next = ranks(&sig);
        let classes = |c: &[usize]| c.iter().max().map_or(0, |m| m + 1);
        let done = classes(&next) == classes(&color);
        color = next;
        if done {
            break;
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in color.iter().enumerate() {
        blocks.entry(c).or_default().push(v);
    }
    blocks.into_values().collect()
}

fn ranks<T: Ord + Clone>(values: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort();
    sorted.dedup();
    values.iter().map(|v| sorted.binary_search(v).unwrap()).collect()
}

/// All maps `perm[old] = new` that send the k-th block onto the k-th
/// consecutive range of new indices.
pub fn permutations_within_blocks(blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n: usize = blocks.iter().map(Vec::len).sum();
    let mut out = vec![vec![usize::MAX; n]];
    let mut offset = 0;
    for block in blocks {
        let orders = all_orders(block.len());
        let mut next = Vec::with_capacity(out.len() * orders.len());
        for base in &out {
            for ord in &orders {
                let mut p = base.clone();
                for (pos, &i) in ord.iter().enumerate() {
                    p[block[i]] = offset + pos;
                }
                next.push(p);
            }
        }
        out = next;
        offset += block.len();
    }
    out
}

fn all_orders(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in all_orders(k - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

/// Canonical representative of `shape` and a vertex map `perm[old] = new`
/// realizing it.
pub fn canonicalize(shape: &Shape) -> (Shape, Vec<usize>) {
    let blocks = vertex_blocks(shape);
    let mut best: Option<(Shape, Vec<usize>)> = None;
    for perm in permutations_within_blocks(&blocks) {
        let cand = shape.permuted(&perm);
        if best.as_ref().map_or(true, |(b, _)| cand < *b) {
            best = Some((cand, perm));
        }
    }
    best.expect("at least one ordering")
}

/// Number of vertex permutations fixing legs that map the shape to itself,
/// times the half-edge symmetries of parallel edges and loops. Half-edge
/// data are required to match, so the count is that of the decorated shape.
pub fn automorphism_count(shape: &Shape) -> u64 {
    let perms = permutations_within_blocks(&vertex_blocks(shape));
    // any two orderings with equal images differ by an automorphism
    let reference = shape.permuted(&perms[0]);
    let vertex_part = perms.iter().filter(|p| shape.permuted(p) == reference).count() as u64;
    // parallel classes: identical oriented edges may be permuted; a loop with
    // equal data on both sides may also be flipped
    let mut classes: BTreeMap<(End, End), u64> = BTreeMap::new();
    for e in &reference.edges {
        *classes.entry(*e).or_default() += 1;
    }
    let mut edge_part = 1u64;
    for (((v, a), (w, b)), m) in classes {
        edge_part *= (1..=m).product::<u64>();
        if v == w && a == b {
            edge_part *= 1 << m;
        }
    }
    vertex_part * edge_part
}
