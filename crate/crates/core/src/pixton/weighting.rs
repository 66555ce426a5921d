use crate::error::{Error, Result};
use crate::graphs::StableGraph;

/// A weighting modulo `r`: residues on legs and on both sides of each edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weighting {
    pub r: u32,
    /// Residue on each leg, by label minus one.
    pub legs: Vec<u32>,
    /// Residues on the two sides of each edge.
    pub edges: Vec<(u32, u32)>,
}

impl Weighting {
    /// Checks the leg, edge and vertex conditions against `a`.
    pub fn is_admissible(&self, graph: &StableGraph, a: &[i64]) -> bool {
        let r = self.r as i64;
        let legs_ok = self.legs.iter().zip(a).all(|(&w, &ai)| w as i64 == ai.rem_euclid(r));
        let edges_ok = self.edges.iter().all(|&(x, y)| (x as i64 + y as i64) % r == 0);
        let mut sums = vec![0i64; graph.num_vertices()];
        for (l, &w) in self.legs.iter().enumerate() {
            sums[graph.legs()[l]] += w as i64;
        }
        for (&(v, u), &(x, y)) in graph.edges().iter().zip(&self.edges) {
            sums[v] += x as i64;
            sums[u] += y as i64;
        }
        legs_ok && edges_ok && sums.iter().all(|s| s % r == 0)
    }
}

/// Spanning-tree data used to solve the vertex conditions.
#[derive(Clone, Debug)]
pub(crate) struct SpanningTree {
    /// Edges outside the tree; their side-0 residue is free.
    pub free: Vec<usize>,
    /// Non-root vertices, leaves first, with the tree edge towards the root
    /// and the side of that edge lying at the vertex.
    pub order: Vec<(usize, usize, u8)>,
}

impl SpanningTree {
    pub fn new(graph: &StableGraph) -> Self {
        let nv = graph.num_vertices();
        let mut seen = vec![false; nv];
        seen[0] = true;
        let mut queue = vec![0usize];
        let mut in_tree = vec![false; graph.num_edges()];
        let mut bfs = Vec::new();
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for (e, &(a, b)) in graph.edges().iter().enumerate() {
                for (x, y, side_at_y) in [(a, b, 1u8), (b, a, 0u8)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        in_tree[e] = true;
                        queue.push(y);
                        bfs.push((y, e, side_at_y));
                    }
                }
            }
        }
        bfs.reverse();
        SpanningTree { free: (0..graph.num_edges()).filter(|&e| !in_tree[e]).collect(), order: bfs }
    }
}

/// Solves for the unique weighting with the given residues on the free
/// edges (side 0), reusing `out`.
pub(crate) fn solve(graph: &StableGraph, tree: &SpanningTree, a: &[i64], r: u32, free: &[u32], out: &mut Weighting) {
    let r64 = r as i64;
    out.r = r;
    out.legs.clear();
    out.legs.extend(a.iter().map(|&x| x.rem_euclid(r64) as u32));
    out.edges.clear();
    out.edges.resize(graph.num_edges(), (0, 0));
    for (&e, &w) in tree.free.iter().zip(free) {
        out.edges[e] = (w, ((r - w) % r));
    }
    let mut sums = vec![0i64; graph.num_vertices()];
    for (l, &w) in out.legs.iter().enumerate() {
        sums[graph.legs()[l]] += w as i64;
    }
    for &e in &tree.free {
        let (v, u) = graph.edges()[e];
        sums[v] += out.edges[e].0 as i64;
        sums[u] += out.edges[e].1 as i64;
    }
    for &(v, e, side) in &tree.order {
        let here = (-sums[v]).rem_euclid(r64) as u32;
        let there = (r - here) % r;
        let (a_end, b_end) = graph.edges()[e];
        let parent = if side == 0 { b_end } else { a_end };
        out.edges[e] = if side == 0 { (here, there) } else { (there, here) };
        sums[v] += here as i64;
        sums[parent] += there as i64;
    }
    debug_assert!(sums[0] % r64 == 0);
}

/// Lazily enumerates the r^{h1} weightings modulo `r` of `graph` for the
/// ramification vector `a`.
pub fn enumerate_weightings<'a>(
    graph: &'a StableGraph,
    a: &'a [i64],
    r: u32,
) -> Result<impl Iterator<Item = Weighting> + 'a> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    if a.len() != graph.num_legs() as usize {
        return Err(Error::InvalidInput("one ramification entry per leg is required".into()));
    }
    if a.iter().sum::<i64>().rem_euclid(r as i64) != 0 {
        return Err(Error::Defect("ramification vector does not sum to zero modulo r".into()));
    }
    let tree = SpanningTree::new(graph);
    let h1 = tree.free.len() as u32;
    let total = (r as u64).pow(h1);
    Ok((0..total).map(move |code| {
        let mut c = code;
        let free: Vec<u32> = (0..h1)
            .map(|_| {
                let w = (c % r as u64) as u32;
                c /= r as u64;
                w
            })
            .collect();
        let mut w = Weighting { r, legs: Vec::new(), edges: Vec::new() };
        solve(graph, &tree, a, r, &free, &mut w);
        w
    }))
}
