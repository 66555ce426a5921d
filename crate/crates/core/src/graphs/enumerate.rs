use std::collections::BTreeMap;

use rayon::prelude::*;

use super::canon;
use super::graph::{CanonicalKey, HalfEdge, StableGraph};
use crate::error::{Error, Result};

/// All graphs with one more edge whose contraction at that edge gives `graph`,
/// up to isomorphism of the pair. The new edge is always the last edge.
pub fn one_edge_degenerations(graph: &StableGraph) -> Vec<(StableGraph, usize)> {
    let mut found: BTreeMap<Vec<u8>, StableGraph> = BTreeMap::new();
    let mut record = |cand: StableGraph| {
        let mut shape = cand.shape();
        let last = shape.edges.len() - 1;
        shape.edges[last].0 .1 = 1;
        shape.edges[last].1 .1 = 1;
        found.entry(canon::canonicalize(&shape).0.encode()).or_insert(cand);
    };
    for v in 0..graph.num_vertices() {
        let gv = graph.vertex_genus(v);
        if gv >= 1 {
            let mut genera = graph.genera().to_vec();
            genera[v] -= 1;
            let mut edges = graph.edges().to_vec();
            edges.push((v, v));
            if let Ok(c) = StableGraph::new(genera, graph.legs().to_vec(), edges) {
                record(c);
            }
        }
        let here = graph.half_edges_at(v);
        let u = graph.num_vertices();
        for mask in 0u64..(1 << here.len()) {
            let mut legs = graph.legs().to_vec();
            let mut edges = graph.edges().to_vec();
            for (i, h) in here.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    continue;
                }
                match *h {
                    HalfEdge::Leg(l) => legs[l as usize - 1] = u,
                    HalfEdge::Edge(e, 0) => edges[e].0 = u,
                    HalfEdge::Edge(e, _) => edges[e].1 = u,
                }
            }
            edges.push((v, u));
            for g2 in 0..=gv {
                let mut genera = graph.genera().to_vec();
                genera[v] = gv - g2;
                genera.push(g2);
                if let Ok(c) = StableGraph::new(genera, legs.clone(), edges.clone()) {
                    record(c);
                }
            }
        }
    }
    found
        .into_values()
        .map(|g| {
            let e = g.num_edges() - 1;
            (g, e)
        })
        .collect()
}

/// One representative per isomorphism class of stable graphs of genus `g`
/// with `n` legs and at most `max_edges` edges, ordered by edge count and then
/// canonical key.
pub fn enumerate_stable_graphs(g: u32, n: u32, max_edges: usize) -> Result<Vec<StableGraph>> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::InvalidInput(format!("no stable curves of genus {g} with {n} markings")));
    }
    let cap = max_edges.min((3 * g + n) as usize - 3);
    let start = StableGraph::trivial(g, n)?;
    let mut out = vec![start.canonical()];
    let mut level: Vec<StableGraph> = out.clone();
    for _ in 0..cap {
        let next: BTreeMap<CanonicalKey, StableGraph> = level
            .par_iter()
            .flat_map_iter(|gr| one_edge_degenerations(gr).into_iter().map(|(d, _)| d))
            .map(|d| (d.canonical_key(), d.canonical()))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        level = next.into_values().collect();
        out.extend(level.iter().cloned());
    }
    Ok(out)
}
