use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use taut_core::graphs::{enumerate_stable_graphs, one_edge_degenerations, CanonicalKey, StableGraph};

fn multisets(pairs: &[(usize, usize)], k: usize, start: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..pairs.len() {
        cur.push(pairs[i]);
        multisets(pairs, k, i, cur, out);
        cur.pop();
    }
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Keys of every labeled stable graph of type (g, n), found by exhaustive search.
fn brute_force_keys(g: u32, n: u32) -> BTreeSet<CanonicalKey> {
    let dim = (3 * g + n) as usize - 3;
    let mut keys = BTreeSet::new();
    for e in 0..=dim {
        for v in 1..=e + 1 {
            let h1 = e + 1 - v;
            if h1 as u32 > g {
                continue;
            }
            let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
            let mut edge_sets = Vec::new();
            multisets(&pairs, e, 0, &mut Vec::new(), &mut edge_sets);
            for genera in compositions(g - h1 as u32, v) {
                for edges in &edge_sets {
                    let mut base = vec![0i64; v];
                    for &(a, b) in edges {
                        base[a] += 1;
                        base[b] += 1;
                    }
                    let total = (v as u64).pow(n);
                    for code in 0..total {
                        let mut legs = Vec::with_capacity(n as usize);
                        let mut c = code;
                        let mut val = base.clone();
                        for _ in 0..n {
                            legs.push((c % v as u64) as usize);
                            val[(c % v as u64) as usize] += 1;
                            c /= v as u64;
                        }
                        if (0..v).any(|i| 2 * genera[i] as i64 - 2 + val[i] <= 0) {
                            continue;
                        }
                        if let Ok(gr) = StableGraph::new(genera.clone(), legs, edges.clone()) {
                            keys.insert(gr.canonical_key());
                        }
                    }
                }
            }
        }
    }
    keys
}

#[test]
fn validation_examples() {
    assert!(StableGraph::trivial(1, 1).is_ok());
    assert!(StableGraph::new(vec![0], vec![0], vec![(0, 0)]).is_ok());
    assert!(StableGraph::trivial(0, 2).is_err());
    // disconnected
    assert!(StableGraph::new(vec![1, 0], vec![1, 1, 1], vec![]).is_err());
}

#[test]
fn enumeration_examples() {
    assert_eq!(enumerate_stable_graphs(0, 3, 3).unwrap().len(), 1);
    let g11 = enumerate_stable_graphs(1, 1, 1).unwrap();
    assert_eq!(g11.len(), 2);
    assert_eq!(g11[1].genera(), &[0]);
    assert_eq!(g11[1].edges(), &[(0, 0)]);
    let g04 = enumerate_stable_graphs(0, 4, 1).unwrap();
    assert_eq!(g04.len(), 4);
    let splits: BTreeSet<Vec<u32>> = g04[1..]
        .iter()
        .map(|gr| (1..=4).filter(|&l| gr.leg_vertex(l) == gr.leg_vertex(1)).collect())
        .collect();
    assert_eq!(splits, [vec![1, 2], vec![1, 3], vec![1, 4]].into_iter().collect());
    assert!(enumerate_stable_graphs(0, 2, 1).is_err());
    assert!(enumerate_stable_graphs(1, 0, 1).is_err());
}

#[test]
fn enumeration_matches_exhaustive_search() {
    let cases = [(0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (1, 1), (1, 2), (1, 3), (1, 4), (2, 0), (2, 1)];
    for (g, n) in cases {
        let listed = enumerate_stable_graphs(g, n, 10).unwrap();
        let keys: Vec<CanonicalKey> = listed.iter().map(StableGraph::canonical_key).collect();
        let distinct: BTreeSet<CanonicalKey> = keys.iter().cloned().collect();
        assert_eq!(distinct.len(), keys.len(), "duplicates for ({g},{n})");
        assert_eq!(distinct, brute_force_keys(g, n), "mismatch for ({g},{n})");
        // ordered by edge count, then key
        for w in listed.windows(2) {
            let a = (w[0].num_edges(), w[0].canonical_key());
            let b = (w[1].num_edges(), w[1].canonical_key());
            assert!(a < b);
        }
    }
}

#[test]
fn known_class_counts() {
    // M_{0,5}: 1 + 10 + 15; M_{1,1}: 2; M_{2,0}: 7
    assert_eq!(enumerate_stable_graphs(0, 5, 2).unwrap().len(), 26);
    assert_eq!(enumerate_stable_graphs(2, 0, 3).unwrap().len(), 7);
    assert_eq!(enumerate_stable_graphs(2, 0, 1).unwrap().len(), 3);
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Counts permutations of edge sides (legs fixed) compatible with the
/// involution that induce a genus-preserving vertex bijection.
fn brute_force_automorphisms(gr: &StableGraph) -> u64 {
    let sides: Vec<(usize, usize)> = (0..gr.num_edges()).flat_map(|e| [(e, 0), (e, 1)]).collect();
    let vert = |(e, s): (usize, usize)| if s == 0 { gr.edges()[e].0 } else { gr.edges()[e].1 };
    let k = sides.len();
    let mut count = 0;
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        // involution compatibility: partners map to partners
        let ok_inv = (0..k).all(|i| perm[i ^ 1] == perm[i] ^ 1);
        if ok_inv {
            let mut sigma = vec![usize::MAX; gr.num_vertices()];
            let mut ok = true;
            let assign = |a: usize, b: usize, sigma: &mut Vec<usize>| {
                if sigma[a] == usize::MAX {
                    sigma[a] = b;
                    true
                } else {
                    sigma[a] == b
                }
            };
            for l in 1..=gr.num_legs() {
                let v = gr.leg_vertex(l);
                ok &= assign(v, v, &mut sigma);
            }
            for i in 0..k {
                ok &= assign(vert(sides[i]), vert(sides[perm[i]]), &mut sigma);
            }
            if gr.num_vertices() == 1 && sigma[0] == usize::MAX {
                sigma[0] = 0;
            }
            let image: BTreeSet<usize> = sigma.iter().copied().collect();
            ok &= image.len() == gr.num_vertices() && !image.contains(&usize::MAX);
            ok &= (0..gr.num_vertices()).all(|v| sigma[v] == usize::MAX || gr.vertex_genus(v) == gr.vertex_genus(sigma[v]));
            if ok {
                count += 1;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    count
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[test]
fn automorphism_examples() {
    assert_eq!(StableGraph::trivial(2, 3).unwrap().automorphism_count(), 1);
    let lp = StableGraph::new(vec![0], vec![0], vec![(0, 0)]).unwrap();
    assert_eq!(lp.automorphism_count(), 2);
    assert_eq!(brute_force_automorphisms(&lp), 2);
    let banana = StableGraph::new(vec![0, 0], vec![1, 1, 1, 1, 0], vec![(0, 1), (0, 1)]).unwrap();
    assert_eq!(banana.automorphism_count(), 2);
    assert_eq!(brute_force_automorphisms(&banana), 2);
}

#[test]
fn automorphisms_match_brute_force() {
    for (g, n) in [(1, 1), (1, 2), (2, 0), (2, 1), (0, 4), (0, 5), (1, 3), (3, 0)] {
        for gr in enumerate_stable_graphs(g, n, 3).unwrap() {
            let aut = gr.automorphism_count();
            let sides = 2 * gr.num_edges() as u64;
            assert_eq!(factorial(sides) % aut, 0);
            if sides + n as u64 <= 6 || sides <= 6 {
                assert_eq!(aut, brute_force_automorphisms(&gr), "{gr:?}");
            }
        }
    }
}

#[test]
fn canonical_key_examples() {
    // loop with its two half-edges listed in either order
    let a = StableGraph::from_half_edges(vec![0], &[0, 0, 0], &[0, 2, 1], &[(0, 1)]).unwrap();
    let b = StableGraph::from_half_edges(vec![0], &[0, 0, 0], &[1, 0, 2], &[(2, 1)]).unwrap();
    assert_eq!(a.canonical_key(), b.canonical_key());
    let s12 = StableGraph::new(vec![0, 0], vec![0, 0, 1, 1], vec![(0, 1)]).unwrap();
    let s13 = StableGraph::new(vec![0, 0], vec![0, 1, 0, 1], vec![(0, 1)]).unwrap();
    assert_ne!(s12.canonical_key(), s13.canonical_key());
    assert!(!s12.canonical_key().to_hex().is_empty());
}

fn random_relabel(gr: &StableGraph, rng: &mut impl Rng) -> StableGraph {
    let nv = gr.num_vertices();
    let mut perm: Vec<usize> = (0..nv).collect();
    perm.shuffle(rng);
    let mut genera = vec![0; nv];
    for v in 0..nv {
        genera[perm[v]] = gr.vertex_genus(v);
    }
    let legs = gr.legs().iter().map(|&v| perm[v]).collect();
    let mut edges: Vec<(usize, usize)> = gr
        .edges()
        .iter()
        .map(|&(a, b)| if rng.gen() { (perm[a], perm[b]) } else { (perm[b], perm[a]) })
        .collect();
    edges.shuffle(rng);
    StableGraph::new(genera, legs, edges).unwrap()
}

#[test]
fn random_relabelings_of_a_genus_two_tree() {
    let tree = StableGraph::new(vec![1, 0, 1], vec![1, 1], vec![(0, 1), (1, 2)]).unwrap();
    assert_eq!(tree.genus(), 2);
    let key = tree.canonical_key();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..100 {
        assert_eq!(random_relabel(&tree, &mut rng).canonical_key(), key);
    }
}

#[test]
fn contraction_examples() {
    let s12 = StableGraph::new(vec![0, 0], vec![0, 0, 1, 1], vec![(0, 1)]).unwrap();
    assert!(s12.contract_edge(0).is_isomorphic(&StableGraph::trivial(0, 4).unwrap()));
    let lp = StableGraph::new(vec![0], vec![0], vec![(0, 0)]).unwrap();
    assert!(lp.contract_edge(0).is_isomorphic(&StableGraph::trivial(1, 1).unwrap()));
    for gr in enumerate_stable_graphs(2, 0, 1).unwrap().iter().filter(|g| g.num_edges() == 1) {
        assert_eq!(gr.genus(), 2);
        assert_eq!(gr.contract_edge(0).genus(), 2);
    }
}

#[test]
fn degeneration_examples() {
    let d11 = one_edge_degenerations(&StableGraph::trivial(1, 1).unwrap());
    assert_eq!(d11.len(), 1);
    assert!(d11[0].0.is_loop(d11[0].1));
    assert_eq!(one_edge_degenerations(&StableGraph::trivial(0, 4).unwrap()).len(), 3);
    let d20 = one_edge_degenerations(&StableGraph::trivial(2, 0).unwrap());
    assert_eq!(d20.len(), 2);
    let loops = d20.iter().filter(|(g, e)| g.is_loop(*e)).count();
    assert_eq!(loops, 1);
}

#[test]
fn degenerate_then_contract_is_identity() {
    for (g, n) in [(1, 2), (2, 0), (0, 5), (2, 1)] {
        for gr in enumerate_stable_graphs(g, n, 2).unwrap() {
            for (d, e) in one_edge_degenerations(&gr) {
                assert_eq!(d.num_edges(), gr.num_edges() + 1);
                assert_eq!(d.genus(), gr.genus());
                assert_eq!(d.num_legs(), gr.num_legs());
                assert!(d.contract_edge(e).is_isomorphic(&gr));
            }
        }
    }
}

#[test]
fn json_roundtrip_of_enumerated_graphs() {
    for gr in enumerate_stable_graphs(1, 3, 3).unwrap() {
        let text = serde_json::to_string(&gr.to_json()).unwrap();
        let back = StableGraph::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, gr);
    }
}

mod relabel_props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn keys_and_automorphisms_survive_relabeling(idx in 0usize..1000, seed in any::<u64>()) {
            let all = enumerate_stable_graphs(1, 3, 3).unwrap();
            let gr = &all[idx % all.len()];
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let other = random_relabel(gr, &mut rng);
            prop_assert_eq!(other.canonical_key(), gr.canonical_key());
            prop_assert_eq!(other.automorphism_count(), gr.automorphism_count());
        }
    }
}
