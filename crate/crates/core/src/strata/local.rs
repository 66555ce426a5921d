//! Operations on single-vertex decorations, glued back by the callers.

use num_traits::One;

use super::stratum::Stratum;
use crate::algebra::{int, Rational};
use crate::graphs::{HalfEdge, Shape, StableGraph};

fn single_vertex(g: u32, kappa: Vec<u32>, psi: Vec<u32>) -> Stratum {
    Stratum::from_shape(Shape {
        genera: vec![g],
        colors: vec![kappa],
        legs: psi.into_iter().map(|p| (0, p)).collect(),
        edges: Vec::new(),
    })
}

fn subsets(k: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..(1 << k)).map(move |m| (0..k).map(|i| m >> i & 1 == 1).collect())
}

/// Pushforward along the map forgetting local leg `f` of a single-vertex
/// stratum. The target must be stable.
pub(crate) fn pushforward(local: &Stratum, f: usize) -> Vec<(Stratum, Rational)> {
    let g = local.vertex_genus(0);
    let m = local.num_legs() as usize;
    let psi: Vec<u32> = (1..=m as u32).map(|l| local.leg_psi(l)).collect();
    let kappa = local.kappa(0).to_vec();
    let b = psi[f];
    let mut rest = psi.clone();
    rest.remove(f);
    let kappa0 = int(2 * g as i64 - 2 + (m as i64 - 1));
    let mut out = Vec::new();
    for sel in subsets(kappa.len()) {
        let e: u32 = b + kappa.iter().zip(&sel).filter(|(_, &s)| s).map(|(c, _)| c).sum::<u32>();
        let kept: Vec<u32> = kappa.iter().zip(&sel).filter(|(_, &s)| !s).map(|(c, _)| *c).collect();
        if e >= 1 {
            let mut k = kept;
            let coeff = if e == 1 {
                kappa0.clone()
            } else {
                k.push(e - 1);
                Rational::one()
            };
            out.push((single_vertex(g, k, rest.clone()), coeff));
        } else {
            for (i, &a) in rest.iter().enumerate() {
                if a >= 1 {
                    let mut p = rest.clone();
                    p[i] -= 1;
                    out.push((single_vertex(g, kept.clone(), p), Rational::one()));
                }
            }
        }
    }
    out
}

/// Pullback along the map forgetting a new last local leg.
pub(crate) fn pullback(local: &Stratum) -> Vec<(Stratum, Rational)> {
    let g = local.vertex_genus(0);
    let m = local.num_legs() as usize;
    let psi: Vec<u32> = (1..=m as u32).map(|l| local.leg_psi(l)).collect();
    let kappa = local.kappa(0).to_vec();
    let mut out = Vec::new();
    // prod (kappa_c - psi_new^c) * prod psi^a
    for sel in subsets(kappa.len()) {
        let moved: u32 = kappa.iter().zip(&sel).filter(|(_, &s)| s).map(|(c, _)| c).sum();
        let kept: Vec<u32> = kappa.iter().zip(&sel).filter(|(_, &s)| !s).map(|(c, _)| *c).collect();
        let count = sel.iter().filter(|&&s| s).count();
        let mut p = psi.clone();
        p.push(moved);
        let sign = if count % 2 == 0 { Rational::one() } else { -Rational::one() };
        out.push((single_vertex(g, kept, p), sign));
    }
    // minus the boundary corrections at legs carrying psi
    for (i, &a) in psi.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let mut legs: Vec<(usize, u32)> = psi.iter().map(|&p| (0, p)).collect();
        legs[i] = (1, 0);
        legs.push((1, 0));
        let s = Stratum::from_shape(Shape {
            genera: vec![g, 0],
            colors: vec![kappa.clone(), Vec::new()],
            legs,
            edges: vec![((0, a - 1), (1, 0))],
        });
        out.push((s, -Rational::one()));
    }
    out
}

/// Transports the decoration of a single-vertex stratum to the labeled
/// one-edge graph `target` on the same space: ψ exponents follow their legs,
/// each κ factor is distributed over the vertices.
pub(crate) fn transport(local: &Stratum, target: &StableGraph) -> Vec<Stratum> {
    let kappa = local.kappa(0).to_vec();
    let nv = target.num_vertices();
    let mut out = Vec::new();
    let total = nv.pow(kappa.len() as u32);
    for code in 0..total {
        let mut colors = vec![Vec::new(); nv];
        let mut c = code;
        for &k in &kappa {
            colors[c % nv].push(k);
            c /= nv;
        }
        let mut shape = target.shape();
        shape.colors = colors;
        for (l, leg) in shape.legs.iter_mut().enumerate() {
            leg.1 = local.psi(HalfEdge::Leg(l as u32 + 1));
        }
        out.push(Stratum::from_shape(shape));
    }
    out
}
