//! Stable graphs: validation, canonical forms, automorphisms, contraction,
//! degeneration and enumeration up to isomorphism.

mod canon;
mod enumerate;
mod graph;

pub use canon::{canonicalize, permutations_within_blocks, vertex_blocks, End, Shape};
pub use enumerate::{enumerate_stable_graphs, one_edge_degenerations};
pub use graph::{CanonicalKey, GraphJson, HalfEdge, StableGraph};

pub(crate) use canon::automorphism_count as shape_automorphism_count;
