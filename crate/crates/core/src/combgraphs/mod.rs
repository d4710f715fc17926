//! Combinatorics of maps into expanded degenerations.
//!
//! Two layers live here. [`SplitMap`] records how a nodal curve distributes
//! over the components `X_1, .., X_{n+2}` of an expansion `W[n]_0`, with
//! contact multisets along the interfaces; it carries weights, stability and
//! the bookkeeping for splitting at an interface. [`AdmissibleGraph`] and
//! [`AdmissibleTriple`] are the edge-free topological types of relative maps
//! and their gluing data, together with the symmetry group `Eq(η)`.

mod fiber;
mod graphs;
mod split;

pub use fiber::{
    aut_image, automorphism_count, fiber_count, half_types, realize, relative_aut_count, DegreeCheck,
};
pub use graphs::{
    compose, degree, eq_group, genus, invert, is_subgroup, phi_degree, render_perm, topo_type,
    alphabet_triples, AdmissibleGraph, AdmissibleGraphJson, AdmissibleTriple, DegreeLattice, GluedGraph, GluedVertex,
    Root, TripleJson, Vertex, VertexJson, ALPHABET_VERTICES, ALPHABET_WEIGHTS, DEFAULT_EQ_BOUND,
};
pub use split::{
    ample_weights, collapse, decompose, enumerate_split_maps, enumerate_stable_types, glue_halves,
    is_stable, max_length_bound, specialization_sum_check, verify_norm_identity, weight, EnumCaps,
    Node, Piece, RelSplit, Side, SplitMap, SplitMapJson, DEFAULT_ENUM_BOUND,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("a split map needs at least two component groups, got {0}")]
    TooFewGroups(usize),
    #[error("expected {expected} interfaces for {groups} groups, got {got}")]
    InterfaceCount { groups: usize, expected: usize, got: usize },
    #[error("node {node} of interface {interface} points at a missing piece")]
    DanglingNode { interface: usize, node: usize },
    #[error("contact weights must be positive")]
    ZeroWeight,
    #[error("piece {piece} of group {group}: {side} contacts {stored:?} do not match the interface {actual:?}")]
    ContactMismatch { group: usize, piece: usize, side: &'static str, stored: Vec<u32>, actual: Vec<u32> },
    #[error("the curve is not connected")]
    Disconnected,
    #[error("the curve has no pieces")]
    Empty,
    #[error("marked point labels must be exactly 1..={k}, got {got:?}")]
    BadMarks { k: usize, got: Vec<u32> },
    #[error("the map is not stable")]
    NotStable,
    #[error("|Γ| = {0} is not positive")]
    NonPositiveNorm(i64),
    #[error("|Γ| = {norm} exceeds the enumeration bound {bound}")]
    BoundExceeded { norm: i64, bound: i64 },
    #[error("assignment is not monotone and onto: {0}")]
    BadAssignment(String),
    #[error("vertex {vertex}: degree class has length {got}, the lattice has rank {rank}")]
    ClassRank { vertex: usize, got: usize, rank: usize },
    #[error("the lattice functionals have different lengths")]
    LatticeShape,
    #[error("{what} {index} is attached to missing vertex {vertex}")]
    DanglingAttachment { what: &'static str, index: usize, vertex: usize },
    #[error("vertex {0} carries no root, but the graph has several vertices")]
    RootlessVertex(usize),
    #[error("vertex {vertex}: root weights sum to {roots}, but deg_D of its class is {deg_d}")]
    ContactConstraint { vertex: usize, roots: i64, deg_d: i64 },
    #[error("an empty graph cannot carry legs or roots")]
    EmptyWithData,
    #[error("graphs have {0} and {1} roots")]
    RootCount(usize, usize),
    #[error("root {index} has weight {left} on one side and {right} on the other")]
    WeightMismatch { index: usize, left: u32, right: u32 },
    #[error("leg subset {0:?} is not a {1}-element subset of 1..={2}")]
    BadSubset(Vec<usize>, usize, usize),
    #[error("the glued graph is not connected")]
    GluedDisconnected,
    #[error("r = {r} exceeds the brute-force bound {bound}")]
    TooManyRoots { r: usize, bound: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
}

/// Topological type `(b, g, k)` of a map: degree, genus, marked points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TopType {
    pub b: u32,
    pub g: u32,
    pub k: u32,
}

impl TopType {
    pub fn new(b: u32, g: u32, k: u32) -> Self {
        TopType { b, g, k }
    }

    /// `|Γ| = b + 2g - 2 + k`.
    pub fn norm(&self) -> i64 {
        self.b as i64 + 2 * self.g as i64 - 2 + self.k as i64
    }

    /// All types with `1 <= |Γ| <= bound`.
    pub fn all_with_norm_at_most(bound: i64) -> Vec<TopType> {
        let mut out = Vec::new();
        let top = (bound + 2).max(0) as u32;
        for g in 0..=top / 2 {
            for b in 0..=top {
                for k in 0..=top {
                    let t = TopType::new(b, g, k);
                    if (1..=bound).contains(&t.norm()) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }
}
