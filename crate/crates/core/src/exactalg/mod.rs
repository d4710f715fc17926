//! Truncated local algebras over the rationals and the node ring over them.
//!
//! A [`TruncatedAlgebra`] is `Q[x_1..x_g] / (relations, all monomials of degree >= N)`.
//! The first generator always plays the role of `s`. Everything downstream
//! (ideals, kernels, homomorphisms) reduces to finite-dimensional linear
//! algebra over `Q`.
//!
//! The node ring over `A` is `A[z1, z2] / (z1 z2 - s, z1^M, z2^M)`; its elements
//! are kept as [`NodeSeries`] in normal form `a0 + sum a_i z1^i + sum b_i z2^i`.

mod algebra;
mod node;

pub use algebra::{AlgebraElement, AlgebraHom, AlgebraIdeal, AlgebraJson, TruncatedAlgebra};
pub use node::{normal_form, series_invert, series_mul, NodeRing, NodeSeries, NodeSeriesJson, Slot};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgError {
    #[error("an algebra needs at least one generator (the first one is s)")]
    NoGenerators,
    #[error("relation {index} uses {got} variables, the algebra has {expected} generators")]
    RelationArity { index: usize, got: usize, expected: usize },
    #[error("relation {0} has a nonzero constant term, so the algebra is not local")]
    NonLocalRelation(usize),
    #[error("truncation order must be at least 1")]
    ZeroTruncation,
    #[error("operands live over different algebras")]
    Mismatch,
    #[error("element is not a unit: its constant term is zero")]
    NotUnit,
    #[error("homomorphism gives {got} generator images, the source has {expected} generators")]
    HomArity { got: usize, expected: usize },
    #[error("homomorphism does not respect the relation {0}")]
    RelationViolated(String),
    #[error("term z1^{i} z2^{j} has degree above the series order {order}")]
    DegreeOverflow { i: u32, j: u32, order: usize },
    #[error("series order must be at least 1")]
    ZeroOrder,
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("tail of length {got} exceeds series order {order}")]
    TailTooLong { got: usize, order: usize },
    #[error("cannot parse '{text}': {reason}")]
    Parse { text: String, reason: String },
}
