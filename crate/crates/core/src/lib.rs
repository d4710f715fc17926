//! Exact symbolic and combinatorial toolkit for expanded degenerations and
//! relative stable maps.
//!
//! The crate is organised in layers:
//!
//! * [`poly`] and [`linalg`]: exact rational polynomials and row reduction.
//! * [`exactalg`]: truncated local algebras, the node ring `A[[z1, z2]]/(z1 z2 - s)`
//!   in normal form, ideals and homomorphisms.
//! * [`ratmaps`]: rational maps between affine charts.
//! * [`localmodel`]: the chart atlas of the one-dimensional local model and
//!   the identities relating charts, projections and torus actions.
//! * [`contact`]: contact orders, pure contact and the pre-deformability ideal.
//! * [`combgraphs`]: split maps, weights, admissible graphs and triples, and
//!   the gluing symmetry group.
//!
//! Everything is exact; no floating point is used anywhere.

pub mod combgraphs;
pub mod contact;
pub mod exactalg;
pub mod linalg;
pub mod localmodel;
pub mod poly;
pub mod ratmaps;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `num / den` as a reduced rational. Panics on a zero denominator.
pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text rendering: `p` for integers, `p/q` otherwise.
pub fn render_q(x: &Q) -> String {
    x.to_string()
}

/// Parse `p` or `p/q`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}
