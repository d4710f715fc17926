//! Exact row reduction over the rationals.
//!
//! [`Subspace`] keeps a fully reduced echelon basis, so reducing a vector
//! against it yields a canonical representative of its coset (zero in every
//! pivot column). [`LinearSystem`] accumulates equations one at a time and
//! reports the first inconsistent one.

use num_traits::{One, Zero};

use crate::Q;

/// A linear subspace of `Q^dim`.
///
/// Pivot selection prefers the *largest* nonzero column index, so callers
/// that order coordinates by increasing size get pivots on the largest
/// coordinates and canonical representatives supported on small ones.
#[derive(Clone, Debug)]
pub struct Subspace {
    dim: usize,
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(dim: usize) -> Self {
        Subspace { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn spanned_by<I: IntoIterator<Item = Vec<Q>>>(dim: usize, vecs: I) -> Self {
        let mut s = Subspace::new(dim);
        for v in vecs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.rows
    }

    /// Canonical representative of `v` modulo the subspace.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.dim);
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                axpy(&mut v, &-f, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` to the spanning set; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<Q>) -> bool {
        let v = self.reduce(&v);
        let Some(p) = v.iter().rposition(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        let v: Vec<Q> = v.into_iter().map(|x| x * &inv).collect();
        for row in &mut self.rows {
            if !row[p].is_zero() {
                let f = row[p].clone();
                axpy(row, &-f, &v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.rank() == other.rank() && self.contains_subspace(other)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r.clone());
        }
        s
    }
}

fn axpy(y: &mut [Q], a: &Q, x: &[Q]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

/// Outcome of adding an equation that contradicts the earlier ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Inconsistent {
    /// Index of the offending equation, in insertion order.
    pub equation: usize,
}

/// Incrementally built affine system `A x = b` over the rationals.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    nunknowns: usize,
    // Rows are augmented: last entry is the right-hand side.
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
    count: usize,
}

impl LinearSystem {
    pub fn new(nunknowns: usize) -> Self {
        LinearSystem { nunknowns, rows: Vec::new(), pivots: Vec::new(), count: 0 }
    }

    pub fn nunknowns(&self) -> usize {
        self.nunknowns
    }

    /// Adds `coeffs . x = rhs`. Redundant equations are accepted silently.
    pub fn add_equation(&mut self, coeffs: &[Q], rhs: Q) -> Result<(), Inconsistent> {
        assert_eq!(coeffs.len(), self.nunknowns);
        let idx = self.count;
        self.count += 1;
        let mut v: Vec<Q> = coeffs.to_vec();
        v.push(rhs);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                axpy(&mut v, &-f, row);
            }
        }
        let Some(p) = v[..self.nunknowns].iter().position(|x| !x.is_zero()) else {
            if v[self.nunknowns].is_zero() {
                return Ok(());
            }
            return Err(Inconsistent { equation: idx });
        };
        let inv = v[p].recip();
        let v: Vec<Q> = v.into_iter().map(|x| x * &inv).collect();
        for row in &mut self.rows {
            if !row[p].is_zero() {
                let f = row[p].clone();
                axpy(row, &-f, &v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        Ok(())
    }

    /// The solution with every free unknown set to zero.
    pub fn particular(&self) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.nunknowns];
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            x[p] = row[self.nunknowns].clone();
        }
        x
    }

    /// A basis of the solution space of the homogeneous system.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut is_pivot = vec![false; self.nunknowns];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for f in (0..self.nunknowns).filter(|&j| !is_pivot[j]) {
            let mut x = vec![Q::zero(); self.nunknowns];
            x[f] = Q::one();
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                x[p] = -row[f].clone();
            }
            out.push(x);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn reduce_is_canonical_and_idempotent() {
        let s = Subspace::spanned_by(3, vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]]);
        assert_eq!(s.rank(), 2);
        let v = vec![q(2), q(5), q(7)];
        let r = s.reduce(&v);
        assert_eq!(s.reduce(&r), r);
        // v - r lies in the subspace
        let d: Vec<Q> = v.iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(s.contains(&d));
        assert!(r[1].is_zero() && r[2].is_zero());
    }

    #[test]
    fn system_detects_first_inconsistency() {
        let mut sys = LinearSystem::new(2);
        sys.add_equation(&[q(1), q(1)], q(2)).unwrap();
        sys.add_equation(&[q(2), q(2)], q(4)).unwrap();
        assert_eq!(sys.add_equation(&[q(1), q(1)], q(3)), Err(Inconsistent { equation: 2 }));
    }

    #[test]
    fn particular_and_kernel() {
        let mut sys = LinearSystem::new(3);
        sys.add_equation(&[q(1), q(0), q(1)], q(1)).unwrap();
        let p = sys.particular();
        assert_eq!(p[0].clone() + p[2].clone(), q(1));
        let k = sys.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(v[0].clone() + v[2].clone(), q(0));
        }
    }
}
