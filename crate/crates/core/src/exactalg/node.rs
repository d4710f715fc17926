use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::algebra::same;
use super::{AlgError, AlgebraElement, AlgebraHom, AlgebraIdeal, TruncatedAlgebra};
use crate::poly::{parse_poly, Poly};
use crate::Q;

/// Position of a coefficient in a normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Const,
    Z1(usize),
    Z2(usize),
}

impl Slot {
    /// Exponents `(i, j)` of `z1^i z2^j`.
    pub fn exponents(self) -> (usize, usize) {
        match self {
            Slot::Const => (0, 0),
            Slot::Z1(k) => (k, 0),
            Slot::Z2(k) => (0, k),
        }
    }

    pub fn power(self) -> usize {
        let (i, j) = self.exponents();
        i + j
    }
}

/// `A[z1, z2] / (z1 z2 - s, z1^M, z2^M)`.
///
/// In normal form the coefficient of `z1^k` (or `z2^k`) is only defined modulo
/// `s^(M-k)`, since `s^(M-k) z1^k = z1^M z2^(M-k) = 0`. Coefficients are kept
/// reduced modulo those ideals, which makes the representation unique.
#[derive(Debug)]
pub struct NodeRing {
    alg: Arc<TruncatedAlgebra>,
    order: usize,
    s_pows: Vec<AlgebraElement>,
    // moduli[m] = (s^m)
    moduli: Vec<AlgebraIdeal>,
}

impl NodeRing {
    pub fn new(alg: &Arc<TruncatedAlgebra>, order: usize) -> Result<Arc<Self>, AlgError> {
        if order == 0 {
            return Err(AlgError::ZeroOrder);
        }
        let s = AlgebraElement::s(alg);
        let mut s_pows = vec![AlgebraElement::one(alg)];
        for k in 1..=order {
            s_pows.push(&s_pows[k - 1] * &s);
        }
        let moduli = s_pows.iter().map(|p| AlgebraIdeal::new(alg, vec![p.clone()])).collect::<Result<_, _>>()?;
        Ok(Arc::new(NodeRing { alg: alg.clone(), order, s_pows, moduli }))
    }

    pub fn algebra(&self) -> &Arc<TruncatedAlgebra> {
        &self.alg
    }

    /// The series order `M`: `z1^M = z2^M = 0`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// All slots in vector order: constant, `z1^1..z1^(M-1)`, `z2^1..z2^(M-1)`.
    pub fn slots(&self) -> Vec<Slot> {
        let mut out = vec![Slot::Const];
        out.extend((1..self.order).map(Slot::Z1));
        out.extend((1..self.order).map(Slot::Z2));
        out
    }

    /// Dimension of the flattened coordinate space (not of the quotient).
    pub fn vector_len(&self) -> usize {
        (2 * self.order - 1) * self.alg.dim()
    }

    /// Ideal that the coefficient at `slot` is reduced modulo.
    pub fn modulus(&self, slot: Slot) -> &AlgebraIdeal {
        &self.moduli[self.order - slot.power()]
    }

    pub fn s_pow(&self, k: usize) -> AlgebraElement {
        if k <= self.order {
            self.s_pows[k].clone()
        } else {
            AlgebraElement::s(&self.alg).pow(k as u32)
        }
    }
}

/// An element of a [`NodeRing`] in normal form `a0 + sum a_i z1^i + sum b_i z2^i`.
#[derive(Clone, Debug)]
pub struct NodeSeries {
    ring: Arc<NodeRing>,
    a0: AlgebraElement,
    z1: Vec<AlgebraElement>,
    z2: Vec<AlgebraElement>,
}

impl PartialEq for NodeSeries {
    fn eq(&self, other: &Self) -> bool {
        self.ring.order == other.ring.order && self.a0 == other.a0 && self.z1 == other.z1 && self.z2 == other.z2
    }
}

fn same_ring(a: &NodeRing, b: &NodeRing) -> bool {
    a.order == b.order && same(&a.alg, &b.alg)
}

impl NodeSeries {
    pub fn zero(ring: &Arc<NodeRing>) -> Self {
        let z = AlgebraElement::zero(&ring.alg);
        NodeSeries { ring: ring.clone(), a0: z.clone(), z1: vec![z.clone(); ring.order - 1], z2: vec![z; ring.order - 1] }
    }

    pub fn one(ring: &Arc<NodeRing>) -> Self {
        Self::constant(ring, AlgebraElement::one(&ring.alg))
    }

    pub fn constant(ring: &Arc<NodeRing>, a: AlgebraElement) -> Self {
        Self::monomial(ring, Slot::Const, a)
    }

    /// `a * z1^i` or `a * z2^j`; powers at or beyond `M` give zero.
    pub fn monomial(ring: &Arc<NodeRing>, slot: Slot, a: AlgebraElement) -> Self {
        let mut out = Self::zero(ring);
        if slot.power() < ring.order {
            *out.slot_mut(slot) = a;
            out.canonicalize();
        }
        out
    }

    pub fn z1(ring: &Arc<NodeRing>) -> Self {
        Self::monomial(ring, Slot::Z1(1), AlgebraElement::one(&ring.alg))
    }

    pub fn z2(ring: &Arc<NodeRing>) -> Self {
        Self::monomial(ring, Slot::Z2(1), AlgebraElement::one(&ring.alg))
    }

    /// Builds from a constant and two tails (`tail[0]` is the coefficient of `z^1`).
    pub fn from_parts(
        ring: &Arc<NodeRing>,
        a0: AlgebraElement,
        z1: Vec<AlgebraElement>,
        z2: Vec<AlgebraElement>,
    ) -> Result<Self, AlgError> {
        for t in [&z1, &z2] {
            if t.len() >= ring.order {
                return Err(AlgError::TailTooLong { got: t.len(), order: ring.order });
            }
        }
        if !same(a0.algebra(), &ring.alg) || z1.iter().chain(&z2).any(|x| !same(x.algebra(), &ring.alg)) {
            return Err(AlgError::Mismatch);
        }
        let mut out = Self::zero(ring);
        out.a0 = a0;
        for (k, x) in z1.into_iter().enumerate() {
            out.z1[k] = x;
        }
        for (k, x) in z2.into_iter().enumerate() {
            out.z2[k] = x;
        }
        out.canonicalize();
        Ok(out)
    }

    /// Parses a polynomial over the algebra generators together with `z1`, `z2`.
    pub fn parse(ring: &Arc<NodeRing>, text: &str) -> Result<Self, AlgError> {
        let g = ring.alg.ngens();
        let mut names = ring.alg.generators().to_vec();
        names.push("z1".into());
        names.push("z2".into());
        let p = parse_poly(text, &names).map_err(|reason| AlgError::Parse { text: text.to_string(), reason })?;
        let mut terms = Vec::new();
        for (e, c) in p.terms() {
            let mut ae = e[..g].to_vec();
            ae.resize(g, 0);
            let coef = AlgebraElement::from_poly(&ring.alg, &Poly::monomial(g, ae, c.clone()));
            terms.push((e[g], e[g + 1], coef));
        }
        normal_form(ring, &terms)
    }

    pub fn ring(&self) -> &Arc<NodeRing> {
        &self.ring
    }

    pub fn a0(&self) -> &AlgebraElement {
        &self.a0
    }

    /// Coefficients of `z1^1 .. z1^(M-1)`.
    pub fn z1_tail(&self) -> &[AlgebraElement] {
        &self.z1
    }

    /// Coefficients of `z2^1 .. z2^(M-1)`.
    pub fn z2_tail(&self) -> &[AlgebraElement] {
        &self.z2
    }

    pub fn coeff(&self, slot: Slot) -> AlgebraElement {
        match slot {
            Slot::Const => self.a0.clone(),
            Slot::Z1(k) if k >= 1 && k < self.ring.order => self.z1[k - 1].clone(),
            Slot::Z2(k) if k >= 1 && k < self.ring.order => self.z2[k - 1].clone(),
            _ => AlgebraElement::zero(&self.ring.alg),
        }
    }

    fn slot_mut(&mut self, slot: Slot) -> &mut AlgebraElement {
        match slot {
            Slot::Const | Slot::Z1(0) | Slot::Z2(0) => &mut self.a0,
            Slot::Z1(k) => &mut self.z1[k - 1],
            Slot::Z2(k) => &mut self.z2[k - 1],
        }
    }

    fn canonicalize(&mut self) {
        for slot in self.ring.slots() {
            let r = self.ring.modulus(slot).reduce(&self.coeff(slot));
            *self.slot_mut(slot) = r;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.z1.iter().all(AlgebraElement::is_zero) && self.z2.iter().all(AlgebraElement::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        self.a0.is_unit()
    }

    /// Flattened coordinates, slot by slot in [`NodeRing::slots`] order.
    pub fn to_vector(&self) -> Vec<Q> {
        let mut v = Vec::with_capacity(self.ring.vector_len());
        v.extend(self.a0.coords().iter().cloned());
        for x in self.z1.iter().chain(&self.z2) {
            v.extend(x.coords().iter().cloned());
        }
        v
    }

    /// Inverse of [`to_vector`](Self::to_vector); the result is re-normalized.
    pub fn from_vector(ring: &Arc<NodeRing>, v: &[Q]) -> Result<Self, AlgError> {
        if v.len() != ring.vector_len() {
            return Err(AlgError::BadLength { got: v.len(), expected: ring.vector_len() });
        }
        let d = ring.alg.dim();
        let mut out = Self::zero(ring);
        for (i, slot) in ring.slots().into_iter().enumerate() {
            *out.slot_mut(slot) = AlgebraElement::from_coords(&ring.alg, v[i * d..(i + 1) * d].to_vec())?;
        }
        out.canonicalize();
        Ok(out)
    }

    /// Multiplies every coefficient by an element of `A`.
    pub fn scale(&self, a: &AlgebraElement) -> Self {
        let mut out = self.clone();
        out.a0 = &out.a0 * a;
        for x in out.z1.iter_mut().chain(out.z2.iter_mut()) {
            *x = &*x * a;
        }
        out.canonicalize();
        out
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(AlgError::Mismatch);
        }
        let m = self.ring.order;
        let mut out = Self::zero(&self.ring);
        let xs: Vec<(Slot, &AlgebraElement)> = self.nonzero().collect();
        let ys: Vec<(Slot, &AlgebraElement)> = other.nonzero().collect();
        for (sx, x) in &xs {
            for (sy, y) in &ys {
                let (i1, j1) = sx.exponents();
                let (i2, j2) = sy.exponents();
                let (i, j) = (i1 + i2, j1 + j2);
                let k = i.min(j);
                let (i, j) = (i - k, j - k);
                if i >= m || j >= m {
                    continue;
                }
                let slot = if i > 0 { Slot::Z1(i) } else if j > 0 { Slot::Z2(j) } else { Slot::Const };
                let mut c = *x * *y;
                if k > 0 {
                    c = &c * &self.ring.s_pow(k);
                }
                let acc = out.slot_mut(slot);
                *acc = &*acc + &c;
            }
        }
        out.canonicalize();
        Ok(out)
    }

    fn nonzero(&self) -> impl Iterator<Item = (Slot, &AlgebraElement)> {
        std::iter::once((Slot::Const, &self.a0))
            .chain(self.z1.iter().enumerate().map(|(k, x)| (Slot::Z1(k + 1), x)))
            .chain(self.z2.iter().enumerate().map(|(k, x)| (Slot::Z2(k + 1), x)))
            .filter(|(_, x)| !x.is_zero())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a unit; `x = a0 (1 + t)` with `t` nilpotent.
    pub fn inverse(&self) -> Result<Self, AlgError> {
        let a0inv = self.a0.inverse()?;
        let t = &self.scale(&a0inv) - &Self::one(&self.ring);
        let neg = -&t;
        let mut term = Self::one(&self.ring);
        let mut acc = Self::one(&self.ring);
        loop {
            term = &term * &neg;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(&a0inv))
    }

    /// Exchanges the roles of `z1` and `z2`.
    pub fn swap(&self) -> Self {
        NodeSeries { ring: self.ring.clone(), a0: self.a0.clone(), z1: self.z2.clone(), z2: self.z1.clone() }
    }

    /// Coefficientwise image under `h`, re-normalized in `target`.
    pub fn map(&self, h: &AlgebraHom, target: &Arc<NodeRing>) -> Result<Self, AlgError> {
        if !same(h.source(), &self.ring.alg) || !same(h.target(), &target.alg) || target.order != self.ring.order {
            return Err(AlgError::Mismatch);
        }
        let a0 = h.apply(&self.a0)?;
        let z1 = self.z1.iter().map(|x| h.apply(x)).collect::<Result<Vec<_>, _>>()?;
        let z2 = self.z2.iter().map(|x| h.apply(x)).collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(target, a0, z1, z2)
    }

    /// Polynomial in the algebra generators followed by `z1`, `z2`.
    pub fn to_poly(&self) -> Poly {
        let g = self.ring.alg.ngens();
        let mut out = Poly::zero(g + 2);
        for (slot, x) in self.nonzero() {
            let (i, j) = slot.exponents();
            let map: Vec<usize> = (0..g).collect();
            let lifted = x.to_poly().remap(g + 2, &map);
            let mut e = vec![0; g + 2];
            e[g] = i as u32;
            e[g + 1] = j as u32;
            out = &out + &lifted.mul_monomial(&e, &Q::one());
        }
        out
    }

    pub fn render(&self) -> String {
        let mut names = self.ring.alg.generators().to_vec();
        names.push("z1".into());
        names.push("z2".into());
        self.to_poly().render(&names)
    }

    pub fn to_json(&self) -> NodeSeriesJson {
        let trim = |t: &[AlgebraElement]| {
            let len = t.iter().rposition(|x| !x.is_zero()).map_or(0, |p| p + 1);
            t[..len].iter().map(AlgebraElement::render).collect()
        };
        NodeSeriesJson { a0: self.a0.render(), z1: trim(&self.z1), z2: trim(&self.z2) }
    }
}

impl fmt::Display for NodeSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// JSON form of a [`NodeSeries`]: coefficients as polynomial strings in the
/// algebra generators; `z1[k]` is the coefficient of `z1^(k+1)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NodeSeriesJson {
    #[serde(default = "zero_text")]
    pub a0: String,
    #[serde(default)]
    pub z1: Vec<String>,
    #[serde(default)]
    pub z2: Vec<String>,
}

fn zero_text() -> String {
    "0".into()
}

impl NodeSeriesJson {
    pub fn build(&self, ring: &Arc<NodeRing>) -> Result<NodeSeries, AlgError> {
        let alg = ring.algebra();
        let a0 = AlgebraElement::parse(alg, &self.a0)?;
        let z1 = self.z1.iter().map(|t| AlgebraElement::parse(alg, t)).collect::<Result<_, _>>()?;
        let z2 = self.z2.iter().map(|t| AlgebraElement::parse(alg, t)).collect::<Result<_, _>>()?;
        NodeSeries::from_parts(ring, a0, z1, z2)
    }
}

/// Normal form of `sum c * z1^i z2^j`, rewriting each `z1 z2` to `s`.
///
/// Terms of total degree above `M` are rejected.
pub fn normal_form(ring: &Arc<NodeRing>, terms: &[(u32, u32, AlgebraElement)]) -> Result<NodeSeries, AlgError> {
    let m = ring.order;
    let mut out = NodeSeries::zero(ring);
    for (i, j, c) in terms {
        if !same(c.algebra(), &ring.alg) {
            return Err(AlgError::Mismatch);
        }
        if (*i + *j) as usize > m {
            return Err(AlgError::DegreeOverflow { i: *i, j: *j, order: m });
        }
        let k = (*i).min(*j) as usize;
        let (i, j) = (*i as usize - k, *j as usize - k);
        if i >= m || j >= m {
            continue;
        }
        let slot = if i > 0 { Slot::Z1(i) } else if j > 0 { Slot::Z2(j) } else { Slot::Const };
        let acc = out.slot_mut(slot);
        *acc = &*acc + &(c * &ring.s_pow(k));
    }
    out.canonicalize();
    Ok(out)
}

pub fn series_mul(x: &NodeSeries, y: &NodeSeries) -> Result<NodeSeries, AlgError> {
    x.try_mul(y)
}

pub fn series_invert(x: &NodeSeries) -> Result<NodeSeries, AlgError> {
    x.inverse()
}

impl Add for &NodeSeries {
    type Output = NodeSeries;
    fn add(self, rhs: &NodeSeries) -> NodeSeries {
        assert!(same_ring(&self.ring, &rhs.ring), "operands live over different node rings");
        let mut out = self.clone();
        out.a0 = &out.a0 + &rhs.a0;
        for (x, y) in out.z1.iter_mut().zip(&rhs.z1).chain(out.z2.iter_mut().zip(&rhs.z2)) {
            *x = &*x + y;
        }
        out
    }
}

impl Sub for &NodeSeries {
    type Output = NodeSeries;
    fn sub(self, rhs: &NodeSeries) -> NodeSeries {
        self + &(-rhs)
    }
}

impl Neg for &NodeSeries {
    type Output = NodeSeries;
    fn neg(self) -> NodeSeries {
        NodeSeries {
            ring: self.ring.clone(),
            a0: -&self.a0,
            z1: self.z1.iter().map(|x| -x).collect(),
            z2: self.z2.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for &NodeSeries {
    type Output = NodeSeries;
    fn mul(self, rhs: &NodeSeries) -> NodeSeries {
        self.try_mul(rhs).expect("operands live over different node rings")
    }
}
