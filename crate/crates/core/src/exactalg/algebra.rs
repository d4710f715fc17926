use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::AlgError;
use crate::linalg::Subspace;
use crate::poly::{parse_poly, Exponent, Poly};
use crate::Q;

/// `Q[x_1..x_g] / (relations) / (monomials of total degree >= N)`.
///
/// Monomials of degree `< N` are listed in graded order (degree first, then
/// lexicographic). The relation ideal is row-reduced with pivots on the
/// largest monomials, so the standard monomials (non-pivots) form a basis
/// of low-degree representatives.
#[derive(Debug)]
pub struct TruncatedAlgebra {
    gens: Vec<String>,
    relations: Vec<Poly>,
    trunc: u32,
    local: bool,
    monos: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
    basis: Vec<usize>,
    // normal form of every monomial of degree < N, in basis coordinates
    normal: Vec<Vec<(usize, Q)>>,
}

impl PartialEq for TruncatedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.relations == other.relations && self.trunc == other.trunc
    }
}

fn graded_monomials(nvars: usize, bound: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for d in 0..bound {
        let mut level = Vec::new();
        fill(nvars, d, &mut vec![0; nvars], 0, &mut level);
        level.sort();
        out.extend(level);
    }
    out
}

fn fill(nvars: usize, left: u32, cur: &mut Exponent, at: usize, out: &mut Vec<Exponent>) {
    if at + 1 == nvars {
        cur[at] = left;
        out.push(cur.clone());
        cur[at] = 0;
        return;
    }
    for k in 0..=left {
        cur[at] = k;
        fill(nvars, left - k, cur, at + 1, out);
    }
    cur[at] = 0;
}

impl TruncatedAlgebra {
    pub fn new(gens: Vec<String>, relations: Vec<Poly>, trunc: u32, local: bool) -> Result<Arc<Self>, AlgError> {
        if gens.is_empty() {
            return Err(AlgError::NoGenerators);
        }
        if trunc == 0 {
            return Err(AlgError::ZeroTruncation);
        }
        let g = gens.len();
        for (i, r) in relations.iter().enumerate() {
            if r.nvars() != g {
                return Err(AlgError::RelationArity { index: i, got: r.nvars(), expected: g });
            }
            if local && !r.constant_term().is_zero() {
                return Err(AlgError::NonLocalRelation(i));
            }
        }
        let monos = graded_monomials(g, trunc);
        let index: HashMap<Exponent, usize> = monos.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let to_vec = |p: &Poly| {
            let mut v = vec![Q::zero(); monos.len()];
            for (e, c) in p.terms() {
                if let Some(&i) = index.get(e) {
                    v[i] += c;
                }
            }
            v
        };
        let mut rel = Subspace::new(monos.len());
        for r in &relations {
            let r = r.truncate_degree(trunc);
            let Some(low) = r.terms().map(|(e, _)| e.iter().sum::<u32>()).min() else {
                continue;
            };
            for m in &monos {
                if m.iter().sum::<u32>() + low >= trunc {
                    continue;
                }
                rel.insert(to_vec(&r.mul_monomial(m, &Q::one())));
            }
        }
        let mut is_pivot = vec![false; monos.len()];
        for &p in rel.pivots() {
            is_pivot[p] = true;
        }
        let basis: Vec<usize> = (0..monos.len()).filter(|&i| !is_pivot[i]).collect();
        let mut pos = vec![usize::MAX; monos.len()];
        for (b, &m) in basis.iter().enumerate() {
            pos[m] = b;
        }
        let normal = (0..monos.len())
            .map(|i| {
                let mut v = vec![Q::zero(); monos.len()];
                v[i] = Q::one();
                rel.reduce(&v)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| (pos[j], c))
                    .collect()
            })
            .collect();
        Ok(Arc::new(TruncatedAlgebra { gens, relations, trunc, local, monos, index, basis, normal }))
    }

    /// `Q[s]/(s^N)`.
    pub fn power_series(trunc: u32) -> Arc<Self> {
        Self::new(vec!["s".into()], vec![], trunc, true).expect("valid presentation")
    }

    /// Parses relations written over the generator names.
    pub fn parse(gens: &[&str], relations: &[&str], trunc: u32) -> Result<Arc<Self>, AlgError> {
        let names: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
        let rels = relations
            .iter()
            .map(|r| parse_poly(r, &names).map_err(|reason| AlgError::Parse { text: r.to_string(), reason }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(names, rels, trunc, true)
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    pub fn is_local(&self) -> bool {
        self.local
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    /// Dimension over `Q`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Exponents of the standard monomials, in basis order.
    pub fn basis_monomials(&self) -> Vec<&Exponent> {
        self.basis.iter().map(|&i| &self.monos[i]).collect()
    }

    /// Same generators and truncation with extra relations.
    pub fn quotient(&self, extra: &[Poly]) -> Result<Arc<Self>, AlgError> {
        let mut rels = self.relations.clone();
        rels.extend(extra.iter().cloned());
        Self::new(self.gens.clone(), rels, self.trunc, self.local)
    }

    fn reduce_monomial(&self, e: &[u32]) -> Option<&[(usize, Q)]> {
        if e.iter().sum::<u32>() >= self.trunc {
            return None;
        }
        self.index.get(e).map(|&i| self.normal[i].as_slice())
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            generators: self.gens.clone(),
            relations: self.relations.iter().map(|r| r.render(&self.gens)).collect(),
            truncation: self.trunc,
            local: self.local,
        }
    }
}

fn zero(alg: &Arc<TruncatedAlgebra>) -> AlgebraElement {
    AlgebraElement { alg: alg.clone(), coords: vec![Q::zero(); alg.dim()] }
}

/// JSON form of a [`TruncatedAlgebra`]; relations are polynomial strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraJson {
    pub generators: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    pub truncation: u32,
    #[serde(default = "default_true")]
    pub local: bool,
}

fn default_true() -> bool {
    true
}

impl AlgebraJson {
    pub fn build(&self) -> Result<Arc<TruncatedAlgebra>, AlgError> {
        let rels = self
            .relations
            .iter()
            .map(|r| parse_poly(r, &self.generators).map_err(|reason| AlgError::Parse { text: r.clone(), reason }))
            .collect::<Result<Vec<_>, _>>()?;
        TruncatedAlgebra::new(self.generators.clone(), rels, self.truncation, self.local)
    }
}

/// An element of a [`TruncatedAlgebra`], as coordinates over its monomial basis.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    alg: Arc<TruncatedAlgebra>,
    coords: Vec<Q>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        same(&self.alg, &other.alg) && self.coords == other.coords
    }
}

pub(crate) fn same(a: &Arc<TruncatedAlgebra>, b: &Arc<TruncatedAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl AlgebraElement {
    pub fn zero(alg: &Arc<TruncatedAlgebra>) -> Self {
        zero(alg)
    }

    pub fn one(alg: &Arc<TruncatedAlgebra>) -> Self {
        Self::constant(alg, Q::one())
    }

    pub fn constant(alg: &Arc<TruncatedAlgebra>, c: Q) -> Self {
        Self::from_poly(alg, &Poly::constant(alg.ngens(), c))
    }

    pub fn gen(alg: &Arc<TruncatedAlgebra>, i: usize) -> Self {
        Self::from_poly(alg, &Poly::var(alg.ngens(), i))
    }

    /// The distinguished element `s` (first generator).
    pub fn s(alg: &Arc<TruncatedAlgebra>) -> Self {
        Self::gen(alg, 0)
    }

    pub fn from_coords(alg: &Arc<TruncatedAlgebra>, coords: Vec<Q>) -> Result<Self, AlgError> {
        if coords.len() != alg.dim() {
            return Err(AlgError::BadLength { got: coords.len(), expected: alg.dim() });
        }
        Ok(AlgebraElement { alg: alg.clone(), coords })
    }

    /// Image of a polynomial in the generators.
    pub fn from_poly(alg: &Arc<TruncatedAlgebra>, p: &Poly) -> Self {
        assert_eq!(p.nvars(), alg.ngens(), "polynomial arity does not match the algebra");
        let mut coords = vec![Q::zero(); alg.dim()];
        for (e, c) in p.terms() {
            if let Some(nf) = alg.reduce_monomial(e) {
                for (j, x) in nf {
                    coords[*j] += c * x;
                }
            }
        }
        AlgebraElement { alg: alg.clone(), coords }
    }

    pub fn parse(alg: &Arc<TruncatedAlgebra>, text: &str) -> Result<Self, AlgError> {
        let p = parse_poly(text, alg.generators())
            .map_err(|reason| AlgError::Parse { text: text.to_string(), reason })?;
        Ok(Self::from_poly(alg, &p))
    }

    pub fn algebra(&self) -> &Arc<TruncatedAlgebra> {
        &self.alg
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    /// Canonical representative as a polynomial in the generators.
    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(
            self.alg.ngens(),
            self.coords
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(b, c)| (self.alg.monos[self.alg.basis[b]].clone(), c.clone())),
        )
    }

    pub fn render(&self) -> String {
        self.to_poly().render(&self.alg.gens)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Rational constant term, i.e. the image in the residue field.
    pub fn constant_term(&self) -> Q {
        // basis position 0 is the monomial 1 unless the algebra is zero
        match self.alg.basis.first() {
            Some(&0) => self.coords[0].clone(),
            _ => Q::zero(),
        }
    }

    pub fn is_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    pub fn scale(&self, c: &Q) -> Self {
        AlgebraElement { alg: self.alg.clone(), coords: self.coords.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.alg);
        for _ in 0..k {
            if acc.is_zero() {
                break;
            }
            acc = &acc * self;
        }
        acc
    }

    /// Inverse by a finite Neumann series; all generators are nilpotent.
    pub fn inverse(&self) -> Result<Self, AlgError> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(AlgError::NotUnit);
        }
        let cinv = c.recip();
        // self = c (1 + n) with n nilpotent
        let n = &self.scale(&cinv) - &Self::one(&self.alg);
        let neg = -&n;
        let mut term = Self::one(&self.alg);
        let mut acc = Self::one(&self.alg);
        loop {
            term = &term * &neg;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(&cinv))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgError> {
        if !same(&self.alg, &other.alg) {
            return Err(AlgError::Mismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let alg = &self.alg;
        let mut coords = vec![Q::zero(); alg.dim()];
        let mut e = vec![0u32; alg.ngens()];
        for (i, x) in self.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let mi = &alg.monos[alg.basis[i]];
            for (j, y) in other.coords.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let mj = &alg.monos[alg.basis[j]];
                for k in 0..e.len() {
                    e[k] = mi[k] + mj[k];
                }
                if let Some(nf) = alg.reduce_monomial(&e) {
                    let xy = x * y;
                    for (b, c) in nf {
                        coords[*b] += &xy * c;
                    }
                }
            }
        }
        AlgebraElement { alg: alg.clone(), coords }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert!(same(&self.alg, &rhs.alg), "operands live over different algebras");
        AlgebraElement {
            alg: self.alg.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert!(same(&self.alg, &rhs.alg), "operands live over different algebras");
        AlgebraElement {
            alg: self.alg.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { alg: self.alg.clone(), coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert!(same(&self.alg, &rhs.alg), "operands live over different algebras");
        self.mul_unchecked(rhs)
    }
}

/// An ideal of a [`TruncatedAlgebra`], cached as a `Q`-subspace.
#[derive(Clone, Debug)]
pub struct AlgebraIdeal {
    alg: Arc<TruncatedAlgebra>,
    generators: Vec<AlgebraElement>,
    space: Subspace,
}

impl AlgebraIdeal {
    pub fn new(alg: &Arc<TruncatedAlgebra>, generators: Vec<AlgebraElement>) -> Result<Self, AlgError> {
        if generators.iter().any(|g| !same(&g.alg, alg)) {
            return Err(AlgError::Mismatch);
        }
        let mut space = Subspace::new(alg.dim());
        let monos: Vec<AlgebraElement> = (0..alg.dim())
            .map(|b| {
                let mut v = vec![Q::zero(); alg.dim()];
                v[b] = Q::one();
                AlgebraElement { alg: alg.clone(), coords: v }
            })
            .collect();
        for g in &generators {
            if g.is_zero() {
                continue;
            }
            for m in &monos {
                space.insert((g * m).coords);
            }
        }
        Ok(AlgebraIdeal { alg: alg.clone(), generators, space })
    }

    pub fn zero(alg: &Arc<TruncatedAlgebra>) -> Self {
        AlgebraIdeal { alg: alg.clone(), generators: Vec::new(), space: Subspace::new(alg.dim()) }
    }

    pub fn algebra(&self) -> &Arc<TruncatedAlgebra> {
        &self.alg
    }

    pub fn generators(&self) -> &[AlgebraElement] {
        &self.generators
    }

    /// Dimension of the ideal over `Q`.
    pub fn rank(&self) -> usize {
        self.space.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.space.rank() == 0
    }

    pub fn contains(&self, x: &AlgebraElement) -> Result<bool, AlgError> {
        if !same(&x.alg, &self.alg) {
            return Err(AlgError::Mismatch);
        }
        Ok(self.space.contains(&x.coords))
    }

    /// Canonical representative of `x` modulo the ideal.
    pub fn reduce(&self, x: &AlgebraElement) -> AlgebraElement {
        assert!(same(&x.alg, &self.alg), "operands live over different algebras");
        AlgebraElement { alg: self.alg.clone(), coords: self.space.reduce(&x.coords) }
    }

    /// A `Q`-basis of the ideal as elements.
    pub fn vector_basis(&self) -> Vec<AlgebraElement> {
        self.space
            .basis()
            .iter()
            .map(|v| AlgebraElement { alg: self.alg.clone(), coords: v.clone() })
            .collect()
    }

    pub fn same_as(&self, other: &AlgebraIdeal) -> bool {
        same(&self.alg, &other.alg) && self.space.same_as(&other.space)
    }

    pub fn is_subset_of(&self, other: &AlgebraIdeal) -> bool {
        same(&self.alg, &other.alg) && other.space.contains_subspace(&self.space)
    }

    pub fn sum(&self, other: &AlgebraIdeal) -> Result<AlgebraIdeal, AlgError> {
        if !same(&self.alg, &other.alg) {
            return Err(AlgError::Mismatch);
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(AlgebraIdeal { alg: self.alg.clone(), generators, space: self.space.sum(&other.space) })
    }

    /// The extension `h(I) * target`.
    pub fn extend(&self, h: &AlgebraHom) -> Result<AlgebraIdeal, AlgError> {
        if !same(&h.source, &self.alg) {
            return Err(AlgError::Mismatch);
        }
        let gens = self.generators.iter().map(|g| h.apply(g)).collect::<Result<Vec<_>, _>>()?;
        AlgebraIdeal::new(&h.target, gens)
    }

    /// `A/I` with the same generators, and the quotient map.
    pub fn quotient(&self) -> Result<(Arc<TruncatedAlgebra>, AlgebraHom), AlgError> {
        let extra: Vec<Poly> = self.generators.iter().map(|g| g.to_poly()).collect();
        let q = self.alg.quotient(&extra)?;
        let images = (0..self.alg.ngens()).map(|i| AlgebraElement::gen(&q, i)).collect();
        let h = AlgebraHom::new(&self.alg, &q, images)?;
        Ok((q, h))
    }
}

/// A `Q`-algebra homomorphism between truncated algebras, given on generators.
#[derive(Clone, Debug)]
pub struct AlgebraHom {
    source: Arc<TruncatedAlgebra>,
    target: Arc<TruncatedAlgebra>,
    images: Vec<AlgebraElement>,
    basis_images: Vec<AlgebraElement>,
}

impl AlgebraHom {
    /// Checks every source relation, and every monomial of degree `N`, maps to zero.
    pub fn new(
        source: &Arc<TruncatedAlgebra>,
        target: &Arc<TruncatedAlgebra>,
        images: Vec<AlgebraElement>,
    ) -> Result<Self, AlgError> {
        if images.len() != source.ngens() {
            return Err(AlgError::HomArity { got: images.len(), expected: source.ngens() });
        }
        if images.iter().any(|x| !same(&x.alg, target)) {
            return Err(AlgError::Mismatch);
        }
        let eval = |e: &[u32]| {
            let mut acc = AlgebraElement::one(target);
            for (x, &k) in images.iter().zip(e) {
                acc = &acc * &x.pow(k);
            }
            acc
        };
        let eval_poly = |p: &Poly| {
            let mut acc = AlgebraElement::zero(target);
            for (e, c) in p.terms() {
                acc = &acc + &eval(e).scale(c);
            }
            acc
        };
        for r in source.relations() {
            if !eval_poly(r).is_zero() {
                return Err(AlgError::RelationViolated(r.render(source.generators())));
            }
        }
        let top = graded_monomials(source.ngens(), source.trunc + 1);
        for e in top.iter().filter(|e| e.iter().sum::<u32>() == source.trunc) {
            if !eval(e).is_zero() {
                let m = Poly::monomial(source.ngens(), e.clone(), Q::one());
                return Err(AlgError::RelationViolated(m.render(source.generators())));
            }
        }
        let basis_images = source.basis.iter().map(|&m| eval(&source.monos[m])).collect();
        Ok(AlgebraHom { source: source.clone(), target: target.clone(), images, basis_images })
    }

    pub fn identity(alg: &Arc<TruncatedAlgebra>) -> Self {
        let images = (0..alg.ngens()).map(|i| AlgebraElement::gen(alg, i)).collect();
        Self::new(alg, alg, images).expect("identity respects relations")
    }

    /// Parses generator images written over the target's generator names.
    pub fn parse(
        source: &Arc<TruncatedAlgebra>,
        target: &Arc<TruncatedAlgebra>,
        images: &[&str],
    ) -> Result<Self, AlgError> {
        let imgs = images.iter().map(|t| AlgebraElement::parse(target, t)).collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, imgs)
    }

    pub fn source(&self) -> &Arc<TruncatedAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<TruncatedAlgebra> {
        &self.target
    }

    pub fn images(&self) -> &[AlgebraElement] {
        &self.images
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement, AlgError> {
        if !same(&x.alg, &self.source) {
            return Err(AlgError::Mismatch);
        }
        let mut acc = AlgebraElement::zero(&self.target);
        for (c, img) in x.coords.iter().zip(&self.basis_images) {
            if !c.is_zero() {
                acc = &acc + &img.scale(c);
            }
        }
        Ok(acc)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &AlgebraHom) -> Result<AlgebraHom, AlgError> {
        if !same(&self.target, &next.source) {
            return Err(AlgError::Mismatch);
        }
        let images = self.images.iter().map(|x| next.apply(x)).collect::<Result<Vec<_>, _>>()?;
        AlgebraHom::new(&self.source, &next.target, images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn dimensions() {
        assert_eq!(TruncatedAlgebra::power_series(8).dim(), 8);
        let a = TruncatedAlgebra::parse(&["s", "c"], &["c*s", "c^2"], 4).unwrap();
        // 1, s, s^2, s^3, c
        assert_eq!(a.dim(), 5);
        let b = TruncatedAlgebra::parse(&["s", "c"], &["s", "c^3"], 8).unwrap();
        assert_eq!(b.dim(), 3);
    }

    #[test]
    fn inverse_of_unit() {
        let a = TruncatedAlgebra::parse(&["s", "c"], &["c*s", "c^2"], 4).unwrap();
        let x = AlgebraElement::parse(&a, "2 + s - 3*c + s^2").unwrap();
        let y = x.inverse().unwrap();
        assert_eq!(&x * &y, AlgebraElement::one(&a));
        assert!(AlgebraElement::s(&a).inverse().is_err());
    }

    #[test]
    fn membership_examples() {
        let a = TruncatedAlgebra::power_series(8);
        let s = AlgebraElement::s(&a);
        let i = AlgebraIdeal::new(&a, vec![s.clone()]).unwrap();
        assert!(i.contains(&s.pow(3)).unwrap());
        let z = AlgebraIdeal::zero(&a);
        assert!(!z.contains(&AlgebraElement::one(&a)).unwrap());

        let b = TruncatedAlgebra::parse(&["s", "c"], &["c^2", "s^2", "c*s"], 3).unwrap();
        let i = AlgebraIdeal::new(&b, vec![AlgebraElement::parse(&b, "c - s").unwrap()]).unwrap();
        // c*s is already zero here
        assert!(i.contains(&AlgebraElement::parse(&b, "c*s").unwrap()).unwrap());
        assert!(!i.contains(&AlgebraElement::parse(&b, "c").unwrap()).unwrap());
    }

    #[test]
    fn hom_checks_relations() {
        let a = TruncatedAlgebra::parse(&["s", "c"], &["c^2"], 4).unwrap();
        let t = TruncatedAlgebra::power_series(4);
        assert!(AlgebraHom::parse(&a, &t, &["s", "s^2"]).is_ok());
        assert!(matches!(AlgebraHom::parse(&a, &t, &["s", "1"]), Err(AlgError::RelationViolated(_))));
        // s^4 = 0 in the source must map to zero
        let t8 = TruncatedAlgebra::power_series(8);
        assert!(AlgebraHom::parse(&a, &t8, &["s", "0"]).is_err());
        let h = AlgebraHom::parse(&a, &t, &["s", "s^2"]).unwrap();
        let x = AlgebraElement::parse(&a, "c*s + 1").unwrap();
        assert_eq!(h.apply(&x).unwrap(), AlgebraElement::parse(&t, "1 + s^3").unwrap());
        assert_eq!(h.apply(&AlgebraElement::constant(&a, q(3))).unwrap().constant_term(), q(3));
    }

    #[test]
    fn quotient_by_ideal() {
        let a = TruncatedAlgebra::parse(&["s", "c"], &["c*s", "c^2"], 4).unwrap();
        let i = AlgebraIdeal::new(&a, vec![AlgebraElement::parse(&a, "c").unwrap()]).unwrap();
        let (qa, h) = i.quotient().unwrap();
        assert_eq!(qa.dim(), 4);
        assert!(h.apply(&AlgebraElement::gen(&a, 1)).unwrap().is_zero());
    }
}
