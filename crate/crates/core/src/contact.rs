//! Contact orders, pure contact and the pre-deformability ideal at a node.
//!
//! The data is a homomorphism `k[w1, w2] -> R` into a node ring `R` over a
//! truncated base `A`, given by the images `φ1 = φ(w1)`, `φ2 = φ(w2)`, together
//! with `ψ = φ(t) ∈ A` where `t = w1 w2`.
//!
//! Pure contact of order `n` asks for a unit `β ∈ R` and a unit `ε ∈ A` with
//! `φ1 = β z1^n` and `φ2 = ε β^{-1} z2^n`. Multiplying the second identity by
//! `β` makes both linear in `(β, ε)`, so deciding it is one linear system over
//! `Q` plus the requirement that two constant terms be nonzero.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{
    AlgError, AlgebraElement, AlgebraHom, AlgebraIdeal, AlgebraJson, NodeRing, NodeSeries, NodeSeriesJson, Slot,
    TruncatedAlgebra,
};
use crate::linalg::{LinearSystem, Subspace};
use crate::poly::Poly;
use crate::{q, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("φ(w1)·φ(w2) = {product} is not the constant ψ = {psi}")]
    NotHomomorphism { product: String, psi: String },
    #[error("contact order must be at least 1")]
    ZeroOrder,
    #[error("contact order {n} needs series order above {n}, have {order}")]
    OrderTooLarge { n: usize, order: usize },
    #[error("φ is degenerate: no unit coefficient on the {side} branch")]
    Degenerate { side: &'static str },
    #[error("no unit coefficient on the {side} branch below series order {order}; raise the truncation")]
    TruncationTooSmall { side: &'static str, order: usize },
    #[error("{which} is not a unit, so the elimination does not apply")]
    LeadingNotUnit { which: &'static str },
    #[error("elimination did not converge after {0} rounds")]
    NoConvergence(usize),
    #[error("the trivial smoothing mode cannot come from a flat family")]
    TrivialMode,
    #[error("base is not flat over k[t]: dim A = {dim}, nilpotency of ψ = {length}, dim A/ψA = {fibre}")]
    NotFlat { dim: usize, length: usize, fibre: usize },
    #[error("ψ is not nilpotent within the truncation")]
    PsiNotNilpotent,
    #[error("contact orders differ: {n1} on the left, {n2} on the right")]
    OrderMismatch { n1: usize, n2: usize },
    #[error("internal check failed: {0}")]
    Internal(String),
}

/// How the local parameter of the base pulls back to the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothingMode {
    /// `s = z1 z2`: the node is smoothed along the base.
    Node,
    /// `s` pulls back to a coordinate: the domain is not smoothed.
    Trivial,
}

/// A local homomorphism `φ : k[w1, w2] -> R` over the base `A`.
#[derive(Clone, Debug)]
pub struct ContactData {
    ring: Arc<NodeRing>,
    mode: SmoothingMode,
    psi: AlgebraElement,
    phi1: NodeSeries,
    phi2: NodeSeries,
}

impl ContactData {
    /// Node-mode data; checks that `φ1 φ2` is the constant `ψ`.
    pub fn new(phi1: NodeSeries, phi2: NodeSeries, psi: AlgebraElement) -> Result<Self, ContactError> {
        let ring = phi1.ring().clone();
        let product = phi1.try_mul(&phi2)?;
        let expect = NodeSeries::constant(&ring, psi.clone());
        if product != expect {
            return Err(ContactError::NotHomomorphism { product: product.render(), psi: psi.render() });
        }
        Ok(ContactData { ring, mode: SmoothingMode::Node, psi, phi1, phi2 })
    }

    /// Trivial-mode data. No product constraint is imposed.
    pub fn trivial(phi1: NodeSeries, phi2: NodeSeries, psi: AlgebraElement) -> Result<Self, ContactError> {
        let ring = phi1.ring().clone();
        if phi2.ring().order() != ring.order() {
            return Err(AlgError::Mismatch.into());
        }
        Ok(ContactData { ring, mode: SmoothingMode::Trivial, psi, phi1, phi2 })
    }

    pub fn ring(&self) -> &Arc<NodeRing> {
        &self.ring
    }

    pub fn algebra(&self) -> &Arc<TruncatedAlgebra> {
        self.ring.algebra()
    }

    pub fn mode(&self) -> SmoothingMode {
        self.mode
    }

    pub fn psi(&self) -> &AlgebraElement {
        &self.psi
    }

    pub fn phi1(&self) -> &NodeSeries {
        &self.phi1
    }

    pub fn phi2(&self) -> &NodeSeries {
        &self.phi2
    }

    /// Pushes the data forward along `h : A -> T`.
    pub fn map(&self, h: &AlgebraHom) -> Result<ContactData, ContactError> {
        let target = NodeRing::new(h.target(), self.ring.order())?;
        let phi1 = self.phi1.map(h, &target)?;
        let phi2 = self.phi2.map(h, &target)?;
        let psi = h.apply(&self.psi)?;
        Ok(ContactData { ring: target, mode: self.mode, psi, phi1, phi2 })
    }

    /// Exchanges `z1 <-> z2` and `w1 <-> w2` together.
    pub fn swap(&self) -> ContactData {
        ContactData {
            ring: self.ring.clone(),
            mode: self.mode,
            psi: self.psi.clone(),
            phi1: self.phi2.swap(),
            phi2: self.phi1.swap(),
        }
    }

    pub fn to_json(&self) -> ContactDataJson {
        ContactDataJson {
            algebra: self.algebra().to_json(),
            order: self.ring.order(),
            mode: self.mode,
            psi: self.psi.render(),
            phi1: self.phi1.to_json(),
            phi2: self.phi2.to_json(),
        }
    }
}

fn default_mode() -> SmoothingMode {
    SmoothingMode::Node
}

/// JSON form of [`ContactData`]; `order` is the series order `M`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ContactDataJson {
    pub algebra: AlgebraJson,
    pub order: usize,
    #[serde(default = "default_mode")]
    pub mode: SmoothingMode,
    pub psi: String,
    pub phi1: NodeSeriesJson,
    pub phi2: NodeSeriesJson,
}

impl ContactDataJson {
    pub fn build(&self) -> Result<ContactData, ContactError> {
        let alg = self.algebra.build()?;
        let ring = NodeRing::new(&alg, self.order)?;
        let phi1 = self.phi1.build(&ring)?;
        let phi2 = self.phi2.build(&ring)?;
        let psi = AlgebraElement::parse(&alg, &self.psi)?;
        match self.mode {
            SmoothingMode::Node => ContactData::new(phi1, phi2, psi),
            SmoothingMode::Trivial => ContactData::trivial(phi1, phi2, psi),
        }
    }
}

/// Least `i >= 1` whose coefficient has a nonzero constant term.
fn first_unit(tail: &[AlgebraElement]) -> Option<usize> {
    tail.iter().position(AlgebraElement::is_unit).map(|p| p + 1)
}

/// The orders `(n1, n2)`: first unit coefficient of `φ1` along `z1` and of
/// `φ2` along `z2`.
pub fn contact_orders(d: &ContactData) -> Result<(usize, usize), ContactError> {
    let n1 = first_unit(d.phi1.z1_tail());
    let n2 = first_unit(d.phi2.z2_tail());
    match (n1, n2) {
        (Some(a), Some(b)) => Ok((a, b)),
        (a, _) => {
            let side = if a.is_none() { "z1" } else { "z2" };
            if nondegeneracy_exponent(d).is_none() {
                Err(ContactError::Degenerate { side })
            } else {
                Err(ContactError::TruncationTooSmall { side, order: d.ring.order() })
            }
        }
    }
}

fn unit_vec(len: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); len];
    v[i] = Q::one();
    v
}

/// `Q`-basis of the node ring: every slot times every basis monomial of `A`.
fn ring_basis(ring: &Arc<NodeRing>) -> Vec<NodeSeries> {
    let alg = ring.algebra();
    let dim = alg.dim();
    let mut out = Vec::with_capacity(ring.vector_len());
    for slot in ring.slots() {
        for b in 0..dim {
            let a = AlgebraElement::from_coords(alg, unit_vec(dim, b)).expect("length");
            out.push(NodeSeries::monomial(ring, slot, a));
        }
    }
    out
}

/// The ideal `(φ1, φ2)` of the node ring as a `Q`-subspace.
fn image_ideal(d: &ContactData) -> Subspace {
    let basis = ring_basis(&d.ring);
    let mut space = Subspace::new(d.ring.vector_len());
    for phi in [&d.phi1, &d.phi2] {
        for e in &basis {
            space.insert(phi.try_mul(e).expect("same ring").to_vector());
        }
    }
    space
}

/// Least `m < M` with `(z1, z2)^m ⊆ (φ1, φ2) ⊆ (z1, z2)`, if any.
///
/// `m = M` is excluded: `z1^M = z2^M = 0` in the truncated ring, so the
/// first inclusion would hold there for nearly any data.
pub fn nondegeneracy_exponent(d: &ContactData) -> Option<usize> {
    let alg = d.algebra();
    let s_ideal = AlgebraIdeal::new(alg, vec![AlgebraElement::s(alg)]).expect("same algebra");
    // (z1, z2) consists of the series whose constant coefficient lies in (s)
    for phi in [&d.phi1, &d.phi2] {
        if !s_ideal.contains(phi.a0()).expect("same algebra") {
            return None;
        }
    }
    let ideal = image_ideal(d);
    let one = AlgebraElement::one(alg);
    let m_max = d.ring.order();
    (1..m_max).find(|&m| {
        (0..=m).all(|i| {
            let x = crate::exactalg::normal_form(&d.ring, &[(i as u32, (m - i) as u32, one.clone())]).expect("degree");
            ideal.contains(&x.to_vector())
        })
    })
}

pub fn is_nondegenerate(d: &ContactData) -> bool {
    nondegeneracy_exponent(d).is_some()
}

/// Which pairing of branches realized pure contact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `φ1 = β z1^n`, `φ2 = ε β^{-1} z2^n`.
    Standard,
    /// `φ1 = β z2^n`, `φ2 = ε β^{-1} z1^n`.
    Swapped,
}

/// Why pure contact fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A coefficient equation with no solution, given the earlier ones.
    Equation { identity: String, slot: String, monomial: String },
    /// The linear system is solvable, but a unit requirement cannot be met.
    NotUnit { which: String },
}

/// Outcome of [`check_pure_contact`].
#[derive(Clone, Debug)]
pub struct ContactReport {
    pub n: usize,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub pure: bool,
    pub orientation: Option<Orientation>,
    pub beta: Option<NodeSeries>,
    pub epsilon: Option<AlgebraElement>,
    /// Certificate for the standard orientation when not pure.
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactReportJson {
    pub pure: bool,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl ContactReport {
    pub fn to_json(&self) -> ContactReportJson {
        ContactReportJson {
            pure: self.pure,
            n: self.n,
            n1: self.n1,
            n2: self.n2,
            orientation: self.orientation,
            beta: self.beta.as_ref().map(NodeSeries::render),
            epsilon: self.epsilon.as_ref().map(AlgebraElement::render),
            certificate: self.certificate.clone(),
        }
    }
}

fn slot_name(slot: Slot) -> String {
    match slot {
        Slot::Const => "1".into(),
        Slot::Z1(k) => format!("z1^{k}"),
        Slot::Z2(k) => format!("z2^{k}"),
    }
}

fn check_n(ring: &NodeRing, n: usize) -> Result<(), ContactError> {
    if n == 0 {
        return Err(ContactError::ZeroOrder);
    }
    if n >= ring.order() {
        return Err(ContactError::OrderTooLarge { n, order: ring.order() });
    }
    Ok(())
}

/// Solves `φ1 = β z1^n`, `φ2 β = ε z2^n` (and `s^n ε = ψ` when `with_psi`)
/// with `β`, `ε` units.
fn solve_standard(
    d: &ContactData,
    n: usize,
    with_psi: bool,
) -> Result<Result<(NodeSeries, AlgebraElement), Certificate>, ContactError> {
    let ring = &d.ring;
    let alg = ring.algebra();
    let dim = alg.dim();
    let len = ring.vector_len();
    let nunk = len + dim;
    let basis = ring_basis(ring);
    let z1n = NodeSeries::z1(ring).pow(n as u32);
    let z2n = NodeSeries::z2(ring).pow(n as u32);
    let col1: Vec<Vec<Q>> = basis.iter().map(|e| e.try_mul(&z1n).expect("same ring").to_vector()).collect();
    let col2: Vec<Vec<Q>> = basis.iter().map(|e| d.phi2.try_mul(e).expect("same ring").to_vector()).collect();
    let alg_basis: Vec<AlgebraElement> =
        (0..dim).map(|b| AlgebraElement::from_coords(alg, unit_vec(dim, b)).expect("length")).collect();
    let col_eps: Vec<Vec<Q>> = alg_basis.iter().map(|a| z2n.scale(a).to_vector()).collect();
    let target1 = d.phi1.to_vector();

    let slots = ring.slots();
    let monos = alg.basis_monomials();
    let describe = |eq: usize| -> Certificate {
        let names = alg.generators();
        let mono = |b: usize| Poly::monomial(alg.ngens(), monos[b].clone(), Q::one()).render(names);
        if eq < 2 * len {
            let (identity, k) =
                if eq < len { ("phi(w1) = beta*z1^n", eq) } else { ("phi(w2)*beta = eps*z2^n", eq - len) };
            Certificate::Equation {
                identity: identity.into(),
                slot: slot_name(slots[k / dim]),
                monomial: mono(k % dim),
            }
        } else {
            Certificate::Equation { identity: "psi = s^n*eps".into(), slot: "1".into(), monomial: mono(eq - 2 * len) }
        }
    };

    let mut sys = LinearSystem::new(nunk);
    let mut row = vec![Q::zero(); nunk];
    for k in 0..len {
        for (j, c) in col1.iter().enumerate() {
            row[j] = c[k].clone();
        }
        for x in row[len..].iter_mut() {
            *x = Q::zero();
        }
        if let Err(e) = sys.add_equation(&row, target1[k].clone()) {
            return Ok(Err(describe(e.equation)));
        }
    }
    for k in 0..len {
        for (j, c) in col2.iter().enumerate() {
            row[j] = c[k].clone();
        }
        for (b, c) in col_eps.iter().enumerate() {
            row[len + b] = -c[k].clone();
        }
        if let Err(e) = sys.add_equation(&row, Q::zero()) {
            return Ok(Err(describe(e.equation)));
        }
    }
    if with_psi {
        let sn = ring.s_pow(n);
        let cols: Vec<Vec<Q>> = alg_basis.iter().map(|a| (a * &sn).coords().to_vec()).collect();
        for k in 0..dim {
            for x in row[..len].iter_mut() {
                *x = Q::zero();
            }
            for (b, c) in cols.iter().enumerate() {
                row[len + b] = c[k].clone();
            }
            if let Err(e) = sys.add_equation(&row, d.psi.coords()[k].clone()) {
                return Ok(Err(describe(e.equation)));
            }
        }
    }

    // constant terms of β and ε as affine functions on the solution space
    let (ib, ie) = (0, len);
    let p = sys.particular();
    let kernel = sys.kernel();
    let jb = kernel.iter().position(|v| !v[ib].is_zero());
    let je = kernel.iter().position(|v| !v[ie].is_zero());
    if p[ib].is_zero() && jb.is_none() {
        return Ok(Err(Certificate::NotUnit { which: "beta".into() }));
    }
    if p[ie].is_zero() && je.is_none() {
        return Ok(Err(Certificate::NotUnit { which: "epsilon".into() }));
    }
    let mut x = None;
    'search: for a in 0..4i64 {
        for b in 0..4i64 {
            let mut cand = p.clone();
            for (j, t) in [(jb, a), (je, b)] {
                if let (Some(j), true) = (j, t != 0) {
                    for (c, k) in cand.iter_mut().zip(&kernel[j]) {
                        *c += k * q(t);
                    }
                }
            }
            if !cand[ib].is_zero() && !cand[ie].is_zero() {
                x = Some(cand);
                break 'search;
            }
        }
    }
    let x = x.ok_or_else(|| ContactError::Internal("no unit point found on a 4x4 grid".into()))?;
    let beta = NodeSeries::from_vector(ring, &x[..len])?;
    let eps = AlgebraElement::from_coords(alg, x[len..].to_vec())?;
    // re-verify by direct multiplication
    if beta.try_mul(&z1n)? != d.phi1 || d.phi2.try_mul(&beta)? != z2n.scale(&eps) {
        return Err(ContactError::Internal("pure-contact witness does not re-verify".into()));
    }
    Ok(Ok((beta, eps)))
}

/// Pure contact in one fixed orientation.
pub fn check_pure_contact_oriented(
    d: &ContactData,
    n: usize,
    orientation: Orientation,
) -> Result<ContactReport, ContactError> {
    check_n(&d.ring, n)?;
    let (n1, n2) = contact_orders(d).map_or((None, None), |(a, b)| (Some(a), Some(b)));
    let work = match orientation {
        Orientation::Standard => d.clone(),
        Orientation::Swapped => ContactData { phi1: d.phi1.swap(), phi2: d.phi2.swap(), ..d.clone() },
    };
    let mut report = ContactReport { n, n1, n2, pure: false, orientation: None, beta: None, epsilon: None, certificate: None };
    match solve_standard(&work, n, false)? {
        Ok((beta, eps)) => {
            report.pure = true;
            report.orientation = Some(orientation);
            report.beta = Some(match orientation {
                Orientation::Standard => beta,
                Orientation::Swapped => beta.swap(),
            });
            report.epsilon = Some(eps);
        }
        Err(cert) => report.certificate = Some(cert),
    }
    Ok(report)
}

/// Decides pure `n`-contact, trying the standard orientation first and then
/// the one with `z1`, `z2` exchanged.
pub fn check_pure_contact(d: &ContactData, n: usize) -> Result<ContactReport, ContactError> {
    let standard = check_pure_contact_oriented(d, n, Orientation::Standard)?;
    if standard.pure {
        return Ok(standard);
    }
    let swapped = check_pure_contact_oriented(d, n, Orientation::Swapped)?;
    if swapped.pure {
        return Ok(swapped);
    }
    Ok(standard)
}

/// Result of the elimination: the canonical `β`, `ε` and the ideal they leave.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub beta: NodeSeries,
    pub epsilon: AlgebraElement,
    pub ideal: AlgebraIdeal,
    pub rounds: usize,
}

/// Runs the elimination for pure `n`-contact in the standard orientation.
///
/// With `ζ = a_{1,n}` and `ξ_k = a_{1,n+k}/ζ`, the ansatz
/// `β = ζ(1 + Σ ξ_k z1^k + Σ η_k z2^k)` makes every `z1^{n+k}` coefficient of
/// `φ1 - β z1^n` vanish. The `z2^{n+k}` coefficients of `φ2 β - ε z2^n` are
/// `ζ b_{2,n} η_k` (or `-ε` for `k = 0`) plus terms that are nilpotent or
/// involve other unknowns with nilpotent coefficients, so `η` and `ε` are found
/// by iterating until those coefficients vanish. The ideal is generated by
/// every remaining coefficient of both residuals.
pub fn eliminate(d: &ContactData, n: usize) -> Result<Elimination, ContactError> {
    check_n(&d.ring, n)?;
    let ring = &d.ring;
    let alg = ring.algebra();
    let m = ring.order();
    let zeta = d.phi1.coeff(Slot::Z1(n));
    if !zeta.is_unit() {
        return Err(ContactError::LeadingNotUnit { which: "a_{1,n}" });
    }
    let lead2 = d.phi2.coeff(Slot::Z2(n));
    if !lead2.is_unit() {
        return Err(ContactError::LeadingNotUnit { which: "b_{2,n}" });
    }
    let zinv = zeta.inverse()?;
    let pivot_inv = (&zeta * &lead2).inverse()?;
    let zero = AlgebraElement::zero(alg);
    let xi: Vec<AlgebraElement> =
        (1..m).map(|k| if n + k < m { &d.phi1.coeff(Slot::Z1(n + k)) * &zinv } else { zero.clone() }).collect();
    let mut eta = vec![zero.clone(); m - 1];
    let mut eps = &zeta * &lead2;
    let z1n = NodeSeries::z1(ring).pow(n as u32);
    let z2n = NodeSeries::z2(ring).pow(n as u32);
    let build = |eta: &[AlgebraElement]| -> Result<NodeSeries, AlgError> {
        let unit = NodeSeries::from_parts(ring, AlgebraElement::one(alg), xi.clone(), eta.to_vec())?;
        Ok(unit.scale(&zeta))
    };
    let cap = 4 * (m + alg.truncation() as usize) + 10;
    let mut rounds = 0;
    let beta = loop {
        let beta = build(&eta)?;
        let r2 = &d.phi2.try_mul(&beta)? - &z2n.scale(&eps);
        let resid: Vec<AlgebraElement> = (0..m - n).map(|k| r2.coeff(Slot::Z2(n + k))).collect();
        if resid.iter().all(AlgebraElement::is_zero) {
            break beta;
        }
        rounds += 1;
        if rounds > cap {
            return Err(ContactError::NoConvergence(cap));
        }
        eps = &eps + &resid[0];
        for k in 1..m - n {
            eta[k - 1] = &eta[k - 1] - &(&resid[k] * &pivot_inv);
        }
    };
    let (beta, eps) = absorb_residual(d, &z1n, &z2n, beta, eps)?;
    let r1 = &d.phi1 - &beta.try_mul(&z1n)?;
    let r2 = &d.phi2.try_mul(&beta)? - &z2n.scale(&eps);
    let mut gens = Vec::new();
    for r in [&r1, &r2] {
        for slot in ring.slots() {
            let c = r.coeff(slot);
            if !c.is_zero() {
                gens.push(c);
            }
        }
    }
    let ideal = AlgebraIdeal::new(alg, gens)?;
    Ok(Elimination { beta, epsilon: eps, ideal, rounds })
}

/// In the truncated ring the equations do not pin down `β` and `ε`, and the
/// iteration can land on a solution of the second equation that leaves a
/// residual an equally valid choice would not. Corrections with nilpotent
/// constant terms keep both units; when some correction clears the whole
/// residual it is applied, otherwise the iterate is kept.
fn absorb_residual(
    d: &ContactData,
    z1n: &NodeSeries,
    z2n: &NodeSeries,
    beta: NodeSeries,
    eps: AlgebraElement,
) -> Result<(NodeSeries, AlgebraElement), ContactError> {
    let ring = &d.ring;
    let r1 = &d.phi1 - &beta.try_mul(z1n)?;
    let r2 = &d.phi2.try_mul(&beta)? - &z2n.scale(&eps);
    if r1.is_zero() && r2.is_zero() {
        return Ok((beta, eps));
    }
    let alg = ring.algebra();
    let dim = alg.dim();
    let len = ring.vector_len();
    let nunk = len + dim;
    let one = alg
        .basis_monomials()
        .iter()
        .position(|e| e.iter().all(|&x| x == 0))
        .ok_or_else(|| ContactError::Internal("algebra has no constant monomial".into()))?;
    // coordinates: correction first, its effect on the residual last, so
    // pivots land on the residual part whenever it is nonzero
    let mut space = Subspace::new(nunk + 2 * len);
    for (j, e) in ring_basis(ring).iter().enumerate() {
        if j == one {
            continue;
        }
        let mut v = unit_vec(nunk, j);
        v.extend(e.try_mul(z1n)?.to_vector());
        v.extend((-&d.phi2.try_mul(e)?).to_vector());
        space.insert(v);
    }
    for b in (0..dim).filter(|&b| b != one) {
        let e = AlgebraElement::from_coords(alg, unit_vec(dim, b))?;
        let mut v = unit_vec(nunk, len + b);
        v.extend(vec![Q::zero(); len]);
        v.extend(z2n.scale(&e).to_vector());
        space.insert(v);
    }
    let mut target = vec![Q::zero(); nunk];
    target.extend(r1.to_vector());
    target.extend(r2.to_vector());
    let red = space.reduce(&target);
    if red[nunk..].iter().any(|x| !x.is_zero()) {
        return Ok((beta, eps));
    }
    let db: Vec<Q> = red[..len].iter().map(|x| -x.clone()).collect();
    let de: Vec<Q> = red[len..nunk].iter().map(|x| -x.clone()).collect();
    let beta = &beta + &NodeSeries::from_vector(ring, &db)?;
    let eps = &eps + &AlgebraElement::from_coords(alg, de)?;
    Ok((beta, eps))
}

/// The ideal `I_A`: pure `n`-contact holds after `A -> T` exactly when `T`
/// kills `I_A`.
pub fn predeformability_ideal(d: &ContactData, n: usize) -> Result<AlgebraIdeal, ContactError> {
    Ok(eliminate(d, n)?.ideal)
}

/// Sum of per-node ideals over a shared base.
pub fn combined_ideal(nodes: &[(ContactData, usize)]) -> Result<AlgebraIdeal, ContactError> {
    let Some((first, _)) = nodes.first() else {
        return Err(ContactError::Internal("no nodes given".into()));
    };
    let mut acc = AlgebraIdeal::zero(first.algebra());
    for (d, n) in nodes {
        acc = acc.sum(&predeformability_ideal(d, *n)?)?;
    }
    Ok(acc)
}

/// One row of a universality run.
#[derive(Clone, Debug, Serialize)]
pub struct UniversalityCase {
    pub target: String,
    pub images: Vec<String>,
    pub pure: bool,
    pub kills_ideal: bool,
}

impl UniversalityCase {
    pub fn agrees(&self) -> bool {
        self.pure == self.kills_ideal
    }
}

/// For each `h`, compares pure `n`-contact (standard orientation) of the
/// pushed-forward data with `h(I_A) = 0`.
pub fn universality_cases(
    d: &ContactData,
    n: usize,
    homs: &[AlgebraHom],
) -> Result<Vec<UniversalityCase>, ContactError> {
    let ideal = predeformability_ideal(d, n)?;
    let mut out = Vec::with_capacity(homs.len());
    for h in homs {
        let image = d.map(h)?;
        let pure = check_pure_contact_oriented(&image, n, Orientation::Standard)?.pure;
        let mut kills = true;
        for g in ideal.generators() {
            if !h.apply(g)?.is_zero() {
                kills = false;
                break;
            }
        }
        out.push(UniversalityCase {
            target: describe_algebra(h.target()),
            images: h.images().iter().map(AlgebraElement::render).collect(),
            pure,
            kills_ideal: kills,
        });
    }
    Ok(out)
}

pub fn verify_universality(d: &ContactData, n: usize, homs: &[AlgebraHom]) -> Result<bool, ContactError> {
    Ok(universality_cases(d, n, homs)?.iter().all(UniversalityCase::agrees))
}

/// Compares `I_{A'}` computed on the pushed-forward data with `h(I_A) A'`.
pub fn verify_base_change(d: &ContactData, n: usize, h: &AlgebraHom) -> Result<bool, ContactError> {
    let direct = predeformability_ideal(&d.map(h)?, n)?;
    let extended = predeformability_ideal(d, n)?.extend(h)?;
    Ok(direct.same_as(&extended))
}

fn describe_algebra(a: &TruncatedAlgebra) -> String {
    let rels: Vec<String> = a.relations().iter().map(|r| r.render(a.generators())).collect();
    format!("Q[{}]/({}; deg {})", a.generators().join(","), rels.join(", "), a.truncation())
}

/// The small test algebras, each with `s` as first generator:
/// `Q`, `Q[s]/(s^2)`, dual numbers `Q[e]/(e^2)` over `s = 0`, `Q[s]/(s^4)`,
/// and `Q[s, c]/(cs, c^2)` truncated in degree 3.
pub fn standard_test_algebras() -> Vec<Arc<TruncatedAlgebra>> {
    vec![
        TruncatedAlgebra::power_series(1),
        TruncatedAlgebra::power_series(2),
        TruncatedAlgebra::parse(&["s", "e"], &["s", "e^2"], 3).expect("valid"),
        TruncatedAlgebra::power_series(4),
        TruncatedAlgebra::parse(&["s", "c"], &["c*s", "c^2"], 3).expect("valid"),
    ]
}

/// Every homomorphism from `source` into the standard test algebras that
/// sends `s` to `s` and each other generator to a combination of the target's
/// maximal-ideal basis with coefficients in `{-1, 0, 1}`.
pub fn standard_test_homs(source: &Arc<TruncatedAlgebra>) -> Vec<AlgebraHom> {
    let mut out = Vec::new();
    for target in standard_test_algebras() {
        let dim = target.dim();
        // basis index 0 is the monomial 1; the rest span the maximal ideal
        let maximal: Vec<AlgebraElement> =
            (1..dim).map(|b| AlgebraElement::from_coords(&target, unit_vec(dim, b)).expect("length")).collect();
        let mut choices = vec![AlgebraElement::zero(&target)];
        let k = maximal.len();
        let total = 3usize.pow(k as u32);
        for code in 1..total {
            let mut x = AlgebraElement::zero(&target);
            let mut c = code;
            for m in &maximal {
                let digit = (c % 3) as i64 - 1;
                c /= 3;
                x = &x + &m.scale(&q(digit));
            }
            choices.push(x);
        }
        let extra = source.ngens() - 1;
        let mut idx = vec![0usize; extra];
        loop {
            let mut images = vec![AlgebraElement::s(&target)];
            images.extend(idx.iter().map(|&i| choices[i].clone()));
            if let Ok(h) = AlgebraHom::new(source, &target, images) {
                out.push(h);
            }
            // odometer
            let mut pos = 0;
            while pos < extra {
                idx[pos] += 1;
                if idx[pos] < choices.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == extra {
                break;
            }
        }
    }
    out
}

/// Witnesses of flat local forcing.
#[derive(Clone, Debug)]
pub struct ForcingReport {
    pub n: usize,
    pub beta1: NodeSeries,
    pub beta2: NodeSeries,
    pub epsilon: AlgebraElement,
    /// Nilpotency index `L` of `ψ`; `A` is free over `k[t]/(t^L)`.
    pub length: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForcingReportJson {
    pub n: usize,
    pub beta1: String,
    pub beta2: String,
    pub epsilon: String,
    pub length: usize,
}

impl ForcingReport {
    pub fn to_json(&self) -> ForcingReportJson {
        ForcingReportJson {
            n: self.n,
            beta1: self.beta1.render(),
            beta2: self.beta2.render(),
            epsilon: self.epsilon.render(),
            length: self.length,
        }
    }
}

/// Checks that `A` is free over `k[t]/(t^L)` with `t -> ψ`, returning `L`.
pub fn flatness_length(d: &ContactData) -> Result<usize, ContactError> {
    let alg = d.algebra();
    let dim = alg.dim();
    let mut power = AlgebraElement::one(alg);
    let mut length = 0;
    while !power.is_zero() {
        length += 1;
        if length > dim {
            return Err(ContactError::PsiNotNilpotent);
        }
        power = &power * &d.psi;
    }
    let fibre = dim - AlgebraIdeal::new(alg, vec![d.psi.clone()])?.rank();
    if length * fibre != dim {
        return Err(ContactError::NotFlat { dim, length, fibre });
    }
    Ok(length)
}

/// For flat data in node mode: equal orders `n`, `φ(w_i) = z_i^n β_i`,
/// `β1 β2 = ε` and `ψ = s^n ε`.
pub fn flat_local_forcing(d: &ContactData) -> Result<ForcingReport, ContactError> {
    if d.mode == SmoothingMode::Trivial {
        return Err(ContactError::TrivialMode);
    }
    let length = flatness_length(d)?;
    let (n1, n2) = contact_orders(d)?;
    if n1 != n2 {
        return Err(ContactError::OrderMismatch { n1, n2 });
    }
    let n = n1;
    check_n(&d.ring, n)?;
    let (beta, eps) = match solve_standard(d, n, true)? {
        Ok(w) => w,
        Err(cert) => return Err(ContactError::Internal(format!("flat data without pure contact: {cert:?}"))),
    };
    let beta2 = beta.inverse()?.scale(&eps);
    let z1n = NodeSeries::z1(&d.ring).pow(n as u32);
    let z2n = NodeSeries::z2(&d.ring).pow(n as u32);
    let ok = z1n.try_mul(&beta)? == d.phi1
        && z2n.try_mul(&beta2)? == d.phi2
        && beta.try_mul(&beta2)? == NodeSeries::constant(&d.ring, eps.clone())
        && &d.ring.s_pow(n) * &eps == d.psi;
    if !ok {
        return Err(ContactError::Internal("forcing witnesses do not re-verify".into()));
    }
    Ok(ForcingReport { n, beta1: beta, beta2, epsilon: eps, length })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(alg: &Arc<TruncatedAlgebra>, m: usize, p1: &str, p2: &str, psi: &str) -> ContactData {
        let ring = NodeRing::new(alg, m).unwrap();
        let phi1 = NodeSeries::parse(&ring, p1).unwrap();
        let phi2 = NodeSeries::parse(&ring, p2).unwrap();
        ContactData::new(phi1, phi2, AlgebraElement::parse(alg, psi).unwrap()).unwrap()
    }

    #[test]
    fn simple_orders() {
        let a = TruncatedAlgebra::power_series(4);
        assert_eq!(contact_orders(&data(&a, 6, "z1", "z2", "s")).unwrap(), (1, 1));
        assert_eq!(contact_orders(&data(&a, 6, "2*z1^3", "z2^3/2", "s^3")).unwrap(), (3, 3));
        let c = TruncatedAlgebra::parse(&["s", "c"], &["c*s", "c^2"], 4).unwrap();
        assert_eq!(contact_orders(&data(&c, 6, "z1^2 + c*z1", "z2^2", "s^2")).unwrap(), (2, 2));
    }

    #[test]
    fn product_constraint() {
        let a = TruncatedAlgebra::power_series(4);
        let ring = NodeRing::new(&a, 4).unwrap();
        let bad = ContactData::new(NodeSeries::z1(&ring), NodeSeries::z1(&ring), AlgebraElement::s(&a));
        assert!(matches!(bad, Err(ContactError::NotHomomorphism { .. })));
    }

    #[test]
    fn nondegeneracy_exponents() {
        let a = TruncatedAlgebra::power_series(4);
        assert_eq!(nondegeneracy_exponent(&data(&a, 6, "z1", "z2", "s")), Some(1));
        assert_eq!(nondegeneracy_exponent(&data(&a, 6, "z1^2", "z2^2", "s^2")), Some(3));
        let ring = NodeRing::new(&a, 6).unwrap();
        let d = ContactData::trivial(NodeSeries::zero(&ring), NodeSeries::z2(&ring), AlgebraElement::zero(&a)).unwrap();
        assert!(!is_nondegenerate(&d));
    }

    #[test]
    fn pure_examples() {
        let a = TruncatedAlgebra::power_series(4);
        let d = data(&a, 6, "z1", "z2", "s");
        let r = check_pure_contact(&d, 1).unwrap();
        assert!(r.pure);
        assert_eq!(r.beta.unwrap().render(), "1");
        assert_eq!(r.epsilon.unwrap().render(), "1");
        let r = check_pure_contact(&d, 2).unwrap();
        assert!(!r.pure);
        match r.certificate.unwrap() {
            Certificate::Equation { identity, slot, .. } => {
                assert_eq!(identity, "phi(w1) = beta*z1^n");
                assert_eq!(slot, "z1^1");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(check_pure_contact(&d, 6), Err(ContactError::OrderTooLarge { .. })));
    }

    #[test]
    fn pure_with_s_zero() {
        let a = TruncatedAlgebra::parse(&["s", "c"], &["s", "c^3"], 4).unwrap();
        let d = data(&a, 5, "z1", "z2 + c*z2^2", "0");
        let r = check_pure_contact(&d, 1).unwrap();
        assert!(r.pure);
        let beta = r.beta.unwrap();
        let ring = d.ring();
        assert_eq!(&NodeSeries::z1(ring) * &beta, *d.phi1());
        let eps = r.epsilon.unwrap();
        assert_eq!(&(d.phi2() * &beta), &NodeSeries::z2(ring).scale(&eps));
    }

    #[test]
    fn swapped_orientation() {
        let a = TruncatedAlgebra::power_series(4);
        let d = data(&a, 6, "z2", "z1", "s");
        let r = check_pure_contact(&d, 1).unwrap();
        assert!(r.pure);
        assert_eq!(r.orientation, Some(Orientation::Swapped));
    }

    #[test]
    fn ideal_trivial_cases() {
        let a = TruncatedAlgebra::power_series(4);
        let d = data(&a, 6, "z1", "z2", "s");
        assert!(predeformability_ideal(&d, 1).unwrap().is_zero());
        assert!(matches!(predeformability_ideal(&d, 2), Err(ContactError::LeadingNotUnit { .. })));
    }

    #[test]
    fn forcing_examples() {
        let a = TruncatedAlgebra::power_series(8);
        let r = flat_local_forcing(&data(&a, 8, "z1", "z2", "s")).unwrap();
        assert_eq!((r.n, r.beta1.render(), r.beta2.render(), r.epsilon.render()), (1, "1".into(), "1".into(), "1".into()));
        let r = flat_local_forcing(&data(&a, 8, "2*z1^2", "3*z2^2", "6*s^2")).unwrap();
        assert_eq!((r.n, r.beta1.render(), r.beta2.render(), r.epsilon.render()), (2, "2".into(), "3".into(), "6".into()));
        let r = flat_local_forcing(&data(&a, 8, "z1*(1+s)", "z2", "s*(1+s)")).unwrap();
        assert_eq!(r.epsilon, AlgebraElement::parse(&a, "1+s").unwrap());
        assert_eq!(r.beta2, NodeSeries::one(r.beta2.ring()));
        // s^3 against s^8: not free over k[t]/(t^3)
        assert!(matches!(flat_local_forcing(&data(&a, 8, "z1^3", "z2^3", "s^3")), Err(ContactError::NotFlat { .. })));
    }
}
