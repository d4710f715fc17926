//! The one-dimensional local model `Γ[n]` and the maps around it.
//!
//! `Γ[n]` is covered by charts `U_1..U_{n+1}`, each a copy of `A^{n+2}` with
//! coordinates `u1..u{n+2}`. Everything here is a [`RationalMap`]; the
//! `verify_*` functions check the identities relating charts, projections and
//! torus actions exactly, by comparing rational functions.
//!
//! Torus parameters are named `sig1..sig{n}`; `sig0 = sig{n+1} = 1` and
//! `sigbar_i = sig_i / sig_{i-1}`.

use serde::Serialize;
use thiserror::Error;

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::ratmaps::{numbered, Fraction, RationalMap};
use crate::{q, Q};

/// Largest `n` accepted by [`gamma_atlas`].
pub const MAX_N: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalError {
    #[error("n = {0} exceeds the supported bound {MAX_N}")]
    TooLarge(usize),
    #[error("index set {0:?} is not a nonempty increasing subset of [1..{1}]")]
    BadSubset(Vec<usize>, usize),
    #[error("index {l} out of range 1..={max}")]
    BadIndex { l: usize, max: usize },
    #[error("n must be at least 1 here")]
    ZeroN,
}

/// One named identity and whether it holds.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// For failures: a nonzero numerator of `lhs - rhs`, or a reason.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// A list of checks; passes when every entry passes.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    fn push(&mut self, name: impl Into<String>, pass: bool, witness: Option<String>) {
        self.checks.push(Check { name: name.into(), pass, witness });
    }

    fn compare(&mut self, name: impl Into<String>, lhs: &RationalMap, rhs: &RationalMap) {
        let witness = difference_witness(lhs, rhs);
        self.push(name, witness.is_none(), witness);
    }
}

fn difference_witness(lhs: &RationalMap, rhs: &RationalMap) -> Option<String> {
    if lhs.target_arity() != rhs.target_arity() || lhs.source_arity() != rhs.source_arity() {
        return Some("arity mismatch".into());
    }
    for (k, (a, b)) in lhs.components().iter().zip(rhs.components()).enumerate() {
        let d = &(a.num() * b.den()) - &(b.num() * a.den());
        if !d.is_zero() {
            return Some(format!("component {}: {}", k + 1, d.render(lhs.vars())));
        }
    }
    None
}

/// Laurent monomial `prod x_i^e_i` as a fraction.
pub fn laurent(nvars: usize, exps: &[i32]) -> Fraction {
    let mut num = vec![0u32; nvars];
    let mut den = vec![0u32; nvars];
    for (i, &e) in exps.iter().enumerate() {
        if e > 0 {
            num[i] = e as u32;
        } else {
            den[i] = (-e) as u32;
        }
    }
    Fraction::new(Poly::monomial(nvars, num, Q::one()), Poly::monomial(nvars, den, Q::one())).expect("monomial")
}

/// Exponent of variable `var` in a Laurent monomial fraction.
fn laurent_exponent(f: &Fraction, var: usize) -> Option<i64> {
    if f.num().num_terms() != 1 || f.den().num_terms() != 1 {
        return None;
    }
    Some(f.num().degree_in(var) as i64 - f.den().degree_in(var) as i64)
}

/// Exponent vector of `sigbar_i` (1-based `i` in `1..=n+1`) over `sig1..sig{n}`.
pub fn sigbar(n: usize, i: usize) -> Vec<i32> {
    let mut e = vec![0; n];
    if i >= 1 && i <= n {
        e[i - 1] += 1;
    }
    if i >= 2 && i - 1 <= n {
        e[i - 2] -= 1;
    }
    e
}

fn sig(n: usize, i: usize) -> Vec<i32> {
    let mut e = vec![0; n];
    if i >= 1 && i <= n {
        e[i - 1] = 1;
    }
    e
}

fn neg(e: &[i32]) -> Vec<i32> {
    e.iter().map(|x| -x).collect()
}

/// `coord * prod sig^e` in a ring whose variables are `nplain` coordinates
/// followed by `ntorus` torus parameters.
fn scaled(nplain: usize, coord: usize, torus: &[i32]) -> Fraction {
    let mut e = vec![0; nplain];
    e[coord] = 1;
    e.extend_from_slice(torus);
    laurent(nplain + torus.len(), &e)
}

/// Charts, transitions, projections and torus actions of `Γ[n]`.
#[derive(Clone, Debug)]
pub struct GammaAtlas {
    pub n: usize,
    /// `transitions[l-1]` is `T_l : U_l -> U_{l+1}`.
    pub transitions: Vec<RationalMap>,
    /// `projections[l-1]` is `π^l : U_l -> A^{n+1}`.
    pub projections: Vec<RationalMap>,
    /// `actions[l-1]` acts on `U_l`; source is `u` followed by `sig`.
    pub actions: Vec<RationalMap>,
}

pub fn chart_vars(n: usize) -> Vec<String> {
    numbered("u", n + 2)
}

pub fn torus_vars(n: usize) -> Vec<String> {
    numbered("sig", n)
}

/// Builds the atlas of `Γ[n]`. `n = 0` gives the single chart `t = u1 u2`.
pub fn gamma_atlas(n: usize) -> Result<GammaAtlas, LocalError> {
    if n > MAX_N {
        return Err(LocalError::TooLarge(n));
    }
    let d = n + 2;
    let u = |i: usize| Fraction::var(d, i - 1);
    let mut projections = Vec::new();
    let mut transitions = Vec::new();
    let mut actions = Vec::new();
    for l in 1..=n + 1 {
        let mut comps = Vec::new();
        for i in 1..=n + 1 {
            comps.push(if i < l {
                u(i)
            } else if i == l {
                u(l).mul(&u(l + 1))
            } else {
                u(i + 1)
            });
        }
        projections.push(RationalMap::new(chart_vars(n), 0, comps));

        let mut acts = Vec::new();
        for i in 1..=d {
            let e = if i < l {
                sigbar(n, i)
            } else if i == l {
                neg(&sig(n, l - 1))
            } else if i == l + 1 {
                sig(n, l)
            } else {
                sigbar(n, i - 1)
            };
            acts.push(scaled(d, i - 1, &e));
        }
        let mut vars = chart_vars(n);
        vars.extend(torus_vars(n));
        actions.push(RationalMap::new(vars, n, acts));
    }
    for l in 1..=n {
        transitions.push(chart_change(n, l, l + 1));
    }
    Ok(GammaAtlas { n, transitions, projections, actions })
}

/// Closed-form chart change `U_l -> U_m` for `l < m`.
///
/// Coordinates below `l` and above `m + 1` are unchanged; `u_l -> u_l u_{l+1}`,
/// `u_i -> u_{i+1}` for `l < i < m`, `u_m -> 1/(u_{l+1}..u_m)` and
/// `u_{m+1} -> u_{m+1} u_{l+1}..u_m`.
pub fn chart_change(n: usize, l: usize, m: usize) -> RationalMap {
    assert!(1 <= l && l < m && m <= n + 1);
    let d = n + 2;
    let u = |i: usize| Fraction::var(d, i - 1);
    let mut block = vec![0; d];
    for i in l + 1..=m {
        block[i - 1] = 1;
    }
    let prod = laurent(d, &block);
    let comps = (1..=d)
        .map(|i| {
            if i < l || i > m + 1 {
                u(i)
            } else if i == l {
                u(l).mul(&u(l + 1))
            } else if i < m {
                u(i + 1)
            } else if i == m {
                prod.inv().expect("nonzero")
            } else {
                u(i).mul(&prod)
            }
        })
        .collect();
    RationalMap::new(chart_vars(n), 0, comps)
}

/// The action `t_i -> sigbar_i t_i` on `A^{n+1}`; source is `t` then `sig`.
pub fn base_action(n: usize) -> RationalMap {
    let d = n + 1;
    let comps = (1..=d).map(|i| scaled(d, i - 1, &sigbar(n, i))).collect();
    let mut vars = numbered("t", d);
    vars.extend(torus_vars(n));
    RationalMap::new(vars, n, comps)
}

impl GammaAtlas {
    pub fn verify(&self) -> Report {
        verify_atlas(self)
    }
}

/// Checks every identity relating charts, transitions, projections and actions.
pub fn verify_atlas(a: &GammaAtlas) -> Report {
    let n = a.n;
    let mut r = Report::default();
    let sig = torus_vars(n);
    for l in 1..=n {
        let t = &a.transitions[l - 1];
        let lhs = a.projections[l].compose(t).expect("arity");
        r.compare(format!("projection_compatibility[l={l}]"), &lhs, &a.projections[l - 1]);
    }
    for l in 1..=n {
        for m in l + 2..=n + 1 {
            let mut acc = a.transitions[l - 1].clone();
            for k in l + 1..m {
                acc = a.transitions[k - 1].compose(&acc).expect("arity");
            }
            r.compare(format!("cocycle[{l}->{m}]"), &acc, &chart_change(n, l, m));
        }
    }
    let base = base_action(n);
    for l in 1..=n + 1 {
        let lhs = a.projections[l - 1].compose(&a.actions[l - 1]).expect("arity");
        let rhs = base.compose(&a.projections[l - 1].with_passthrough(&sig, true)).expect("arity");
        r.compare(format!("base_equivariance[l={l}]"), &lhs, &rhs);
    }
    for l in 1..=n {
        let t = &a.transitions[l - 1];
        let lhs = t.compose(&a.actions[l - 1]).expect("arity");
        let rhs = a.actions[l].compose(&t.with_passthrough(&sig, true)).expect("arity");
        r.compare(format!("action_transition[l={l}]"), &lhs, &rhs);
    }
    r
}

/// `t_1 * .. * t_{n+1}` pulled back to every chart; all must agree.
pub fn verify_product_invariance(a: &GammaAtlas) -> Report {
    let mut r = Report::default();
    let d = a.n + 2;
    let all = laurent(d, &vec![1; d]);
    for (l, p) in a.projections.iter().enumerate() {
        let prod = p.components().iter().fold(Fraction::constant(d, q(1)), |acc, c| acc.mul(c));
        let pass = prod.same_function(&all);
        r.push(format!("product_invariance[l={}]", l + 1), pass, (!pass).then(|| prod.render(p.vars())));
    }
    r
}

/// On the central-fiber axes `u_j`, `u_{j+1}` of each chart `U_j`, the factor
/// `sig_l` acts with nonzero weight exactly on the axis of component `l + 1`.
pub fn verify_single_factor_support(a: &GammaAtlas) -> Report {
    let n = a.n;
    let mut r = Report::default();
    for l in 1..=n {
        let torus_var = n + 2 + (l - 1);
        let mut touched = Vec::new();
        for j in 1..=n + 1 {
            for i in [j, j + 1] {
                let comp = &a.actions[j - 1].components()[i - 1];
                match laurent_exponent(comp, torus_var) {
                    Some(0) => {}
                    Some(_) => touched.push((j, i)),
                    None => touched.push((0, 0)),
                }
            }
        }
        let expected = vec![(l, l + 1), (l + 1, l + 1)];
        let pass = touched == expected;
        r.push(format!("single_factor_support[l={l}]"), pass, (!pass).then(|| format!("{touched:?}")));
    }
    r
}

/// Maps of the small resolution of `z1 z2 = t1 t2`, each in its own variables.
#[derive(Clone, Debug)]
pub struct FourfoldResolution {
    /// `([a0,a1],[b0,b1]) -> [a0 b1, a1 b0, a0 b0, a1 b1]`.
    pub quadric_param: RationalMap,
    /// Blow-up map `(a, b, zeta) -> (z1, z2, t1, t2)`.
    pub blowup: RationalMap,
    /// `([b0,b1], eta1, eta2) -> (b1 eta1, b0 eta2, b0 eta1, b1 eta2)`.
    pub p_map: RationalMap,
    /// `(a, b, zeta) -> (b, a0 zeta, a1 zeta)`.
    pub contraction: RationalMap,
    /// `([b0,b1], eta1, eta2) -> (t1, t2) = (b0 eta1, b1 eta2)`.
    pub phi_map: RationalMap,
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn fourfold_resolution() -> FourfoldResolution {
    let v = |n: usize, i: usize| Fraction::var(n, i);
    let quadric_param = RationalMap::new(
        names(&["a0", "a1", "b0", "b1"]),
        0,
        vec![v(4, 0).mul(&v(4, 3)), v(4, 1).mul(&v(4, 2)), v(4, 0).mul(&v(4, 2)), v(4, 1).mul(&v(4, 3))],
    );
    let blowup = RationalMap::new(
        names(&["a0", "a1", "b0", "b1", "zeta"]),
        0,
        [(0, 3), (1, 2), (0, 2), (1, 3)].iter().map(|&(a, b)| v(5, a).mul(&v(5, b)).mul(&v(5, 4))).collect(),
    );
    let p_map = RationalMap::new(
        names(&["b0", "b1", "eta1", "eta2"]),
        0,
        [(1, 2), (0, 3), (0, 2), (1, 3)].iter().map(|&(a, b)| v(4, a).mul(&v(4, b))).collect(),
    );
    let contraction = RationalMap::new(
        names(&["a0", "a1", "b0", "b1", "zeta"]),
        0,
        vec![v(5, 2), v(5, 3), v(5, 0).mul(&v(5, 4)), v(5, 1).mul(&v(5, 4))],
    );
    let phi_map =
        RationalMap::new(names(&["b0", "b1", "eta1", "eta2"]), 0, vec![v(4, 0).mul(&v(4, 2)), v(4, 1).mul(&v(4, 3))]);
    FourfoldResolution { quadric_param, blowup, p_map, contraction, phi_map }
}

/// Where the proper transform of a coordinate axis of `{z1 z2 = t1 t2}` meets
/// the exceptional curve, as a point `[b0, b1]` of `P^1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AxisPoint {
    /// `[0, 1]`
    B01,
    /// `[1, 0]`
    B10,
}

/// Finds, for axis `k` of `(z1, z2, t1, t2)`, the point `[b0, b1]` where the
/// proper transform under `p_map` meets `eta = 0`.
///
/// Works chart by chart on `P^1` (`b1 = 1` and `b0 = 1`): every component of
/// `p_map` is a monomial, so the preimage of the punctured axis is cut out by
/// setting a minimal set of chart variables to zero.
pub fn axis_meeting_point(p_map: &RationalMap, k: usize) -> Option<AxisPoint> {
    // chart variables: (b, eta1, eta2), b = b0 (b1 = 1) or b = b1 (b0 = 1)
    for (chart, fixed) in [(AxisPoint::B01, 1usize), (AxisPoint::B10, 0usize)] {
        let free = 1 - fixed;
        let monos: Vec<Vec<bool>> = p_map
            .components()
            .iter()
            .map(|c| {
                let (e, _) = c.num().leading().expect("nonzero component");
                vec![e[free] > 0, e[2] > 0, e[3] > 0]
            })
            .collect();
        let nonzero = &monos[k];
        let mut best: Option<Vec<bool>> = None;
        for mask in 0u8..8 {
            let zero: Vec<bool> = (0..3).map(|i| mask & (1 << i) != 0).collect();
            if (0..3).any(|i| zero[i] && nonzero[i]) {
                continue;
            }
            let hits = monos.iter().enumerate().all(|(j, m)| j == k || (0..3).any(|i| m[i] && zero[i]));
            if hits && best.as_ref().is_none_or(|b| zero.iter().filter(|x| **x).count() < b.iter().filter(|x| **x).count()) {
                best = Some(zero);
            }
        }
        if let Some(zero) = best {
            // meeting point: eta -> 0 along the component; b is pinned to 0 in this chart
            if zero[0] {
                return Some(chart);
            }
        }
    }
    None
}

/// Checks the pullback identities and the axis-incidence pattern.
pub fn verify_resolution(res: &FourfoldResolution) -> Report {
    let mut r = Report::default();
    let quad = |w: &RationalMap| {
        let c = w.components();
        c[0].mul(&c[1]).add(&c[2].mul(&c[3]).neg())
    };
    let qd = quad(&res.quadric_param);
    r.push("quadric_relation", qd.is_zero(), (!qd.is_zero()).then(|| qd.render(res.quadric_param.vars())));
    let pd = quad(&res.p_map);
    r.push("p_pullback_z1z2_minus_t1t2", pd.is_zero(), (!pd.is_zero()).then(|| pd.render(res.p_map.vars())));
    let bd = quad(&res.blowup);
    r.push("blowup_pullback", bd.is_zero(), (!bd.is_zero()).then(|| bd.render(res.blowup.vars())));
    let through = res.p_map.compose(&res.contraction).expect("arity");
    r.compare("p_after_contraction_is_blowup", &through, &res.blowup);
    let tpart = RationalMap::new(
        res.p_map.vars().to_vec(),
        0,
        vec![res.p_map.components()[2].clone(), res.p_map.components()[3].clone()],
    );
    r.compare("phi_is_t_part_of_p", &res.phi_map, &tpart);
    let axes = ["z1", "z2", "t1", "t2"];
    let pts: Vec<Option<AxisPoint>> = (0..4).map(|k| axis_meeting_point(&res.p_map, k)).collect();
    for (k, name) in axes.iter().enumerate() {
        r.push(format!("axis_{name}_meets_exceptional"), pts[k].is_some(), None);
    }
    let pair = |a: usize, b: usize, want: AxisPoint| pts[a] == Some(want) && pts[b] == Some(want);
    r.push("incidence_z1_t2_at_[0,1]", pair(0, 3, AxisPoint::B01), Some(format!("{pts:?}")).filter(|_| !pair(0, 3, AxisPoint::B01)));
    r.push("incidence_z2_t1_at_[1,0]", pair(1, 2, AxisPoint::B10), Some(format!("{pts:?}")).filter(|_| !pair(1, 2, AxisPoint::B10)));
    r
}

/// Unit-fill (`w_l = 1` off `I`) or zero-fill (`w_l = 0` off `I`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillMode {
    Unit,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardEmbedding {
    /// Ambient is `A^{n+1}`.
    pub n: usize,
    /// 1-based, strictly increasing.
    pub subset: Vec<usize>,
    pub mode: FillMode,
}

impl StandardEmbedding {
    pub fn new(n: usize, subset: Vec<usize>, mode: FillMode) -> Result<Self, LocalError> {
        check_subset(&subset, n + 1)?;
        Ok(StandardEmbedding { n, subset, mode })
    }

    /// `A^{|I|} -> A^{n+1}`, `w_{I(k)} = z_k`.
    pub fn map(&self) -> RationalMap {
        let m = self.subset.len();
        let fill = match self.mode {
            FillMode::Unit => q(1),
            FillMode::Zero => q(0),
        };
        let comps = (1..=self.n + 1)
            .map(|w| match self.subset.iter().position(|&i| i == w) {
                Some(k) => Fraction::var(m, k),
                None => Fraction::constant(m, fill.clone()),
            })
            .collect();
        RationalMap::new(numbered("z", m), 0, comps)
    }
}

fn check_subset(subset: &[usize], max: usize) -> Result<(), LocalError> {
    let ok = !subset.is_empty() && subset.windows(2).all(|w| w[0] < w[1]) && subset[0] >= 1 && subset[subset.len() - 1] <= max;
    if ok {
        Ok(())
    } else {
        Err(LocalError::BadSubset(subset.to_vec(), max))
    }
}

pub fn standard_embedding(e: &StandardEmbedding) -> RationalMap {
    e.map()
}

/// A homomorphism `G[m] -> G[n]`: component `k` is `prod sig_i^{exps[k][i]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusHom {
    pub source_rank: usize,
    pub target_rank: usize,
    pub exps: Vec<Vec<i32>>,
}

impl TorusHom {
    /// `λ_J` for `J = [n+1] \ I`.
    ///
    /// When `J ⊆ [n]` the `j_i`-th component is `sig_i` and the rest are 1.
    /// If `n + 1 ∈ J` that rule has no slot for the last parameter, so instead
    /// the homomorphism is chosen with `sigbar_{j_i} = sig_i` for every `i` and
    /// `sigbar_{I(1)} = prod sig_i^{-1}` (the product of all `sigbar` is 1).
    pub fn lambda(n: usize, subset: &[usize]) -> Result<Self, LocalError> {
        check_subset(subset, n + 1)?;
        let comp: Vec<usize> = (1..=n + 1).filter(|j| !subset.contains(j)).collect();
        let m = comp.len();
        let mut exps = vec![vec![0; m]; n];
        if comp.iter().all(|&j| j <= n) {
            for (i, &j) in comp.iter().enumerate() {
                exps[j - 1][i] = 1;
            }
        } else {
            let mut bars = vec![vec![0; m]; n + 2];
            for (i, &j) in comp.iter().enumerate() {
                bars[j][i] = 1;
            }
            bars[subset[0]] = vec![-1; m];
            // lambda_k = prod_{j <= k} sigbar_j
            let mut acc = vec![0; m];
            for k in 1..=n {
                for i in 0..m {
                    acc[i] += bars[k][i];
                }
                exps[k - 1] = acc.clone();
            }
        }
        Ok(TorusHom { source_rank: m, target_rank: n, exps })
    }

    /// Exponents of `sigbar_k(λ(σ))` for `k = 1..=n+1`.
    pub fn sigbar_exps(&self) -> Vec<Vec<i32>> {
        let m = self.source_rank;
        let n = self.target_rank;
        let comp = |k: usize| if k == 0 || k == n + 1 { vec![0; m] } else { self.exps[k - 1].clone() };
        (1..=n + 1).map(|k| comp(k).iter().zip(comp(k - 1)).map(|(a, b)| a - b).collect()).collect()
    }
}

/// Integer inverse of a square integer matrix, if it is unimodular.
fn unimodular_inverse(m: &[Vec<i32>]) -> Option<Vec<Vec<i32>>> {
    let k = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Q> = row.iter().map(|&x| q(x as i64)).collect();
            r.extend((0..k).map(|j| if i == j { q(1) } else { q(0) }));
            r
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..k {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
    }
    a.iter()
        .map(|row| {
            row[k..]
                .iter()
                .map(|x| if x.is_integer() { i32::try_from(x.to_integer()).ok() } else { None })
                .collect()
        })
        .collect()
}

/// `Ψ(σ, z) = (γ_I(z))^{λ(σ)}` as a map in `(sig, z)`.
pub fn principal_map(n: usize, subset: &[usize], lambda: &TorusHom) -> Result<RationalMap, LocalError> {
    let emb = StandardEmbedding::new(n, subset.to_vec(), FillMode::Unit)?.map();
    let m = lambda.source_rank;
    let k = subset.len();
    let d = m + k;
    let bars = lambda.sigbar_exps();
    let comps = (0..=n)
        .map(|w| {
            let mut e = bars[w].clone();
            e.extend(vec![0; k]);
            let unit = laurent(d, &e);
            let g = &emb.components()[w];
            // lift γ_I's component from z-variables into (sig, z)
            let shift: Vec<usize> = (m..d).collect();
            let lifted = Fraction::new(g.num().remap(d, &shift), g.den().remap(d, &shift)).expect("nonzero");
            unit.mul(&lifted)
        })
        .collect();
    let mut vars = numbered("sig", m);
    vars.extend(numbered("z", k));
    Ok(RationalMap::new(vars, 0, comps))
}

/// Checks that `Ψ` has an explicit rational inverse where the `J`-coordinates
/// are nonzero: solve `sig` from the `J`-coordinates, then `z` from the
/// `I`-coordinates.
pub fn verify_principal_chart_with(n: usize, subset: &[usize], lambda: &TorusHom) -> Result<Report, LocalError> {
    let psi = principal_map(n, subset, lambda)?;
    let mut r = Report::default();
    let comp: Vec<usize> = (1..=n + 1).filter(|j| !subset.contains(j)).collect();
    let m = lambda.source_rank;
    let bars = lambda.sigbar_exps();
    let mat: Vec<Vec<i32>> = comp.iter().map(|&j| bars[j - 1].clone()).collect();
    let inv = if mat.len() == m { unimodular_inverse(&mat) } else { None };
    let Some(inv) = inv else {
        r.push("torus_part_invertible", false, Some(format!("J-rows of sigbar exponents {mat:?} are not unimodular")));
        return Ok(r);
    };
    r.push("torus_part_invertible", true, None);
    // inverse: w -> (sig, z)
    let d = n + 1;
    let sig_of_w: Vec<Vec<i32>> = (0..m)
        .map(|i| {
            let mut e = vec![0; d];
            for (c, &j) in comp.iter().enumerate() {
                e[j - 1] += inv[i][c];
            }
            e
        })
        .collect();
    let mut comps: Vec<Fraction> = sig_of_w.iter().map(|e| laurent(d, e)).collect();
    for &i in subset {
        // z = w_i / sigbar_i(sig(w))
        let mut e = vec![0; d];
        e[i - 1] += 1;
        for (s, &b) in bars[i - 1].iter().enumerate() {
            for (x, y) in e.iter_mut().zip(&sig_of_w[s]) {
                *x -= b * y;
            }
        }
        comps.push(laurent(d, &e));
    }
    let inverse = RationalMap::new(numbered("w", d), 0, comps);
    let there = psi.compose(&inverse).expect("arity");
    r.compare("psi_after_inverse_is_identity", &there, &RationalMap::identity(numbered("w", d)));
    let back = inverse.compose(&psi).expect("arity");
    r.compare("inverse_after_psi_is_identity", &back, &RationalMap::identity(psi.vars().to_vec()));
    Ok(r)
}

pub fn verify_principal_chart(n: usize, subset: &[usize]) -> Result<Report, LocalError> {
    let lambda = TorusHom::lambda(n, subset)?;
    verify_principal_chart_with(n, subset, &lambda)
}

/// Torus action on `A^n` of a relative pair: `t_i -> sigbar_{i+1} t_i`, or
/// `t_i -> sigbar_i t_i` when `reversed`.
pub fn relative_action(n: usize, reversed: bool) -> Result<RationalMap, LocalError> {
    if n == 0 {
        return Err(LocalError::ZeroN);
    }
    let comps = (1..=n).map(|i| scaled(n, i - 1, &sigbar(n, if reversed { i } else { i + 1 }))).collect();
    let mut vars = numbered("t", n);
    vars.extend(torus_vars(n));
    Ok(RationalMap::new(vars, n, comps))
}

/// Checks that the coordinate-hyperplane embedding `A^n -> A^{n+1}` (zero in
/// the first slot, or the last slot when `reversed`) intertwines
/// [`relative_action`] with [`base_action`].
pub fn verify_relative_action(n: usize, reversed: bool) -> Result<Report, LocalError> {
    let act = relative_action(n, reversed)?;
    let subset: Vec<usize> = if reversed { (1..=n).collect() } else { (2..=n + 1).collect() };
    let emb = StandardEmbedding::new(n, subset, FillMode::Zero)?.map();
    let emb = RationalMap::new(numbered("t", n), 0, emb.components().to_vec());
    let sig = torus_vars(n);
    let lhs = base_action(n).compose(&emb.with_passthrough(&sig, true)).expect("arity");
    let rhs = emb.compose(&act).expect("arity");
    let mut r = Report::default();
    r.compare(format!("hyperplane_equivariance[n={n},reversed={reversed}]"), &lhs, &rhs);
    Ok(r)
}

/// Coordinate-level content of splitting `Γ[n]` along `t_l = 0`.
///
/// In `U_j` the pullback of `t_l` is `u_l u_{l+1}` when `j = l`, `u_l` when
/// `j > l` and `u_{l+1}` when `j < l`. The left piece (components `1..l`)
/// lives in `U_1..U_l`, cut out by `u_{l+1} = 0`; the right piece (components
/// `l+1..n+2`) lives in `U_l..U_{n+1}`, cut out by `u_l` in `U_l` and by the
/// pulled-back coordinate elsewhere. Transitions must carry each piece's
/// equation to a monomial multiple of itself, the torus must preserve each
/// piece, and the pieces meet only in `U_l`.
pub fn splice_check(n: usize, l: usize) -> Result<Report, LocalError> {
    if l == 0 || l > n + 1 {
        return Err(LocalError::BadIndex { l, max: n + 1 });
    }
    let a = gamma_atlas(n)?;
    let d = n + 2;
    let mut r = Report::default();
    let u = |i: usize| Fraction::var(d, i - 1);

    for j in 1..=n + 1 {
        let pulled = &a.projections[j - 1].components()[l - 1];
        let want = if j == l {
            u(l).mul(&u(l + 1))
        } else if j > l {
            u(l)
        } else {
            u(l + 1)
        };
        let pass = pulled.same_function(&want);
        r.push(format!("pullback_t{l}[U{j}]"), pass, (!pass).then(|| pulled.render(&chart_vars(n))));
    }

    // equation of each piece per chart (1-based coordinate index)
    let left = |j: usize| (j <= l).then_some(l + 1);
    let right = |j: usize| (j >= l).then_some(l);
    let left_charts = (1..=n + 1).filter(|&j| left(j).is_some()).count();
    let right_charts = (1..=n + 1).filter(|&j| right(j).is_some()).count();
    r.push(
        "left_piece_chart_count",
        left_charts == l,
        Some(format!("{left_charts} charts, expected {l}")).filter(|_| left_charts != l),
    );
    r.push(
        "right_piece_chart_count",
        right_charts == n + 2 - l,
        Some(format!("{right_charts} charts, expected {}", n + 2 - l)).filter(|_| right_charts != n + 2 - l),
    );

    for (side, eq) in [("left", &left as &dyn Fn(usize) -> Option<usize>), ("right", &right)] {
        for j in 1..=n {
            let (Some(h0), Some(h1)) = (eq(j), eq(j + 1)) else { continue };
            let image = &a.transitions[j - 1].components()[h1 - 1];
            // image of the next chart's equation must be a Laurent monomial times u_{h0}
            let ratio = image.div(&u(h0)).expect("nonzero");
            let pass = laurent_exponent(&ratio, h0 - 1) == Some(0)
                && ratio.num().num_terms() == 1
                && ratio.den().num_terms() == 1;
            r.push(format!("{side}_piece_transition[T{j}]"), pass, (!pass).then(|| image.render(&chart_vars(n))));
        }
        for j in 1..=n + 1 {
            let Some(h) = eq(j) else { continue };
            let comp = &a.actions[j - 1].components()[h - 1];
            let ratio = comp.div(&Fraction::var(d + n, h - 1)).expect("nonzero");
            let pass = ratio.num().num_terms() == 1 && ratio.den().num_terms() == 1 && (0..d).all(|v| laurent_exponent(&ratio, v) == Some(0));
            r.push(format!("{side}_piece_torus_invariant[U{j}]"), pass, (!pass).then(|| comp.render(a.actions[j - 1].vars())));
        }
    }

    // the pieces meet only in U_l, along u_l = u_{l+1} = 0
    let shared: Vec<usize> = (1..=n + 1).filter(|&j| left(j).is_some() && right(j).is_some()).collect();
    let pass = shared == vec![l] && left(l) != right(l);
    r.push("pieces_meet_along_node_locus", pass, (!pass).then(|| format!("shared charts {shared:?}")));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(m: &RationalMap) -> String {
        m.render()
    }

    #[test]
    fn n1_formulas() {
        let a = gamma_atlas(1).unwrap();
        assert_eq!(render(&a.transitions[0]), "(u1*u2, 1/u2, u2*u3)");
        assert_eq!(render(&a.projections[0]), "(u1*u2, u3)");
        assert_eq!(render(&a.actions[0]), "(u1, u2*sig1, u3/sig1)");
    }

    #[test]
    fn n2_first_transition() {
        let a = gamma_atlas(2).unwrap();
        assert_eq!(render(&a.transitions[0]), "(u1*u2, 1/u2, u2*u3, u4)");
    }

    #[test]
    fn n0_is_single_chart() {
        let a = gamma_atlas(0).unwrap();
        assert_eq!(a.projections.len(), 1);
        assert!(a.transitions.is_empty());
        assert_eq!(render(&a.projections[0]), "(u1*u2)");
        assert!(verify_atlas(&a).passed());
        assert!(gamma_atlas(MAX_N + 1).is_err());
    }

    #[test]
    fn embeddings() {
        let e = StandardEmbedding::new(2, vec![1, 3], FillMode::Unit).unwrap();
        assert_eq!(e.map().render(), "(z1, 1, z2)");
        let e = StandardEmbedding::new(2, vec![1, 3], FillMode::Zero).unwrap();
        assert_eq!(e.map().render(), "(z1, 0, z2)");
        let e = StandardEmbedding::new(2, vec![1, 2, 3], FillMode::Unit).unwrap();
        assert!(e.map().equal_on_dense(&RationalMap::identity(numbered("z", 3))));
        assert!(StandardEmbedding::new(2, vec![3, 1], FillMode::Unit).is_err());
        assert!(StandardEmbedding::new(2, vec![], FillMode::Unit).is_err());
        assert!(StandardEmbedding::new(2, vec![4], FillMode::Unit).is_err());
    }

    #[test]
    fn lambda_literal_and_psi() {
        let lam = TorusHom::lambda(2, &[1, 3]).unwrap();
        assert_eq!(lam.exps, vec![vec![0], vec![1]]);
        let psi = principal_map(2, &[1, 3], &lam).unwrap();
        assert_eq!(psi.render(), "(z1, sig1, z2/sig1)");
        assert!(verify_principal_chart(2, &[1, 3]).unwrap().passed());
        assert!(verify_principal_chart(1, &[1, 2]).unwrap().passed());
    }

    #[test]
    fn lambda_with_last_slot() {
        // J = {2} with n = 1 has no literal slot
        let r = verify_principal_chart(1, &[1]).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = verify_principal_chart(3, &[2]).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn corrupted_lambda_fails() {
        let bad = TorusHom { source_rank: 2, target_rank: 3, exps: vec![vec![0, 0], vec![1, 1], vec![0, 0]] };
        let r = verify_principal_chart_with(3, &[1, 4], &bad).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn relative_actions() {
        assert_eq!(relative_action(1, false).unwrap().render(), "(t1/sig1)");
        assert_eq!(relative_action(1, true).unwrap().render(), "(t1*sig1)");
        for n in 1..4 {
            assert!(verify_relative_action(n, false).unwrap().passed());
            assert!(verify_relative_action(n, true).unwrap().passed());
        }
    }

    #[test]
    fn resolution_pattern() {
        let res = fourfold_resolution();
        let r = verify_resolution(&res);
        assert!(r.passed(), "{:?}", r.failures());
        let p = res.p_map.eval(&[q(0), q(1), q(1), q(0)]).unwrap();
        assert_eq!(p, vec![q(1), q(0), q(0), q(0)]);
    }

    #[test]
    fn corrupted_transition_is_caught() {
        let mut a = gamma_atlas(1).unwrap();
        let d = 3;
        a.transitions[0] = RationalMap::new(
            chart_vars(1),
            0,
            vec![Fraction::var(d, 0).mul(&Fraction::var(d, 1)), Fraction::var(d, 1).inv().unwrap(), Fraction::var(d, 2)],
        );
        let r = verify_atlas(&a);
        assert!(!r.passed());
        assert!(r.failures().iter().any(|c| c.name.starts_with("action_transition")));
    }

    #[test]
    fn splice_small_cases() {
        for (n, l) in [(1, 1), (2, 2), (1, 2)] {
            let r = splice_check(n, l).unwrap();
            assert!(r.passed(), "n={n} l={l}: {:?}", r.failures());
        }
        assert!(splice_check(1, 3).is_err());
    }

    #[test]
    fn single_factor_support_holds() {
        for n in 1..4 {
            assert!(verify_single_factor_support(&gamma_atlas(n).unwrap()).passed());
        }
    }
}
