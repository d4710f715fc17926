//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use degkit::combgraphs::*;
use degkit::contact::*;
use degkit::exactalg::*;
use degkit::localmodel::*;
use degkit::poly::Poly;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Atlas identities for n = 1..5.
fn atlas() -> Outcome {
    let mut total = 0;
    for n in 1..=5 {
        let a = gamma_atlas(n).map_err(|e| e.to_string())?;
        let r = verify_atlas(&a);
        ensure(r.passed(), || format!("n={n}: {:?}", r.failures()))?;
        total += r.checks.len();
    }
    Ok(format!("{total} identities, n=1..5"))
}

// 2. Resolution pullback and axis incidence.
fn resolution() -> Outcome {
    let r = verify_resolution(&fourfold_resolution());
    ensure(r.passed(), || format!("{:?}", r.failures()))?;
    for name in ["p_pullback_z1z2_minus_t1t2", "incidence_z1_t2_at_[0,1]", "incidence_z2_t1_at_[1,0]"] {
        ensure(r.checks.iter().any(|c| c.name == name && c.pass), || format!("missing check {name}"))?;
    }
    Ok(format!("{} checks", r.checks.len()))
}

fn random_element(rng: &mut StdRng, alg: &Arc<TruncatedAlgebra>, unit: bool) -> AlgebraElement {
    let gens = alg.generators().to_vec();
    let mut text = if unit {
        let c: i64 = rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 };
        format!("{c}/{}", rng.gen_range(1..=3))
    } else {
        format!("{}", rng.gen_range(-2..=2))
    };
    for _ in 0..rng.gen_range(0..=3) {
        let g = &gens[rng.gen_range(0..gens.len())];
        let e = rng.gen_range(1..=3);
        text.push_str(&format!(" + ({})*{g}^{e}", rng.gen_range(-3..=3)));
    }
    AlgebraElement::parse(alg, &text).unwrap()
}

// Raw bivariate polynomial over A, reduced only at the end.
type Raw = BTreeMap<(usize, usize), AlgebraElement>;

fn raw_add(a: &Raw, b: &Raw) -> Raw {
    let mut out = a.clone();
    for (k, v) in b {
        let e = out.entry(*k).or_insert_with(|| AlgebraElement::zero(v.algebra()));
        *e = &*e + v;
    }
    out
}

fn raw_mul(a: &Raw, b: &Raw, m: usize) -> Raw {
    let mut out = Raw::new();
    for ((i1, j1), x) in a {
        for ((i2, j2), y) in b {
            let (i, j) = (i1 + i2, j1 + j2);
            // z1^m = z2^m = 0 in the ring
            if i >= m || j >= m {
                continue;
            }
            let e = out.entry((i, j)).or_insert_with(|| AlgebraElement::zero(x.algebra()));
            *e = &*e + &(x * y);
        }
    }
    out
}

fn raw_reduce(ring: &Arc<NodeRing>, a: &Raw) -> NodeSeries {
    let alg = ring.algebra();
    let mut out = NodeSeries::zero(ring);
    for (&(i, j), c) in a {
        let k = i.min(j);
        let coeff = c * &AlgebraElement::s(alg).pow(k as u32);
        let slot = match (i - k, j - k) {
            (0, 0) => Slot::Const,
            (p, 0) => Slot::Z1(p),
            (_, p) => Slot::Z2(p),
        };
        out = &out + &NodeSeries::monomial(ring, slot, coeff);
    }
    out
}

// Random sparse series as both a ring element and a raw polynomial.
fn random_series(rng: &mut StdRng, ring: &Arc<NodeRing>) -> (NodeSeries, Raw) {
    let alg = ring.algebra();
    let m = ring.order();
    let mut raw = Raw::new();
    let mut s = NodeSeries::zero(ring);
    for _ in 0..rng.gen_range(1..=4) {
        let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..3.min(m)));
        let c = random_element(rng, alg, false);
        let mut term = NodeSeries::constant(ring, c.clone());
        term = &(&term * &NodeSeries::z1(ring).pow(i as u32)) * &NodeSeries::z2(ring).pow(j as u32);
        s = &s + &term;
        raw = raw_add(&raw, &BTreeMap::from([((i, j), c)]));
    }
    (s, raw)
}

fn terms_of(x: &NodeSeries) -> Vec<(u32, u32, AlgebraElement)> {
    let mut t = vec![(0, 0, x.a0().clone())];
    t.extend(x.z1_tail().iter().enumerate().map(|(i, c)| (i as u32 + 1, 0, c.clone())));
    t.extend(x.z2_tail().iter().enumerate().map(|(j, c)| (0, j as u32 + 1, c.clone())));
    t
}

// 3. Normal-form calculus at M = 8.
fn normal_forms() -> Outcome {
    let m = 8;
    let algs = [
        TruncatedAlgebra::power_series(8),
        TruncatedAlgebra::parse(&["s", "c"], &["c*s", "c^2"], 6).unwrap(),
        TruncatedAlgebra::parse(&["s", "e"], &["e^2 - s^3"], 8).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for round in 0..500 {
        let alg = &algs[round % algs.len()];
        let ring = NodeRing::new(alg, m).unwrap();
        let (x, rx) = random_series(&mut rng, &ring);
        let (y, ry) = random_series(&mut rng, &ring);
        let (z, rz) = random_series(&mut rng, &ring);
        // expression (x + y) * z + x * y, two ways
        let direct = &(&(&x + &y) * &z) + &(&x * &y);
        let raw = raw_add(&raw_mul(&raw_add(&rx, &ry), &rz, m), &raw_mul(&rx, &ry, m));
        let other = raw_reduce(&ring, &raw);
        ensure(direct == other, || format!("round {round}: strategies differ: {} vs {}", direct.render(), other.render()))?;
        let nf = normal_form(&ring, &terms_of(&direct)).map_err(|e| e.to_string())?;
        ensure(nf == direct, || format!("round {round}: normal form not idempotent"))?;
        let back = NodeSeries::from_vector(&ring, &direct.to_vector()).map_err(|e| e.to_string())?;
        ensure(back == direct, || format!("round {round}: vector round trip"))?;
        ensure(&x * &y == &y * &x, || format!("round {round}: commutativity"))?;
        ensure(&(&x * &y) * &z == &x * &(&y * &z), || format!("round {round}: associativity"))?;
        ensure(&x * &(&y + &z) == &(&x * &y) + &(&x * &z), || format!("round {round}: distributivity"))?;
        ensure(&x * &NodeSeries::one(&ring) == x, || format!("round {round}: unit"))?;
        ensure((&x + &(-&x)).is_zero(), || format!("round {round}: additive inverse"))?;
    }
    Ok("500 expressions, M=8".into())
}

// 4. Flat local forcing on random pure-form inputs, N = M = 6.
fn forcing() -> Outcome {
    let m = 6;
    let alg = &TruncatedAlgebra::power_series(6);
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    for round in 0..50 {
        let ring = NodeRing::new(alg, m).unwrap();
        let n = [1usize, 2, 3][rng.gen_range(0..3)];
        let mut beta = NodeSeries::constant(&ring, random_element(&mut rng, alg, true));
        for i in 1..m {
            if rng.gen_bool(0.4) {
                beta = &beta + &NodeSeries::monomial(&ring, Slot::Z1(i), random_element(&mut rng, alg, false));
            }
            if rng.gen_bool(0.4) {
                beta = &beta + &NodeSeries::monomial(&ring, Slot::Z2(i), random_element(&mut rng, alg, false));
            }
        }
        let eps = random_element(&mut rng, alg, true);
        let z1n = NodeSeries::z1(&ring).pow(n as u32);
        let z2n = NodeSeries::z2(&ring).pow(n as u32);
        let phi1 = &beta * &z1n;
        let phi2 = &(&beta.inverse().unwrap() * &z2n).scale(&eps);
        let psi = &AlgebraElement::s(alg).pow(n as u32) * &eps;
        let d = ContactData::new(phi1.clone(), phi2.clone(), psi.clone()).map_err(|e| format!("round {round}: {e}"))?;
        let r = flat_local_forcing(&d).map_err(|e| format!("round {round} (n={n}): {e}"))?;
        ensure(r.n == n, || format!("round {round}: recovered n={} expected {n}", r.n))?;
        ensure(&r.beta1 * &r.beta2 == NodeSeries::constant(&ring, r.epsilon.clone()), || format!("round {round}: beta1 beta2 != eps"))?;
        ensure(&AlgebraElement::s(alg).pow(n as u32) * &r.epsilon == psi, || format!("round {round}: psi != s^n eps"))?;
        ensure(&z1n * &r.beta1 == phi1 && &z2n * &r.beta2 == *phi2, || format!("round {round}: phi witnesses"))?;
    }
    Ok("50 inputs, N=M=6".into())
}

fn fixture(gens: &[&str], rels: &[&str], m: usize, p1: &str, p2: &str, psi: &str) -> ContactData {
    let a = TruncatedAlgebra::parse(gens, rels, 4).unwrap();
    let ring = NodeRing::new(&a, m).unwrap();
    ContactData::new(NodeSeries::parse(&ring, p1).unwrap(), NodeSeries::parse(&ring, p2).unwrap(), AlgebraElement::parse(&a, psi).unwrap())
        .unwrap()
}

// A unit factor moved between the two branches, with nilpotent twists.
fn twisted(m: usize) -> ContactData {
    let a = TruncatedAlgebra::parse(&["s", "e"], &["e*s", "e^2"], 4).unwrap();
    let ring = NodeRing::new(&a, m).unwrap();
    let beta = NodeSeries::parse(&ring, "2+z2+s*z1+e").unwrap();
    let p1 = &beta * &NodeSeries::parse(&ring, "z1^3 + e*z1 + e*z1^2").unwrap();
    let p2 = &beta.inverse().unwrap() * &NodeSeries::parse(&ring, "z2^3").unwrap();
    ContactData::new(p1, p2, AlgebraElement::parse(&a, "s^3").unwrap()).unwrap()
}

const UNIVERSALITY_M: usize = 12;

fn fixtures() -> Vec<(&'static str, ContactData, usize)> {
    let m = UNIVERSALITY_M;
    vec![
        ("c-obstructed", fixture(&["s", "c"], &["c*s", "c^2"], m, "z1^2 + c*z1", "z2^2", "s^2"), 2),
        ("two-sided", fixture(&["s", "c"], &["c*s", "c^2"], m, "z1^2 + c*z1", "z2^2 + c*z2", "s^2"), 2),
        (
            "two-parameter",
            fixture(&["s", "c", "d"], &["c*s", "d*s", "c^2", "d^2", "c*d"], m, "(1+s)*(z1^2 + c*z1)", "(1-s+s^2-s^3)*(z2^2 + d*z2)", "s^2"),
            2,
        ),
        ("twisted", twisted(m), 3),
    ]
}

// 5. Universality of the pre-deformability ideal.
fn universality() -> Outcome {
    let mut total = 0;
    for (name, d, n) in fixtures() {
        let homs = standard_test_homs(d.algebra());
        let cases = universality_cases(&d, n, &homs).map_err(|e| format!("{name}: {e}"))?;
        let bad: Vec<_> = cases.iter().filter(|c| !c.agrees()).collect();
        ensure(bad.is_empty(), || format!("{name}: {} disagreements, first {:?}", bad.len(), bad[0]))?;
        ensure(cases.iter().any(|c| c.pure) && cases.iter().any(|c| !c.pure), || format!("{name}: test family does not separate"))?;
        total += cases.len();
    }
    Ok(format!("4 fixtures, {total} homomorphisms, M={UNIVERSALITY_M}"))
}

// 6. Base change of the ideal.
fn base_change() -> Outcome {
    let mut total = 0;
    for (name, d, n) in fixtures() {
        let a = d.algebra();
        let ideal = predeformability_ideal(&d, n).map_err(|e| e.to_string())?;
        let mut homs = vec![AlgebraHom::identity(a)];
        if !ideal.is_zero() {
            homs.push(ideal.quotient().unwrap().1);
        }
        let sq = AlgebraIdeal::new(a, vec![AlgebraElement::s(a).pow(2)]).unwrap();
        homs.push(sq.quotient().unwrap().1);
        // nilpotent extension A -> A[u]/(u^2)
        let mut gens = a.generators().to_vec();
        gens.push("u".into());
        let keep: Vec<usize> = (0..gens.len() - 1).collect();
        let mut rels: Vec<Poly> = a.relations().iter().map(|r| r.remap(gens.len(), &keep)).collect();
        rels.push(Poly::var(gens.len(), gens.len() - 1).pow(2));
        let ext = TruncatedAlgebra::new(gens, rels, a.truncation(), true).unwrap();
        let imgs = (0..a.ngens()).map(|i| AlgebraElement::gen(&ext, i)).collect();
        homs.push(AlgebraHom::new(a, &ext, imgs).unwrap());
        homs.extend(standard_test_homs(a).into_iter().take(4));
        ensure(homs.len() >= 5, || format!("{name}: only {} homomorphisms", homs.len()))?;
        for (i, h) in homs.iter().enumerate() {
            let ok = verify_base_change(&d, n, h).map_err(|e| format!("{name} hom {i}: {e}"))?;
            ensure(ok, || format!("{name}: base change fails for hom {i} to {}", h.target().generators().join(",")))?;
        }
        total += homs.len();
    }
    Ok(format!("4 fixtures, {total} homomorphisms"))
}

const CAPS: EnumCaps = EnumCaps { max_weight: 2, max_pieces_per_group: 2, max_nodes_per_interface: 2, bound: 6 };

// Regression constants from the first oracle run.
const STABLE_COUNT: usize = 263_112;
const FULL_COUNT: usize = 230_703;
const FULL_STABLE_COUNT: usize = 28_946;

fn stable_enumeration() -> Vec<(TopType, Vec<SplitMap>)> {
    TopType::all_with_norm_at_most(5).into_iter().map(|t| (t, enumerate_stable_types(t, &CAPS).unwrap())).collect()
}

// 7. Norm identity and ample weights.
fn norm_identity(all: &[(TopType, Vec<SplitMap>)]) -> Outcome {
    let mut count = 0;
    for (t, maps) in all {
        for m in maps {
            let w: i64 = (1..=m.n() + 2).map(|i| weight(m, i).unwrap()).sum();
            ensure(m.total_type() == *t, || format!("{t:?}: type {:?}", m.total_type()))?;
            ensure(w == t.norm() && verify_norm_identity(m), || format!("{t:?}: weights sum to {w}"))?;
            let a = ample_weights(m).map_err(|e| format!("{t:?}: {e}"))?;
            ensure(a.windows(2).all(|p| p[0] < p[1]), || format!("{t:?}: {a:?} not increasing"))?;
            ensure(m.n() as i64 <= t.norm(), || format!("{t:?}: length {} above bound", m.n()))?;
        }
        count += maps.len();
    }
    ensure(count == STABLE_COUNT, || format!("{count} stable maps, frozen {STABLE_COUNT}"))?;
    Ok(format!("{} types, {count} maps, caps {CAPS:?}", all.len()))
}

// Independent stability oracle: ends ordinarily stable, and no middle group
// made only of trivial bridges (genus 0, no degree, no marks, one node each side).
fn oracle_stable(m: &SplitMap) -> bool {
    let groups = m.groups();
    let last = groups.len() - 1;
    let ends_ok = groups[0].iter().chain(&groups[last]).all(|p| {
        let special = p.marks.len() + p.left.len() + p.right.len();
        p.degree > 0 || 2 * p.genus as usize + special > 2
    });
    let trivial = |p: &Piece| p.genus == 0 && p.degree == 0 && p.marks.is_empty() && p.left.len() == 1 && p.right.len() == 1;
    ends_ok && groups[1..last].iter().all(|g| !g.iter().all(trivial))
}

// 8. Stability criterion against the oracle.
fn stability(all: &[(TopType, Vec<SplitMap>)]) -> Outcome {
    let mut checked = 0;
    for (t, maps) in all {
        for m in maps {
            ensure(is_stable(m) && oracle_stable(m), || format!("{t:?}: {:?}", m.to_json()))?;
        }
        checked += maps.len();
    }
    let (mut full, mut full_stable) = (0, 0);
    for t in TopType::all_with_norm_at_most(4) {
        let maps = enumerate_split_maps(t, &CAPS).map_err(|e| e.to_string())?;
        for m in &maps {
            ensure(is_stable(m) == oracle_stable(m), || format!("{t:?}: disagreement on {:?}", m.to_json()))?;
        }
        let stable = maps.iter().filter(|m| is_stable(m)).count();
        let direct = all.iter().find(|(u, _)| *u == t).map_or(0, |(_, v)| v.len());
        ensure(stable == direct, || format!("{t:?}: {stable} stable in the full enumeration, {direct} enumerated directly"))?;
        full += maps.len();
        full_stable += stable;
    }
    ensure(full == FULL_COUNT && full_stable == FULL_STABLE_COUNT, || {
        format!("full enumeration {full} ({full_stable} stable), frozen {FULL_COUNT} ({FULL_STABLE_COUNT})")
    })?;
    Ok(format!("{} maps agree ({checked} stable-enumerated, {full} unrestricted with |Γ| <= 4)", checked + full))
}

// Cycle rank of the glued graph by depth-first search plus vertex genera.
fn betti_oracle(eta: &AdmissibleTriple) -> i64 {
    let n1 = eta.graph1().vertices().len();
    let nv = n1 + eta.graph2().vertices().len();
    let mut adj = vec![Vec::new(); nv];
    for (a, b) in eta.graph1().roots().iter().zip(eta.graph2().roots()) {
        adj[a.vertex].push(n1 + b.vertex);
        adj[n1 + b.vertex].push(a.vertex);
    }
    let mut seen = vec![false; nv];
    let mut tree_edges = 0;
    let mut comps = 0;
    for start in 0..nv {
        if seen[start] {
            continue;
        }
        comps += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree_edges += 1;
                    stack.push(w);
                }
            }
        }
    }
    let edges = eta.r() as i64;
    let genera: i64 = eta.graph1().vertices().iter().chain(eta.graph2().vertices()).map(|v| v.genus as i64).sum();
    assert_eq!(comps, 1);
    edges - tree_edges + genera
}

fn factorial(r: usize) -> usize {
    (1..=r).product()
}

// 9. Degree of the gluing map.
fn degree_formula(all: &[(TopType, Vec<SplitMap>)]) -> Outcome {
    let triples = alphabet_triples(4);
    for eta in &triples {
        let eq = eq_group(eta, DEFAULT_EQ_BOUND).map_err(|e| e.to_string())?;
        let r = eta.r();
        ensure(is_subgroup(&eq, r) && factorial(r) % eq.len() == 0, || format!("Eq not a subgroup for {:?}", eta.to_json()))?;
        ensure(genus(eta) == betti_oracle(eta), || format!("genus {} vs oracle for {:?}", genus(eta), eta.to_json()))?;
        let m = realize(eta).map_err(|e| e.to_string())?;
        let c = DegreeCheck::compute(eta, &m, 1).map_err(|e| e.to_string())?;
        ensure(c.holds() && c.eq_order == eq.len(), || format!("{c:?} for {:?}", eta.to_json()))?;
    }
    let mut cuts = 0;
    for (_, maps) in all.iter().filter(|(t, _)| t.norm() <= 3) {
        for m in maps {
            for l in 1..=m.n() + 1 {
                let eta = half_types(m, l).map_err(|e| e.to_string())?;
                if eta.r() > 4 {
                    continue;
                }
                let c = DegreeCheck::compute(&eta, m, l).map_err(|e| e.to_string())?;
                ensure(c.holds(), || format!("l={l}: {c:?} on {:?}", m.to_json()))?;
                cuts += 1;
            }
        }
    }
    Ok(format!("{} alphabet triples with r <= 4, {cuts} cuts of enumerated maps with |Γ| <= 3", triples.len()))
}

// 10. Splice identities.
fn splice() -> Outcome {
    let mut count = 0;
    for n in 1..=4 {
        for l in 1..=n + 1 {
            let r = splice_check(n, l).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("n={n} l={l}: {:?}", r.failures()))?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs (n, l) with n <= 4"))
}

fn run(label: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let secs = t.elapsed().as_secs_f64();
    match res {
        Ok(msg) => {
            println!("PASS {label}: {msg} [{secs:.1}s]");
            true
        }
        Err(msg) => {
            println!("FAIL {label}: {msg} [{secs:.1}s]");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    ok &= run("1 atlas identities", atlas);
    ok &= run("2 resolution", resolution);
    ok &= run("3 normal forms", normal_forms);
    ok &= run("4 flat local forcing", forcing);
    ok &= run("5 universality", universality);
    ok &= run("6 base change", base_change);
    let all = stable_enumeration();
    ok &= run("7 norm identity", || norm_identity(&all));
    ok &= run("8 stability criterion", || stability(&all));
    ok &= run("9 degree formula", || degree_formula(&all));
    ok &= run("10 splice", splice);
    if !ok {
        std::process::exit(1);
    }
}
