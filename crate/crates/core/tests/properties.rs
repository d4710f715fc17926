use std::sync::Arc;

use degkit::combgraphs::*;
use degkit::contact::*;
use degkit::exactalg::*;
use degkit::poly::{parse_poly, Poly};
use degkit::ratmaps::Fraction;
use degkit::{parse_q, q, qf, render_q};
use proptest::prelude::*;

fn alg() -> Arc<TruncatedAlgebra> {
    TruncatedAlgebra::parse(&["s", "c"], &["c^2"], 5).unwrap()
}

fn element(a: &Arc<TruncatedAlgebra>, coeffs: &[i64]) -> AlgebraElement {
    let p = Poly::from_terms(
        2,
        coeffs.iter().enumerate().map(|(i, &c)| (vec![(i / 2) as u32, (i % 2) as u32], q(c))),
    );
    AlgebraElement::from_poly(a, &p)
}

fn series(ring: &Arc<NodeRing>, a0: &[i64], z1: &[Vec<i64>], z2: &[Vec<i64>]) -> NodeSeries {
    let a = ring.algebra();
    let m = ring.order();
    let tail = |v: &[Vec<i64>]| (0..m - 1).map(|i| v.get(i).map_or(AlgebraElement::zero(a), |c| element(a, c))).collect();
    NodeSeries::from_parts(ring, element(a, a0), tail(z1), tail(z2)).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 0..5)
}

fn series_parts() -> impl Strategy<Value = (Vec<i64>, Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    (coeffs(), prop::collection::vec(coeffs(), 0..4), prop::collection::vec(coeffs(), 0..4))
}

fn perm(r: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..r).collect::<Vec<_>>()).prop_shuffle()
}

fn triple_and_perm() -> impl Strategy<Value = (AdmissibleTriple, Vec<usize>)> {
    let triples = alphabet_triples(3);
    prop::sample::select(triples).prop_flat_map(|t| {
        let r = t.r();
        (Just(t), perm(r))
    })
}

proptest! {
    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let x = qf(n, d);
        prop_assert_eq!(parse_q(&render_q(&x)), Some(x));
    }

    #[test]
    fn polynomial_render_parses_back(c in prop::collection::vec(-5i64..=5, 1..8)) {
        let names: Vec<String> = vec!["x".into(), "y".into()];
        let p = Poly::from_terms(2, c.iter().enumerate().map(|(i, &k)| (vec![i as u32 % 3, i as u32 / 3], q(k))));
        let back = parse_poly(&p.render(&names), &names).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn fraction_arithmetic_is_consistent(a in coeffs(), b in coeffs()) {
        let pa = Poly::from_terms(2, a.iter().enumerate().map(|(i, &k)| (vec![i as u32, 1], q(k))));
        let pb = Poly::from_terms(2, b.iter().enumerate().map(|(i, &k)| (vec![1, i as u32], q(k))));
        let fa = Fraction::poly(pa);
        let fb = Fraction::poly(&pb + &Poly::one(2));
        if let Ok(quot) = fa.div(&fb) {
            prop_assert!(quot.mul(&fb).same_function(&fa));
        }
        prop_assert!(fa.add(&fa.neg()).is_zero());
    }

    #[test]
    fn node_ring_axioms(x in series_parts(), y in series_parts(), z in series_parts()) {
        let ring = NodeRing::new(&alg(), 5).unwrap();
        let x = series(&ring, &x.0, &x.1, &x.2);
        let y = series(&ring, &y.0, &y.1, &y.2);
        let z = series(&ring, &z.0, &z.1, &z.2);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(NodeSeries::from_vector(&ring, &x.to_vector()).unwrap(), x.clone());
        prop_assert_eq!(x.swap().swap(), x.clone());
        prop_assert_eq!((&x * &y).swap(), &x.swap() * &y.swap());
    }

    #[test]
    fn units_invert(x in series_parts(), lead in 1i64..5) {
        let ring = NodeRing::new(&alg(), 5).unwrap();
        let mut a0 = x.0.clone();
        if a0.is_empty() { a0.push(0); }
        a0[0] = lead;
        let u = series(&ring, &a0, &x.1, &x.2);
        let inv = u.inverse().unwrap();
        prop_assert_eq!(&u * &inv, NodeSeries::one(&ring));
    }

    #[test]
    fn pure_form_is_detected(x in series_parts(), lead in 1i64..4, e in coeffs(), n in 1usize..3) {
        let a = alg();
        let ring = NodeRing::new(&a, 5).unwrap();
        let mut a0 = x.0.clone();
        if a0.is_empty() { a0.push(0); }
        a0[0] = lead;
        let beta = series(&ring, &a0, &x.1, &x.2);
        let mut ec = e.clone();
        if ec.is_empty() { ec.push(0); }
        ec[0] = 2;
        let eps = element(&a, &ec);
        let phi1 = &beta * &NodeSeries::z1(&ring).pow(n as u32);
        let phi2 = (&beta.inverse().unwrap() * &NodeSeries::z2(&ring).pow(n as u32)).scale(&eps);
        let psi = &AlgebraElement::s(&a).pow(n as u32) * &eps;
        let d = ContactData::new(phi1.clone(), phi2.clone(), psi.clone()).unwrap();
        let r = check_pure_contact(&d, n).unwrap();
        prop_assert!(r.pure);
        prop_assert_eq!(r.orientation, Some(Orientation::Standard));
        prop_assert!(predeformability_ideal(&d, n).unwrap().is_zero());
        // exchanging branches and variables together keeps the standard form
        prop_assert_eq!(check_pure_contact(&d.swap(), n).unwrap().orientation, Some(Orientation::Standard));
        // exchanging only the variables needs the other orientation
        let z = ContactData::new(phi1.swap(), phi2.swap(), psi).unwrap();
        let r = check_pure_contact(&z, n).unwrap();
        prop_assert!(r.pure);
        prop_assert_eq!(r.orientation, Some(Orientation::Swapped));
    }

    #[test]
    fn permutation_algebra(a in perm(5), b in perm(5), c in perm(5)) {
        prop_assert_eq!(compose(&compose(&a, &b), &c), compose(&a, &compose(&b, &c)));
        prop_assert_eq!(compose(&a, &invert(&a)), (0..5).collect::<Vec<_>>());
        prop_assert_eq!(invert(&compose(&a, &b)), compose(&invert(&b), &invert(&a)));
    }

    #[test]
    fn eq_group_is_a_subgroup((eta, sigma) in triple_and_perm()) {
        let g = eq_group(&eta, DEFAULT_EQ_BOUND).unwrap();
        prop_assert!(is_subgroup(&g, eta.r()));
        // reordering conjugates the symmetry group
        let moved = eta.reorder(&sigma);
        let g2 = eq_group(&moved, DEFAULT_EQ_BOUND).unwrap();
        prop_assert_eq!(g.len(), g2.len());
        for p in &g {
            let conj = compose(&compose(&sigma, p), &invert(&sigma));
            prop_assert!(g2.contains(&conj));
        }
        prop_assert_eq!(genus(&eta), genus(&moved));
        prop_assert!(eta.equivalent(&moved));
    }

    #[test]
    fn reorder_composes(idx in any::<prop::sample::Index>(), a in perm(3), b in perm(3)) {
        let triples: Vec<AdmissibleTriple> = alphabet_triples(3).into_iter().filter(|t| t.r() == 3).collect();
        let eta = &triples[idx.index(triples.len())];
        prop_assert_eq!(eta.reorder(&a).reorder(&b), eta.reorder(&compose(&b, &a)));
    }

    #[test]
    fn split_maps_cut_and_glue(b in 0u32..3, g in 0u32..2, k in 0u32..3, idx in any::<prop::sample::Index>()) {
        let t = TopType::new(b, g, k);
        prop_assume!((1..=3).contains(&t.norm()));
        let caps = EnumCaps { max_weight: 2, max_pieces_per_group: 2, max_nodes_per_interface: 2, bound: 6 };
        let maps = enumerate_split_maps(t, &caps).unwrap();
        prop_assume!(!maps.is_empty());
        let m = &maps[idx.index(maps.len())];
        prop_assert!(verify_norm_identity(m));
        prop_assert_eq!(m.total_type(), t);
        for l in 1..=m.n() + 1 {
            let (h1, h2, sigma) = decompose(m, l).unwrap();
            prop_assert_eq!(&glue_halves(&h1, &h2).unwrap(), m);
            let eta = half_types(m, l).unwrap();
            prop_assert_eq!(eta.r(), sigma.len());
            prop_assert_eq!(topo_type(&eta), Some(t));
        }
        if is_stable(m) {
            let a = ample_weights(m).unwrap();
            prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn collapsing_preserves_type(b in 1u32..3, k in 0u32..3, idx in any::<prop::sample::Index>()) {
        let t = TopType::new(b, 0, k);
        prop_assume!((1..=3).contains(&t.norm()));
        let caps = EnumCaps { max_weight: 2, max_pieces_per_group: 2, max_nodes_per_interface: 2, bound: 6 };
        let maps: Vec<SplitMap> = enumerate_split_maps(t, &caps).unwrap().into_iter().filter(|m| m.n() >= 1).collect();
        prop_assume!(!maps.is_empty());
        let fine = &maps[idx.index(maps.len())];
        // merge the first two groups
        let mut assignment = vec![1usize, 1];
        assignment.extend(2..=fine.n() + 1);
        let coarse = collapse(fine, &assignment).unwrap();
        prop_assert_eq!(coarse.total_type(), t);
        prop_assert!(specialization_sum_check(&coarse, fine, &assignment).unwrap());
    }
}
