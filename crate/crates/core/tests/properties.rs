use proptest::prelude::*;

use lipfree::free_space::{cascales_bounds, free_norm, free_norm_dual, FreeElement};
use lipfree::interpolation::{
    apply_s, apply_t, compute_m, compute_n, decide_interpolating, min_norm_interpolant, t_ratio,
};
use lipfree::lip::{mcshane_extend, LipFunction};
use lipfree::metric::{gen_random_instance, gen_random_tree, pairs_from_json, pairs_to_json, space_from_json, space_to_json};
use lipfree::{Backend, Options};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

/// Values vanishing at the base, drawn from a seed.
fn function(points: usize, raw: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = raw.iter().copied().cycle().take(points).collect();
    v[0] = 0.0;
    v
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn kr_duality(points in 2usize..10, seed in any::<u64>(), raw in prop::collection::vec(-3.0f64..3.0, 10)) {
        let (space, _) = gen_random_instance(points, 1, seed).unwrap();
        let mut c = raw[..points].to_vec();
        let mass: f64 = c.iter().sum();
        c[0] -= mass;
        let gamma = FreeElement::new(&space, c).unwrap();
        let primal = free_norm(&space, &gamma, Backend::Float).unwrap();
        let (dual, witness) = free_norm_dual(&space, &gamma, Backend::Float).unwrap();
        prop_assert!((primal - dual).abs() <= 1e-9 * primal.max(1.0));
        prop_assert!(witness.lip_norm(&space) <= 1.0 + 1e-9);
    }

    #[test]
    fn molecules_have_unit_norm(points in 2usize..9, seed in any::<u64>()) {
        let (space, pairs) = gen_random_instance(points, 1, seed).unwrap();
        let m = FreeElement::molecule(&space, pairs.get(0)).unwrap();
        prop_assert!((free_norm(&space, &m, Backend::Float).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn t_is_a_contraction_and_s_its_preadjoint(
        points in 2usize..9,
        npairs in 1usize..5,
        seed in any::<u64>(),
        raw in prop::collection::vec(-2.0f64..2.0, 9),
        lambda in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let (space, pairs) = gen_random_instance(points, npairs, seed).unwrap();
        let f = LipFunction::new(&space, function(points, &raw)).unwrap();
        prop_assert!(t_ratio(&space, &pairs, &f) <= 1.0 + 1e-12);
        let lambda = &lambda[..npairs];
        let tf = apply_t(&space, &pairs, &f);
        let pairing: f64 = tf.iter().zip(lambda).map(|(a, b)| a * b).sum();
        let s = apply_s(&space, &pairs, lambda).unwrap();
        prop_assert!((pairing - s.eval(&f)).abs() <= 1e-9);
        let l1: f64 = lambda.iter().map(|x| x.abs()).sum();
        prop_assert!(free_norm(&space, &s, Backend::Float).unwrap() <= l1 + 1e-9);
    }

    #[test]
    fn interpolant_round_trip(
        points in 3usize..9,
        npairs in 1usize..4,
        seed in any::<u64>(),
        alpha in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let (space, pairs) = gen_random_instance(points, npairs, seed).unwrap();
        prop_assume!(decide_interpolating(&space, &pairs).interpolating);
        let alpha = &alpha[..npairs];
        let r = min_norm_interpolant(&space, &pairs, alpha, Backend::Float).unwrap();
        for (got, want) in apply_t(&space, &pairs, &r.f).iter().zip(alpha) {
            prop_assert!((got - want).abs() <= 1e-9);
        }
        prop_assert!((r.f.lip_norm(&space) - r.norm).abs() <= 1e-9 * r.norm.max(1.0));
    }

    #[test]
    fn mcshane_preserves_values_and_constant(
        points in 3usize..10,
        seed in any::<u64>(),
        raw in prop::collection::vec(-2.0f64..2.0, 10),
    ) {
        let (space, _) = gen_random_instance(points, 1, seed).unwrap();
        let subset: Vec<usize> = (0..points).filter(|p| p % 2 == 1).collect();
        let g: Vec<f64> = subset.iter().map(|&p| raw[p]).collect();
        // Any values become Lipschitz once L is their own constant on the subset plus the base.
        let mut l: f64 = 0.0;
        let with_base: Vec<(usize, f64)> = std::iter::once((0, 0.0)).chain(subset.iter().copied().zip(g.iter().copied())).collect();
        for &(p, a) in &with_base {
            for &(q, b) in &with_base {
                if p != q {
                    l = l.max((a - b).abs() / space.dist(p, q));
                }
            }
        }
        let f = mcshane_extend(&space, &subset, &g, l).unwrap();
        for (&p, &v) in subset.iter().zip(&g) {
            prop_assert_eq!(f.at(p), v);
        }
        prop_assert!(f.lip_norm(&space) <= l * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn cascales_bounds_hold(points in 4usize..10, seed in any::<u64>()) {
        let (space, pairs) = gen_random_instance(points, 2, seed).unwrap();
        let b = cascales_bounds(&space, pairs.get(0), pairs.get(1), Backend::Float).unwrap();
        prop_assert!(b.rho <= b.upper + 1e-9);
        if b.lower_applicable {
            prop_assert!(b.lower <= b.rho + 1e-9);
        }
    }

    #[test]
    fn json_round_trip(points in 2usize..12, npairs in 1usize..6, seed in any::<u64>()) {
        let (space, pairs) = gen_random_instance(points, npairs, seed).unwrap();
        let back = space_from_json(&space_to_json(&space).unwrap()).unwrap();
        prop_assert_eq!(&back, &space);
        prop_assert_eq!(pairs_from_json(&pairs_to_json(&pairs), &back).unwrap(), pairs);
    }

    #[test]
    fn trees_are_interpolating(size in 2usize..13, seed in any::<u64>()) {
        let (space, edges) = gen_random_tree(size, seed).unwrap();
        let d = decide_interpolating(&space, &edges);
        prop_assert!(d.interpolating);
        prop_assert!(d.cycle_witness.is_none());
    }
}

proptest! {
    #![proptest_config(cases(32))]

    #[test]
    fn duality_and_execution_independence(points in 3usize..8, npairs in 1usize..5, seed in any::<u64>()) {
        let (space, pairs) = gen_random_instance(points, npairs, seed).unwrap();
        prop_assume!(decide_interpolating(&space, &pairs).interpolating);
        let par = Options::default();
        let seq = par.sequential();
        let m = compute_m(&space, &pairs, &par).unwrap();
        let n = compute_n(&space, &pairs, &par).unwrap();
        prop_assert!((m.value * n.value - 1.0).abs() <= 1e-6);
        let m_seq = compute_m(&space, &pairs, &seq).unwrap();
        prop_assert_eq!(m.value.to_bits(), m_seq.value.to_bits());
        prop_assert_eq!(m.witness, m_seq.witness);
        prop_assert_eq!(n.value.to_bits(), compute_n(&space, &pairs, &seq).unwrap().value.to_bits());
    }
}
