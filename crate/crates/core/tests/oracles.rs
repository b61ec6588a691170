//! Pinned values, each checked against an oracle that does not share the
//! code path under test: closed forms on trees and lines, hand-solved
//! three-point programs, and the exact rational solver.

use lipfree::beurling::{
    beurling_optimal_norm, compute_m_vector, construct_beurling_clusters, construct_beurling_tree,
    matching_diagnostic, verify_beurling, NormKind,
};
use lipfree::free_space::{free_norm, free_norm_dual, molecular_distance, optimal_decomposition, FreeElement};
use lipfree::interpolation::{
    compute_m, compute_n, decide_interpolating, min_norm_interpolant, separation_constant, stability_radius,
};
use lipfree::lip::mcshane_extend;
use lipfree::metric::{gen_ex1_clusters, gen_random_instance, gen_random_tree, graph_metric, PairSet, PointedMetricSpace};
use lipfree::solver::{ratio, solve_exact, LinearProgram, Relation, Sense, Status};
use lipfree::{Backend, Options};

fn line(n: usize) -> PointedMetricSpace {
    let d = (0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect();
    PointedMetricSpace::new(d, 0).unwrap()
}

fn equilateral() -> (PointedMetricSpace, PairSet) {
    let s = PointedMetricSpace::equilateral(3).unwrap();
    let p = PairSet::new(&s, vec![(1, 0), (2, 0)]).unwrap();
    (s, p)
}

/// On a tree the transport cost is `Σ_e w_e |mass below e|`.
fn tree_norm(space: &PointedMetricSpace, edges: &PairSet, coeffs: &[f64]) -> f64 {
    let mut below = coeffs.to_vec();
    let mut total = 0.0;
    // Children carry larger indices than their parents in the generated trees.
    for &(child, parent) in edges.pairs().iter().rev() {
        total += space.dist(child, parent) * below[child].abs();
        below[parent] += below[child];
    }
    total
}

#[test]
fn tree_transport_closed_form() {
    for seed in 0..40 {
        let (space, edges) = gen_random_tree(3 + (seed as usize % 8), seed).unwrap();
        let n = space.len();
        let mut coeffs: Vec<f64> = (0..n).map(|i| ((i * 37 + seed as usize * 11) % 13) as f64 - 6.0).collect();
        let mass: f64 = coeffs.iter().sum();
        coeffs[0] -= mass;
        let gamma = FreeElement::new(&space, coeffs.clone()).unwrap();
        let expected = tree_norm(&space, &edges, &coeffs);
        let float = free_norm(&space, &gamma, Backend::Float).unwrap();
        assert!((float - expected).abs() <= 1e-9 * expected.max(1.0), "seed {seed}: {float} vs {expected}");
        let (dual, _) = free_norm_dual(&space, &gamma, Backend::Float).unwrap();
        assert!((dual - expected).abs() <= 1e-9 * expected.max(1.0));
    }
}

#[test]
fn line_split_mass() {
    let s = line(3);
    let gamma = FreeElement::new(&s, vec![-0.5, 1.0, -0.5]).unwrap();
    for backend in [Backend::Float, Backend::Exact] {
        assert_eq!(free_norm(&s, &gamma, backend).unwrap(), 1.0);
    }
    let dec = optimal_decomposition(&s, &gamma, Backend::Exact).unwrap();
    let terms: Vec<(f64, [usize; 2])> = dec.terms.iter().map(|t| (t.lambda, t.pair)).collect();
    assert_eq!(terms, vec![(0.5, [1, 0]), (0.5, [1, 2])]);
    assert_eq!(dec.total, 1.0);
}

#[test]
fn mcshane_on_the_line() {
    let f = mcshane_extend(&line(3), &[0, 2], &[0.0, 2.0], 1.0).unwrap();
    assert_eq!(f.values(), &[0.0, 1.0, 2.0]);
}

#[test]
fn exact_solver_reproduces_hand_solution() {
    // min t subject to t + u ≥ 1 and t ≥ u: the optimum is t = u = ½.
    let mut lp = LinearProgram::new(Sense::Minimize);
    let t = lp.nonneg_var(ratio(1, 1));
    let u = lp.nonneg_var(ratio(0, 1));
    lp.add_constraint(vec![(t, ratio(1, 1)), (u, ratio(1, 1))], Relation::Ge, ratio(1, 1));
    lp.add_constraint(vec![(t, ratio(1, 1)), (u, ratio(-1, 1))], Relation::Ge, ratio(0, 1));
    let res = solve_exact(&lp).unwrap();
    assert_eq!(res.status, Status::Optimal);
    assert_eq!(res.value, ratio(1, 2));
}

#[test]
fn equilateral_exact_values() {
    let (s, p) = equilateral();
    let exact = Options::exact();
    let m = compute_m(&s, &p, &exact).unwrap();
    assert_eq!(m.value, 2.0);
    assert_eq!(m.witness, vec![1.0, -1.0]);
    let n = compute_n(&s, &p, &exact).unwrap();
    assert_eq!(n.value, 0.5);
    assert_eq!(n.witness, vec![0.5, -0.5]);
    assert_eq!(separation_constant(&s, &p, &exact).unwrap(), 1.0);
    assert_eq!(stability_radius(&s, &p, &exact).unwrap(), 0.5);
    assert_eq!(molecular_distance(&s, (1, 0), (2, 0), Backend::Exact).unwrap(), 1.0);
    assert_eq!(min_norm_interpolant(&s, &p, &[1.0, -1.0], Backend::Exact).unwrap().norm, 2.0);
    let opt = beurling_optimal_norm(&s, &p, Backend::Exact).unwrap();
    assert_eq!(opt.t_star, 2.0);
    assert_eq!(opt.family.values(), vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    for norm in [NormKind::L1, NormKind::Linf] {
        assert_eq!(compute_m_vector(&s, &p, 2, norm, &exact).unwrap().value, 2.0);
    }
}

#[test]
fn path_pairs() {
    let s = line(3);
    let p = PairSet::new(&s, vec![(1, 0), (2, 1)]).unwrap();
    assert_eq!(compute_m(&s, &p, &Options::exact()).unwrap().value, 1.0);
    let fam = construct_beurling_tree(&s, &p).unwrap();
    assert_eq!(fam.values(), vec![vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 1.0]]);
}

/// For a spanning tree the inverse of `T` is the tree family, so `M` is its
/// Beurling sum and the optimal Beurling norm coincides with it.
#[test]
fn trees_constant_is_family_sum() {
    for seed in 0..25 {
        let (space, edges) = gen_random_tree(2 + (seed as usize % 5), 100 + seed).unwrap();
        let fam = construct_beurling_tree(&space, &edges).unwrap();
        let m = compute_m(&space, &edges, &Options::exact()).unwrap().value;
        assert!((m - fam.sup_sum.max(1.0)).abs() < 1e-9, "seed {seed}: {m} vs {}", fam.sup_sum);
        let t = beurling_optimal_norm(&space, &edges, Backend::Float).unwrap().t_star;
        assert!((t - m).abs() < 1e-6);
        assert!(verify_beurling(&space, &edges, &fam, m).unwrap().ok);
    }
}

#[test]
fn crossing_pairs_on_a_line() {
    let s = line(4);
    let p = PairSet::new(&s, vec![(3, 1), (2, 0)]).unwrap();
    let r = matching_diagnostic(&s, &p, &Options::default()).unwrap();
    assert!(!r.is_min_matching);
    assert_eq!((r.pair_cost, r.min_cost), (4.0, 2.0));
    // ½m₃₁ − ½m₂₀ = ¼(δ₃ − δ₁ − δ₂ + δ₀) costs ½ to transport.
    let n = compute_n(&s, &p, &Options::exact()).unwrap().value;
    assert_eq!(n, 0.5);
}

#[test]
fn cluster_family_is_beurling() {
    for clusters in 1..=4 {
        let (s, p, cfg) = gen_ex1_clusters(clusters, 1.0).unwrap();
        assert_eq!(compute_m(&s, &p, &Options::exact()).unwrap().value, 1.0);
        let fam = construct_beurling_clusters(&s, &p, &cfg).unwrap();
        assert!(verify_beurling(&s, &p, &fam, 1.0).unwrap().ok);
    }
}

#[test]
fn graph_metric_is_shortest_path() {
    // Square with a long diagonal: the diagonal is replaced by the two-edge path.
    let s = graph_metric(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], &[1.0, 1.0, 1.0, 1.0, 5.0]).unwrap();
    assert_eq!(s.dist(0, 2), 2.0);
    assert_eq!(s.dist(1, 3), 2.0);
}

#[test]
fn float_agrees_with_exact_on_desk_suite() {
    let mut checked = 0;
    for seed in 0..60 {
        let (s, p) = gen_random_instance(3 + (seed as usize % 6), 1 + (seed as usize % 4), seed).unwrap();
        if !decide_interpolating(&s, &p).interpolating {
            continue;
        }
        let [mf, nf] = [compute_m(&s, &p, &Options::default()).unwrap().value, compute_n(&s, &p, &Options::default()).unwrap().value];
        let [me, ne] = [compute_m(&s, &p, &Options::exact()).unwrap().value, compute_n(&s, &p, &Options::exact()).unwrap().value];
        assert!((mf - me).abs() <= 1e-9 * me && (nf - ne).abs() <= 1e-9, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 20);
}
