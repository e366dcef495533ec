mod common;

use ripsnet::complex::{
    betti_exact, build_rips, laplacian1, power_iteration, rank_test_with_retry, PowerConfig,
    RipsComplex, Verdict,
};
use ripsnet::runtime::distributed_power_iteration;

#[test]
fn square_radius_matches_dense_oracle() {
    let l = laplacian1(&build_rips(&common::cycle_graph(4))).unwrap();
    let top = *common::eigenvalues(&l).last().unwrap();
    assert!((top - 4.0).abs() < 1e-9);
    let out = power_iteration(&l, None, &PowerConfig::default());
    assert!(out.converged());
    assert!((out.value() - top).abs() / top < 1e-6);
}

#[test]
fn centralized_radius_matches_dense_oracle_on_small_matrices() {
    let mut checked = 0;
    for seed in 0..200 {
        let g = common::unit_disk(12, 0.4, seed);
        let x = build_rips(&g);
        if x.edges().is_empty() || x.edges().len() > 20 {
            continue;
        }
        let l = laplacian1(&x).unwrap();
        let top = *common::eigenvalues(&l).last().unwrap();
        // accuracy is the contract here, not the iteration budget
        let cfg = PowerConfig {
            seed,
            max_iters: Some(1_000_000),
            ..PowerConfig::default()
        };
        let out = power_iteration(&l, None, &cfg);
        assert!(out.converged(), "seed {seed}");
        assert!(
            (out.value() - top).abs() / top < 1e-6,
            "seed {seed}: {} vs {top}",
            out.value()
        );
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} matrices of size <= 20");
}

#[test]
fn distributed_matches_centralized() {
    let mut checked = 0;
    for seed in 0..40 {
        let g = common::unit_disk(25, 0.3, seed);
        let part = g.components().into_iter().max_by_key(|c| c.len()).unwrap();
        let x = RipsComplex::induced(&g, &part);
        if x.edges().is_empty() {
            continue;
        }
        let l = laplacian1(&x).unwrap();
        let cfg = PowerConfig {
            seed,
            ..PowerConfig::default()
        };
        let c = power_iteration(&l, None, &cfg);
        let d = distributed_power_iteration(&g, &part, &l, None, &cfg).unwrap();
        assert_eq!(c.iterations(), d.outcome.iterations());
        assert!(
            (c.value() - d.outcome.value()).abs() <= 1e-9 * c.value().abs().max(1e-300),
            "seed {seed}"
        );
        let shifted_c = power_iteration(&l, Some(c.value()), &cfg);
        let shifted_d = distributed_power_iteration(&g, &part, &l, Some(c.value()), &cfg).unwrap();
        assert!(
            (shifted_c.value() - shifted_d.outcome.value()).abs()
                <= 1e-9 * shifted_c.value().abs().max(1e-12)
        );
        checked += 1;
    }
    assert!(checked >= 30);
}

#[test]
fn rank_test_agrees_with_exact_homology() {
    let mut disagreements = Vec::new();
    for seed in 0..60 {
        let g = common::unit_disk(30, 0.3, 1000 + seed);
        let x = build_rips(&g);
        if x.edges().is_empty() {
            continue;
        }
        let l = laplacian1(&x).unwrap();
        let (v, _) = rank_test_with_retry(
            &l,
            1e-6,
            &PowerConfig {
                seed,
                ..PowerConfig::default()
            },
            100,
        );
        let holes = betti_exact(&x).b1 >= 1;
        if v.verdict == Verdict::Inconclusive || (v.verdict == Verdict::Deficient) != holes {
            // only a nearly singular spectrum may fool the test
            let ev = common::eigenvalues(&l);
            let top = *ev.last().unwrap();
            let smallest_positive = ev.iter().copied().find(|&e| e > 1e-9).unwrap_or(0.0);
            disagreements.push((seed, smallest_positive / top));
        }
    }
    assert!(
        disagreements.iter().all(|&(_, r)| r < 1e-6),
        "{disagreements:?}"
    );
}
