mod common;

use common::*;
use hycut::forms::SkeletonMode;
use hycut::geometry::{BackgroundGrid, CellKind, PartitionSpec, PolygonalPartition};
use hycut::harness::{fit_loglog, Config};
use proptest::prelude::*;

fn config() -> Config {
    Config::from_json(r#"{"partition": {"type": "two_halves", "interface_x": 0.5}, "degrees": {"bulk": 1}, "grids": [8]}"#).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cut_quadrature_matches_green(seed in any::<u64>(), k in 3usize..9, n in 3usize..12, order in 1usize..7) {
        let poly = random_star(k, &mut rng(seed));
        prop_assert!(quadrature_exactness_error(&poly, n, order) <= 1e-11);
    }

    #[test]
    fn active_meshes_cover_voronoi_partitions(seed in any::<u64>(), seeds in 2usize..10, n in 4usize..24) {
        let part = PolygonalPartition::build(&PartitionSpec::Voronoi { seeds, rng_seed: Some(seed) }).unwrap();
        prop_assert!(coverage_error(&part, &BackgroundGrid::unit_square(n, CellKind::Quad)) <= 1e-11);
    }

    #[test]
    fn active_meshes_cover_two_halves(x in 0.05f64..0.95, n in 3usize..24, tri in any::<bool>()) {
        let kind = if tri { CellKind::Triangle } else { CellKind::Quad };
        let part = PolygonalPartition::build(&PartitionSpec::TwoHalves { interface_x: x }).unwrap();
        prop_assert!(coverage_error(&part, &BackgroundGrid::unit_square(n, kind)) <= 1e-11);
    }

    #[test]
    fn cut_spaces_reproduce_polynomials(seed in any::<u64>(), p in 1usize..4, tri in any::<bool>(), n in 3usize..9, t in 0.01f64..0.99) {
        let kind = if tri { CellKind::Triangle } else { CellKind::Quad };
        let cut = 0.5 + t / n as f64;
        prop_assert!(reproduction_error(p, kind, n, cut, &mut rng(seed)) <= 1e-12);
    }

    #[test]
    fn stabilization_vanishes_on_polynomials(seed in any::<u64>(), p in 1usize..4, n in 4usize..10, t in 0.01f64..0.99) {
        let cut = 0.5 + t / n as f64;
        prop_assert!(stabilization_consistency_error(p, n, cut, &mut rng(seed)) <= 1e-11);
    }

    #[test]
    fn config_round_trips(n in 2usize..128, p in 1usize..5, seed in any::<u64>(), c in 0.0f64..10.0) {
        let mut cfg = config();
        cfg.grids = vec![n, 2 * n];
        cfg.degrees.bulk = p;
        cfg.seed = seed;
        cfg.params.c_scale = c;
        let back = Config::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn slope_of_exact_power_law(k in -4.0f64..4.0, c in 0.01f64..100.0, m in 3usize..8) {
        let h: Vec<f64> = (0..m).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
        let e: Vec<f64> = h.iter().map(|x| c * x.powf(k)).collect();
        prop_assert!((fit_loglog(&h, &e).unwrap() - k).abs() <= 1e-12);
    }
}

/// Penalty that keeps arbitrarily thin cut cells coercive with the default ghost penalty.
const SLIVER_BETA: f64 = 1e4;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn extension_is_bulk_orthogonal(seed in any::<u64>(), p in 1usize..3, t in 0.05f64..0.95, single in any::<bool>()) {
        let mode = if single { SkeletonMode::SingleElementInterfaces } else { SkeletonMode::GlobalBackgroundGrid };
        let sys = cut_system(8, p, 0.5 + t / 8.0, mode, Some(SLIVER_BETA));
        prop_assert!(orthogonality_error(&sys, &mut rng(seed)) <= 1e-10);
    }

    #[test]
    fn schur_complement_is_symmetric_positive(seed in any::<u64>(), p in 1usize..3, t in 0.05f64..0.95, single in any::<bool>()) {
        let mode = if single { SkeletonMode::SingleElementInterfaces } else { SkeletonMode::GlobalBackgroundGrid };
        let sys = cut_system(8, p, 0.5 + t / 8.0, mode, Some(SLIVER_BETA));
        let (defect, rq) = schur_symmetry_and_energy(&sys, &mut rng(seed));
        prop_assert!(defect <= 1e-10);
        prop_assert!(rq > 0.0);
    }
}
