use covtest_core::covmodels::CovarianceModel;
use covtest_core::sampling::sample;
use covtest_core::statistics::{statistic, StatKind};
use covtest_core::testing::{
    build_grid, fixed_threshold, level_threshold, test_adaptive, test_at_bandwidth, ThresholdSpec,
};
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = StatKind> {
    prop_oneof![Just(StatKind::General), Just(StatKind::Toeplitz)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn raising_threshold_never_creates_rejection(
        seed in any::<u64>(),
        kind in kind_strategy(),
        m in 1usize..8,
        t in -1e-2f64..1e-2,
        bump in 0.0f64..1e-2,
    ) {
        let s = sample(&CovarianceModel::identity(12).unwrap(), 8, 0.8, seed).unwrap();
        let low = test_at_bandwidth(&s, kind, m, t).unwrap().reject;
        let high = test_at_bandwidth(&s, kind, m, t + bump).unwrap().reject;
        prop_assert!(low || !high);
    }

    #[test]
    fn adaptive_rejects_when_a_grid_level_rejects(seed in any::<u64>(), kind in kind_strategy()) {
        let (n, p, a) = (60, 256, 0.9);
        let grid = build_grid(0.75, None, a, n, p, 4.5, kind).unwrap();
        let s = sample(&CovarianceModel::toeplitz(&{
            let mut row = vec![0.0; p];
            row[0] = 1.0;
            row[2] = 0.15;
            row[3] = -0.15;
            row
        }).unwrap(), n, a, seed).unwrap();
        let ad = test_adaptive(&s, &grid).unwrap();
        for (&l, &t) in grid.levels.iter().zip(&grid.thresholds) {
            if test_at_bandwidth(&s, kind, 1 << l, t).unwrap().reject {
                prop_assert!(ad.reject);
            }
        }
    }

    #[test]
    fn theory_threshold_scales_with_a_to_the_fourth(
        a in 0.05f64..0.5,
        kappa in 1.0f64..2.0,
        alpha in 0.5f64..3.0,
        phi in 0.01f64..0.5,
    ) {
        let spec = ThresholdSpec::theory(0.1);
        let t = fixed_threshold(&spec, StatKind::General, alpha, phi, kappa * a, 50, 100, 4).unwrap();
        let want = 0.1 * (kappa * a).powi(4) * phi.powf(2.0 + 1.0 / (2.0 * alpha));
        prop_assert!((t - want).abs() <= 1e-15 * want.abs());
    }

    #[test]
    fn grid_bandwidths_fit_and_thresholds_match(
        n in 50usize..2000,
        logp in 8u32..12,
        a in 0.3f64..1.0,
        kind in kind_strategy(),
    ) {
        let p = 1usize << logp;
        if let Ok(grid) = build_grid(1.0, None, a, n, p, 4.5, kind) {
            for (&l, &t) in grid.levels.iter().zip(&grid.thresholds) {
                prop_assert!((1usize << l) < p);
                let denom = match kind {
                    StatKind::General => n as f64 * (p as f64).sqrt(),
                    StatKind::Toeplitz => n as f64 * (p - (1 << l)) as f64,
                };
                let closed = a * a * (4.5 * (l as f64).ln()).sqrt() / denom;
                prop_assert!((t - closed).abs() <= 1e-15 * closed);
                prop_assert_eq!(t, level_threshold(kind, 4.5, l, a, n, p));
            }
        }
    }
}

#[test]
fn fixed_statistic_matches_outcome() {
    let s = sample(&CovarianceModel::identity(30).unwrap(), 20, 0.7, 3).unwrap();
    let o = test_at_bandwidth(&s, StatKind::General, 5, 0.0).unwrap();
    assert_eq!(o.statistic, statistic(StatKind::General, &s, 5).unwrap());
    assert_eq!(o.reject, o.statistic.value > 0.0);
}
