use proptest::prelude::*;

use invsub::asymptotics::{derive_constants, stone_rho};
use invsub::integral_tests::{classify, Convergence, Horizon, TestFunctionSpec, Which};
use invsub::mittag_leffler::{ml_neg, MLConfig};
use invsub::path::{running_sup, CompositionSpec, GridPath, PathKind};
use invsub::rng::RngStream;
use invsub::smallball::{smallball_z_series, SmallBallSeriesConfig};
use invsub::stable::{StableParams, SubordinatorParams};
use invsub::stats::{ks_two_sample, Ecdf};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ml_is_completely_monotone_on_a_grid(beta in 0.1f64..1.0, z in 0.0f64..30.0, dz in 0.01f64..5.0) {
        let cfg = MLConfig::default();
        let a = ml_neg(beta, z, &cfg).unwrap();
        let b = ml_neg(beta, z + dz, &cfg).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn small_ball_is_a_distribution_function(beta in 0.2f64..0.9, u in 0.05f64..3.0, du in 0.01f64..1.0) {
        let cfg = SmallBallSeriesConfig::default();
        let a = smallball_z_series(beta, u, &cfg).unwrap();
        let b = smallball_z_series(beta, u + du, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn kappa_constants_are_reciprocal(alpha in 1.05f64..=2.0, beta in 0.05f64..0.95, chi in 0.1f64..10.0) {
        let d = derive_constants(alpha, beta, chi).unwrap();
        prop_assert!((d.kappa_paper * d.kappa_consistent - 1.0).abs() < 1e-12);
        prop_assert!(d.mu > 0.0);
    }

    #[test]
    fn brownian_rho_ignores_skewness(chi in 0.1f64..10.0, nu in -1.0f64..=1.0) {
        let r = stone_rho(2.0, chi, nu).unwrap();
        prop_assert!((r - 4.0 * chi * chi).abs() <= 1e-12 * r);
    }

    #[test]
    fn kolmogorov_verdict_is_monotone_in_a(a1 in 0.2f64..4.0, a2 in 0.2f64..4.0) {
        // larger f converges sooner
        let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        let v = |a| classify(Which::Kolmogorov, &TestFunctionSpec::LogLogPower { a }, 2.0, 0.5, 2.0, Horizon::Large).verdict;
        prop_assert!(!(v(lo) == Convergence::Converges && v(hi) == Convergence::Diverges));
    }

    #[test]
    fn ks_statistic_is_symmetric_and_bounded(
        a in prop::collection::vec(-10.0f64..10.0, 1..60),
        b in prop::collection::vec(-10.0f64..10.0, 1..60),
    ) {
        let (d1, p1) = ks_two_sample(&a, &b).unwrap();
        let (d2, _) = ks_two_sample(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&d1));
        prop_assert!((0.0..=1.0).contains(&p1));
        prop_assert_eq!(d1, d2);
    }

    #[test]
    fn ecdf_is_monotone(xs in prop::collection::vec(-5.0f64..5.0, 1..100), x in -6.0f64..6.0, dx in 0.0f64..2.0) {
        let e = Ecdf::new(&xs).unwrap();
        prop_assert!(e.eval(x) <= e.eval(x + dx));
    }

    #[test]
    fn running_sup_dominates(vals in prop::collection::vec(-3.0f64..3.0, 2..50)) {
        let n = vals.len();
        let times: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let p = GridPath::new(PathKind::PiecewiseLinear, times, vals.clone()).unwrap();
        let s = running_sup(&p);
        prop_assert!(s.is_nondecreasing());
        for (x, m) in vals.iter().zip(s.values()) {
            prop_assert!(m >= x);
        }
    }

    #[test]
    fn same_stream_same_path(seed in any::<u64>(), i in 0usize..1000, beta in 0.2f64..0.9) {
        let spec = CompositionSpec::new(StableParams::brownian(2.0).unwrap(), SubordinatorParams::standard(beta).unwrap(), 1.0, 33).unwrap();
        let a = invsub::path::compose_z(&spec, RngStream::for_path(seed, i)).unwrap();
        let b = invsub::path::compose_z(&spec, RngStream::for_path(seed, i)).unwrap();
        prop_assert_eq!(a.z.values(), b.z.values());
        prop_assert!(a.e.is_nondecreasing());
        prop_assert_eq!(a.e.values()[0], 0.0);
    }
}
