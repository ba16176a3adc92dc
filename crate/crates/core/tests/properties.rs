use greysim::density::ConstantFieldLaw;
use greysim::fbm::{fbm_covariance, SamplePath, TimeGrid};
use greysim::harness::config::{ExperimentConfig, Suite};
use greysim::report::{reports_from_json, reports_to_json, RunReport, ToleranceRule};
use greysim::rng::MonteCarlo;
use greysim::sde::fields::BuiltinField;
use greysim::specfun::{mittag_leffler, GreyParams};
use greysim::young::young_integral;
use proptest::prelude::*;
use rand::Rng;

fn params() -> impl Strategy<Value = GreyParams> {
    (0.05f64..1.95, 0.05f64..1.0).prop_map(|(a, b)| GreyParams::new(a, b).unwrap())
}

fn rule() -> impl Strategy<Value = ToleranceRule> {
    prop_oneof![
        (0.5f64..6.0).prop_map(ToleranceRule::WithinSe),
        (0.0f64..1.0).prop_map(ToleranceRule::Abs),
        (0.0f64..1.0).prop_map(ToleranceRule::Rel),
        Just(ToleranceRule::AtMost),
        Just(ToleranceRule::AtLeast),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn config_roundtrip(
        p in params(),
        horizon in 0.1f64..5.0,
        steps in 1usize..5000,
        seed in any::<u64>(),
        streams in 1usize..64,
        delta in 0.51f64..0.99,
        sigma in 0.1f64..3.0,
        drift in -2.0f64..2.0,
        geometric in any::<bool>(),
        suites in prop::sample::subsequence(Suite::EACH.to_vec(), 1..5),
    ) {
        let mut cfg = ExperimentConfig::new(p);
        cfg.grid.horizon = horizon;
        cfg.grid.steps = steps;
        cfg.run.seed = seed;
        cfg.run.streams = streams;
        cfg.run.delta = delta;
        cfg.field = if geometric {
            BuiltinField::Geometric { a: drift, radius: sigma * 10.0 }
        } else {
            BuiltinField::constant_scalar(sigma, drift)
        };
        cfg.checks.suites = suites;
        let text = cfg.to_toml().unwrap();
        prop_assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn pass_is_a_function_of_the_recorded_numbers(
        stat in -10.0f64..10.0,
        theo in -10.0f64..10.0,
        se in prop::option::of(0.0f64..3.0),
        rule in rule(),
    ) {
        let r = RunReport::new("x", stat, theo, se, rule).with_run(3, 4);
        let back = reports_from_json(&reports_to_json(&[r.clone()]).unwrap()).unwrap();
        prop_assert_eq!(back[0].pass, r.pass);
        prop_assert_eq!(back[0].recomputed_pass(), r.pass);
    }

    #[test]
    fn monte_carlo_is_deterministic(seed in any::<u64>(), streams in 1usize..9, total in 0usize..300) {
        let mc = MonteCarlo::new(seed, streams);
        let draw = || mc.shards(total, |rng, n| (0..n).map(|_| rng.random::<u64>()).collect::<Vec<_>>());
        let a = draw();
        prop_assert_eq!(a.len(), total);
        prop_assert_eq!(a, draw());
    }

    #[test]
    fn young_sum_is_bilinear(
        f in prop::collection::vec(-3.0f64..3.0, 9),
        g in prop::collection::vec(-3.0f64..3.0, 9),
        h in prop::collection::vec(-3.0f64..3.0, 9),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let grid = TimeGrid::new(1.0, 8).unwrap();
        let mix: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
        let lhs = young_integral(&grid, &mix, &g).unwrap().value;
        let rhs = a * young_integral(&grid, &f, &g).unwrap().value + b * young_integral(&grid, &h, &g).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        let mixg: Vec<f64> = g.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
        let lhs = young_integral(&grid, &f, &mixg).unwrap().value;
        let rhs = a * young_integral(&grid, &f, &g).unwrap().value + b * young_integral(&grid, &f, &h).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn fbm_covariance_is_symmetric_and_self_similar(h in 0.05f64..0.95, t in 0.01f64..3.0, s in 0.01f64..3.0, c in 0.1f64..4.0) {
        prop_assert!((fbm_covariance(h, t, s) - fbm_covariance(h, s, t)).abs() < 1e-14);
        let scaled = fbm_covariance(h, c * t, c * s);
        prop_assert!((scaled - c.powf(2.0 * h) * fbm_covariance(h, t, s)).abs() < 1e-10 * (1.0 + scaled.abs()));
    }

    #[test]
    fn mittag_leffler_one_is_exp(x in -30.0f64..=0.0) {
        let v = mittag_leffler(1.0, x).unwrap();
        prop_assert!((v - x.exp()).abs() <= 1e-12 * x.exp().max(1e-300) + 1e-300);
    }

    #[test]
    fn subsampled_path_keeps_endpoints(values in prop::collection::vec(-5.0f64..5.0, 17)) {
        let p = SamplePath::from_scalar(TimeGrid::new(2.0, 16).unwrap(), values.clone()).unwrap();
        let q = p.subsample(4).unwrap();
        prop_assert_eq!(q.len(), 5);
        prop_assert_eq!(q.terminal(), p.terminal());
        prop_assert_eq!(q.row(1)[0], values[4]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mixture_density_is_positive(p in params(), z in -8.0f64..8.0, sigma in 0.3f64..2.0) {
        let law = ConstantFieldLaw::new(p, &[vec![sigma]], &[0.0], &[0.0], 1.0).unwrap();
        let sd = sigma * (2.0f64).sqrt();
        prop_assert!(law.density(&[z * sd]).unwrap() > 0.0);
    }
}
