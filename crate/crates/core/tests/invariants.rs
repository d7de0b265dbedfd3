use leomec::analysis::{analyze, AnalysisOptions, NetworkVariant};
use leomec::geometry::{contact_cdf_nearest_sat, contact_cdf_serving_sat_uplink, horizon, nearest_cs_cdf};
use leomec::montecarlo::wilson;
use leomec::params::{split_satellites, ConfigDocument, ConstellationGeometry, REFERENCE_TOML};
use leomec::queueing::{mean_jobs_in_system, offload_probability};
use leomec::report::float17;
use proptest::prelude::*;

proptest! {
    #[test]
    fn offload_probability_bounds_and_monotonicity(rho in 0.01f64..5.0, buffer in 1u32..20) {
        let p = offload_probability(rho, buffer);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(offload_probability(rho * 1.1, buffer) <= p + 1e-15);
        prop_assert!(offload_probability(rho, buffer + 1) >= p - 1e-15);
        let q = mean_jobs_in_system(rho, buffer);
        prop_assert!(q >= 0.0 && q <= buffer as f64 + 1e-12);
    }

    #[test]
    fn satellite_contact_cdfs_are_distributions(
        altitude_km in 300.0f64..2000.0,
        n in 1.0f64..3000.0,
        fracs in prop::collection::vec(0.0f64..1.0, 2..20),
    ) {
        let g = ConstellationGeometry::new(6371e3, altitude_km * 1e3, 1000).unwrap();
        let h = horizon(&g);
        let mut xs: Vec<f64> = fracs.iter().map(|f| g.altitude() + f * (h.d_max_up - g.altitude())).collect();
        xs.sort_by(f64::total_cmp);
        let down: Vec<f64> = xs.iter().map(|&x| contact_cdf_nearest_sat(x, n, &g)).collect();
        let up: Vec<f64> = xs.iter().map(|&x| contact_cdf_serving_sat_uplink(x, &g)).collect();
        for c in [&down, &up] {
            prop_assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!(c.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn server_contact_cdf_is_a_distribution(lambda in 1e-8f64..1e-4, x in 0.0f64..1e5, dx in 0.0f64..1e4) {
        let a = nearest_cs_cdf(x, lambda);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(nearest_cs_cdf(x + dx, lambda) >= a);
    }

    #[test]
    fn satellite_split_is_exact(total in 1u32..20_000, weights in prop::collection::vec(0.01f64..1.0, 1..6)) {
        let s: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / s).collect();
        let split = split_satellites(total, &probs);
        prop_assert_eq!(split.iter().sum::<u32>(), total);
        for (k, p) in split.iter().zip(&probs) {
            prop_assert!((*k as f64 - p * total as f64).abs() < 1.0);
        }
    }

    #[test]
    fn float_cells_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(float17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn wilson_interval_brackets_the_frequency(n in 1u64..1_000_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as u64;
        let e = wilson(k, n);
        prop_assert!(0.0 <= e.lower && e.lower <= e.mean && e.mean <= e.upper && e.upper <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn association_partitions_and_coverage_is_a_probability(
        altitude_km in 400.0f64..1500.0,
        satellites in 50i64..5000,
        lambda_c in 0.1f64..5.0,
        bias in 1.0f64..1000.0,
    ) {
        let mut d = ConfigDocument::parse(REFERENCE_TOML).unwrap();
        d.set("constellation.altitude_km", toml::Value::Float(altitude_km)).unwrap();
        d.set("constellation.satellites", toml::Value::Integer(satellites)).unwrap();
        d.set("link.lambda_c_per_km2", toml::Value::Float(lambda_c)).unwrap();
        d.set("link.bias_ratio", toml::Value::Float(bias)).unwrap();
        let scn = d.build().unwrap();
        let r = analyze(&scn, NetworkVariant::Integrated, &AnalysisOptions::default()).unwrap();
        for t in &r.tasks {
            prop_assert!((t.a_sat + t.a_cs - 1.0).abs() <= 1e-9);
            prop_assert!((0.0..=1.0).contains(&t.p_ofld));
            let c = &t.coverage;
            for v in [c.sat_down, c.sat_up, c.cs_down, c.cs_up] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
        prop_assert!(r.mean_delay(&scn).unwrap() > 0.0);
    }
}
