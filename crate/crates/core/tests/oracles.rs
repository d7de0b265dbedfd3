//! Hand-derived and independently computed reference values.

use approx::assert_relative_eq;
use leomec::analysis::{analyze, AnalysisOptions, NetworkVariant};
use leomec::channel::{gamma_approx_of_sr, SrFading};
use leomec::geometry::{horizon, nearest_cs_cdf};
use leomec::params::{ConfigDocument, REFERENCE_TOML};
use leomec::queueing::{cs_response_times, mean_jobs_in_system, offload_probability, sat_response_time, CsClass};
use leomec::Scenario;

fn reference() -> Scenario {
    ConfigDocument::parse(REFERENCE_TOML).unwrap().build().unwrap()
}

fn at(altitude_km: f64, satellites: i64) -> Scenario {
    let mut d = ConfigDocument::parse(REFERENCE_TOML).unwrap();
    d.set("constellation.altitude_km", toml::Value::Float(altitude_km)).unwrap();
    d.set("constellation.satellites", toml::Value::Integer(satellites)).unwrap();
    d.build().unwrap()
}

#[test]
fn horizon_angle_at_500_km() {
    let h = horizon(&reference().geometry);
    assert_relative_eq!(h.theta_c, (6371.0f64 / 6871.0).acos(), max_relative = 1e-14);
    assert_relative_eq!(
        h.d_max_down,
        (6871e3f64 * 6871e3 - 6371e3 * 6371e3).sqrt(),
        max_relative = 1e-12
    );
}

#[test]
fn finite_buffer_at_unit_load() {
    // ρ = 1: uniform stationary law over 0..=N.
    for n in 1..=8u32 {
        assert_relative_eq!(
            offload_probability(1.0, n),
            1.0 - 1.0 / (n as f64 + 1.0),
            max_relative = 1e-13
        );
        assert_relative_eq!(mean_jobs_in_system(1.0, n), n as f64 / 2.0, max_relative = 1e-13);
    }
    // N = 1: P(idle) = 1/(1+ρ).
    assert_relative_eq!(offload_probability(0.5, 1), 1.0 / 1.5, max_relative = 1e-14);
}

#[test]
fn single_server_response_time() {
    // N = 1 sojourn is the service time alone.
    assert_relative_eq!(sat_response_time(0.7, 2.0, 1), 0.5, max_relative = 1e-13);
}

#[test]
fn two_class_pollaczek_khinchine_by_hand() {
    // W = (0.25·2 + 0.125·8)/2 / (1 − 0.5) = 1.5.
    let t = cs_response_times(&[CsClass { lambda: 0.25, mu: 1.0 }, CsClass { lambda: 0.125, mu: 0.5 }]).unwrap();
    assert_relative_eq!(t[0], 2.5, max_relative = 1e-14);
    assert_relative_eq!(t[1], 3.5, max_relative = 1e-14);
}

#[test]
fn rounded_gamma_preserves_mean_power() {
    let sr = SrFading::new(1.29, 0.158, 19.4);
    let g = gamma_approx_of_sr(&sr);
    assert_eq!(g.alpha_int, 3);
    assert_relative_eq!(g.alpha_s * g.beta_s, 2.0 * 0.158 + 1.29, max_relative = 1e-13);
    assert_relative_eq!(g.alpha_int as f64 * g.beta_int, 2.0 * 0.158 + 1.29, max_relative = 1e-14);
}

#[test]
fn nearest_server_median() {
    let lambda = 1e-6;
    let median = (std::f64::consts::LN_2 / (lambda * std::f64::consts::PI)).sqrt();
    assert_relative_eq!(nearest_cs_cdf(median, lambda), 0.5, max_relative = 1e-14);
}

#[test]
fn reference_association_matches_independent_quadrature() {
    // scipy.integrate.quad over the same fixed point, 1e-13 tolerance.
    let r = analyze(&reference(), NetworkVariant::Integrated, &AnalysisOptions::default()).unwrap();
    let t = &r.tasks[0];
    assert_relative_eq!(t.a_sat, 0.480_175_017_776_918, max_relative = 1e-11);
    assert_relative_eq!(t.a_sat + t.a_cs, 1.0, epsilon = 1e-12);
}

#[test]
fn reference_reference_point() {
    // Values from an independent Python implementation of the same model.
    let scn = reference();
    let r = analyze(&scn, NetworkVariant::Integrated, &AnalysisOptions::default()).unwrap();
    let t = &r.tasks[0];
    assert_relative_eq!(t.p_ofld, 0.247_879, max_relative = 1e-5);
    assert_relative_eq!(t.n_offloadable, 61.9698, max_relative = 1e-5);
    assert_relative_eq!(t.coverage.sat_down, 0.91361, max_relative = 1e-5);
    assert_relative_eq!(t.coverage.cs_down, 0.996135, max_relative = 1e-5);
    assert_relative_eq!(t.coverage.sat_up, 0.89562, max_relative = 1e-5);
    assert_relative_eq!(t.coverage.cs_up, 0.99233, max_relative = 1e-5);
    assert_relative_eq!(r.total_cov_down, 0.95651, max_relative = 1e-5);
    assert_relative_eq!(r.total_cov_up, 0.94589, max_relative = 1e-5);
    assert_relative_eq!(r.mean_delay(&scn).unwrap(), 13.9717, max_relative = 1e-5);
}

#[test]
fn delay_grid_reference() {
    let expected = [
        (500.0, [33.5755, 18.7908, 13.9717, 10.8240, 8.7720, 7.2672]),
        (800.0, [12.3362, 7.6408, 5.9678, 4.5550, 3.5657, 2.8966]),
        (1000.0, [6.7017, 4.2959, 3.2641, 2.3705, 1.8192, 1.4672]),
    ];
    let counts = [200, 600, 1000, 1500, 2000, 2500];
    for (a, row) in expected {
        for (n, want) in counts.iter().zip(row) {
            let scn = at(a, *n);
            let got = analyze(&scn, NetworkVariant::Integrated, &AnalysisOptions::default())
                .unwrap()
                .mean_delay(&scn)
                .unwrap();
            assert!((got - want).abs() <= 6e-5 * want, "a_s={a} N_s={n}: {got} vs {want}");
        }
    }
}

#[test]
fn single_tier_baselines_at_reference() {
    let scn = reference();
    let opts = AnalysisOptions::default();
    let sat = analyze(&scn, NetworkVariant::SatOnly, &opts)
        .unwrap()
        .mean_delay(&scn)
        .unwrap();
    let cs = analyze(&scn, NetworkVariant::CsOnly, &opts)
        .unwrap()
        .mean_delay(&scn)
        .unwrap();
    assert_relative_eq!(sat, 71.4847, max_relative = 1e-5);
    assert_relative_eq!(cs, 7.2553e-5, max_relative = 1e-4);
}
