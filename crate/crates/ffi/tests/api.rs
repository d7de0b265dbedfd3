use std::ffi::{CStr, CString};
use std::ptr;

use leomec_ffi::*;

fn last_error() -> String {
    let p = leomec_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn default_scenario() -> *mut LeomecScenario {
    let mut s = ptr::null_mut();
    assert_eq!(leomec_scenario_default(&mut s), LeomecStatus::Ok);
    assert!(!s.is_null());
    s
}

#[test]
fn analysis_round_trip() {
    let s = default_scenario();
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(leomec_analyze(s, LeomecVariant::Integrated, &mut a), LeomecStatus::Ok);
        assert_eq!(leomec_analysis_task_count(a), 4);
        let mut t = LeomecTaskResult::default();
        assert_eq!(leomec_analysis_task(a, 0, &mut t), LeomecStatus::Ok);
        assert_eq!(t.task_id, 1);
        assert!((t.a_sat + t.a_cs - 1.0).abs() < 1e-12);
        assert!((t.a_sat - 0.480_175_017_776_918).abs() < 1e-11);
        let mut mean = 0.0;
        assert_eq!(leomec_analysis_mean_delay(a, &mut mean), LeomecStatus::Ok);
        assert!((mean - t.t_avg).abs() < 1e-12 * mean);
        assert_eq!(leomec_analysis_task(a, 4, &mut t), LeomecStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        leomec_analysis_free(a);
        leomec_scenario_free(s);
    }
}

#[test]
fn overrides_validate_and_leave_scenario_intact_on_error() {
    let s = default_scenario();
    unsafe {
        let bad = CString::new("link.alpha=1.0").unwrap();
        assert_eq!(leomec_scenario_set(s, bad.as_ptr()), LeomecStatus::ConfigError);
        assert!(last_error().contains("link.alpha"));
        let good = CString::new("constellation.satellites=2500").unwrap();
        assert_eq!(leomec_scenario_set(s, good.as_ptr()), LeomecStatus::Ok);

        let reference = default_scenario();
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        leomec_analyze(s, LeomecVariant::Integrated, &mut a);
        leomec_analyze(reference, LeomecVariant::Integrated, &mut b);
        let (mut ta, mut tb) = (0.0, 0.0);
        leomec_analysis_mean_delay(a, &mut ta);
        leomec_analysis_mean_delay(b, &mut tb);
        assert!(ta < tb, "more satellites must lower the delay");
        leomec_analysis_free(a);
        leomec_analysis_free(b);
        leomec_scenario_free(reference);
        leomec_scenario_free(s);
    }
}

#[test]
fn toml_parsing_errors() {
    let mut s = ptr::null_mut();
    let text = CString::new("[link\nalpha = 3").unwrap();
    unsafe {
        assert_eq!(leomec_scenario_from_toml(text.as_ptr(), &mut s), LeomecStatus::ConfigError);
        assert!(s.is_null());
        assert_eq!(leomec_scenario_from_toml(ptr::null(), &mut s), LeomecStatus::NullPointer);
    }
    assert_eq!(leomec_scenario_default(ptr::null_mut()), LeomecStatus::NullPointer);
}

#[test]
fn simulation_is_deterministic_and_brackets_itself() {
    let s = default_scenario();
    unsafe {
        let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(leomec_simulate(s, 5000, 42, &mut x), LeomecStatus::Ok);
        assert_eq!(leomec_simulate(s, 5000, 42, &mut y), LeomecStatus::Ok);
        assert_eq!(leomec_simulation_task_count(x), 4);
        let (mut a, mut b) = (LeomecSimTaskResult::default(), LeomecSimTaskResult::default());
        assert_eq!(leomec_simulation_task(x, 2, &mut a), LeomecStatus::Ok);
        assert_eq!(leomec_simulation_task(y, 2, &mut b), LeomecStatus::Ok);
        assert_eq!(a.trials, 5000);
        assert_eq!(a.a_sat.mean.to_bits(), b.a_sat.mean.to_bits());
        assert!(a.cov_cs_down.lower <= a.cov_cs_down.mean && a.cov_cs_down.mean <= a.cov_cs_down.upper);
        let mut z = ptr::null_mut();
        assert_eq!(leomec_simulate(s, 0, 42, &mut z), LeomecStatus::InvalidArgument);
        leomec_simulation_free(x);
        leomec_simulation_free(y);
        leomec_scenario_free(s);
    }
}

#[test]
fn free_accepts_null_and_version_is_set() {
    unsafe {
        leomec_scenario_free(ptr::null_mut());
        leomec_analysis_free(ptr::null_mut());
        leomec_simulation_free(ptr::null_mut());
        assert_eq!(leomec_analysis_task_count(ptr::null()), 0);
    }
    let v = unsafe { CStr::from_ptr(leomec_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
