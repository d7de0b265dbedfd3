//! C ABI over the leomec library.
//!
//! Objects cross the boundary as opaque handles. Each handle returned
//! through an `out` parameter is released with the matching `*_free`. Every fallible call
//! returns a [`LeomecStatus`]; on failure a description is available from
//! [`leomec_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use leomec::analysis::{analyze, tier_inputs, AnalysisOptions, NetworkVariant, ScenarioAnalysis};
use leomec::montecarlo::{simulate, ScenarioSimulation};
use leomec::params::{ConfigDocument, REFERENCE_TOML};
use leomec::{Error, Scenario};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeomecStatus {
    Ok = 0,
    ConfigError = 1,
    NumericalError = 2,
    NullPointer = 3,
    InvalidArgument = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeomecVariant {
    Integrated = 0,
    SatOnly = 1,
    CsOnly = 2,
}

impl From<LeomecVariant> for NetworkVariant {
    fn from(v: LeomecVariant) -> Self {
        match v {
            LeomecVariant::Integrated => NetworkVariant::Integrated,
            LeomecVariant::SatOnly => NetworkVariant::SatOnly,
            LeomecVariant::CsOnly => NetworkVariant::CsOnly,
        }
    }
}

/// A validated scenario together with the document it was built from.
pub struct LeomecScenario {
    doc: ConfigDocument,
    scenario: Scenario,
}

pub struct LeomecAnalysis {
    scenario: Scenario,
    analysis: ScenarioAnalysis,
}

pub struct LeomecSimulation {
    simulation: ScenarioSimulation,
}

/// Closed-form results for one task class. `t_avg` is NaN when a tier
/// carrying traffic is unstable.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LeomecTaskResult {
    pub task_id: u32,
    pub satellites_of_type: u32,
    pub p_ofld: f64,
    pub n_offloadable: f64,
    pub a_sat: f64,
    pub a_cs: f64,
    pub cov_sat_down: f64,
    pub cov_cs_down: f64,
    pub cov_sat_up: f64,
    pub cov_cs_up: f64,
    pub t_avg: f64,
}

/// Monte Carlo estimate with its 95% interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LeomecEstimate {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LeomecSimTaskResult {
    pub task_id: u32,
    pub trials: u64,
    pub a_sat: LeomecEstimate,
    pub cov_sat_down: LeomecEstimate,
    pub cov_cs_down: LeomecEstimate,
    pub cov_sat_up: LeomecEstimate,
    pub cov_cs_up: LeomecEstimate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: LeomecStatus, msg: impl Into<String>) -> LeomecStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> LeomecStatus {
    let status = match e {
        Error::Config(_) => LeomecStatus::ConfigError,
        Error::Numerical(_) => LeomecStatus::NumericalError,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting panics into [`LeomecStatus::Panic`].
fn guard(f: impl FnOnce() -> LeomecStatus) -> LeomecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(LeomecStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, LeomecStatus> {
    if p.is_null() {
        return Err(fail(LeomecStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LeomecStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn emit<T>(out: *mut *mut T, value: T) -> LeomecStatus {
    // SAFETY: callers check `out` for null before building `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    LeomecStatus::Ok
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(LeomecStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn leomec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn leomec_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

fn load(doc: ConfigDocument, out: *mut *mut LeomecScenario) -> LeomecStatus {
    match doc.build() {
        Ok(scenario) => emit(out, LeomecScenario { doc, scenario }),
        Err(e) => from_error(&e.into()),
    }
}

/// Creates the bundled reference scenario.
#[no_mangle]
pub extern "C" fn leomec_scenario_default(out: *mut *mut LeomecScenario) -> LeomecStatus {
    non_null!(out);
    guard(|| match ConfigDocument::parse(REFERENCE_TOML) {
        Ok(doc) => load(doc, out),
        Err(e) => from_error(&e.into()),
    })
}

/// Parses a scenario from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn leomec_scenario_from_toml(toml: *const c_char, out: *mut *mut LeomecScenario) -> LeomecStatus {
    non_null!(out);
    let text = match read_str(toml, "toml") {
        Ok(t) => t,
        Err(s) => return s,
    };
    guard(|| match ConfigDocument::parse(text) {
        Ok(doc) => load(doc, out),
        Err(e) => from_error(&e.into()),
    })
}

/// Applies `key=value` (TOML literal) to the scenario. On error the
/// scenario is left unchanged.
///
/// # Safety
/// `scenario` must come from this library; `assignment` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn leomec_scenario_set(scenario: *mut LeomecScenario, assignment: *const c_char) -> LeomecStatus {
    non_null!(scenario);
    let text = match read_str(assignment, "assignment") {
        Ok(t) => t,
        Err(s) => return s,
    };
    let s = &mut *scenario;
    guard(|| {
        let mut doc = s.doc.clone();
        let built = doc.apply_override(text).and_then(|_| doc.build());
        match built {
            Ok(scn) => {
                s.doc = doc;
                s.scenario = scn;
                LeomecStatus::Ok
            }
            Err(e) => from_error(&e.into()),
        }
    })
}

/// # Safety
/// `scenario` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn leomec_scenario_free(scenario: *mut LeomecScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Evaluates the closed forms.
///
/// # Safety
/// `scenario` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn leomec_analyze(
    scenario: *const LeomecScenario,
    variant: LeomecVariant,
    out: *mut *mut LeomecAnalysis,
) -> LeomecStatus {
    non_null!(scenario, out);
    let s = &*scenario;
    guard(|| match analyze(&s.scenario, variant.into(), &AnalysisOptions::default()) {
        Ok(analysis) => emit(
            out,
            LeomecAnalysis {
                scenario: s.scenario.clone(),
                analysis,
            },
        ),
        Err(e) => from_error(&e.into()),
    })
}

/// # Safety
/// `analysis` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn leomec_analysis_task_count(analysis: *const LeomecAnalysis) -> usize {
    analysis.as_ref().map_or(0, |a| a.analysis.tasks.len())
}

/// # Safety
/// `analysis` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn leomec_analysis_task(
    analysis: *const LeomecAnalysis,
    index: usize,
    out: *mut LeomecTaskResult,
) -> LeomecStatus {
    non_null!(analysis, out);
    let a = &*analysis;
    let Some(t) = a.analysis.tasks.get(index) else {
        return fail(
            LeomecStatus::InvalidArgument,
            format!("task index {index} out of range (have {})", a.analysis.tasks.len()),
        );
    };
    *out = LeomecTaskResult {
        task_id: t.task_id,
        satellites_of_type: t.satellites_of_type,
        p_ofld: t.p_ofld,
        n_offloadable: t.n_offloadable,
        a_sat: t.a_sat,
        a_cs: t.a_cs,
        cov_sat_down: t.coverage.sat_down,
        cov_cs_down: t.coverage.cs_down,
        cov_sat_up: t.coverage.sat_up,
        cov_cs_up: t.coverage.cs_up,
        t_avg: t.delay.as_ref().map_or(f64::NAN, |d| d.t_avg),
    };
    LeomecStatus::Ok
}

/// Probability-weighted mean delay over task classes.
///
/// # Safety
/// `analysis` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn leomec_analysis_mean_delay(analysis: *const LeomecAnalysis, out: *mut f64) -> LeomecStatus {
    non_null!(analysis, out);
    let a = &*analysis;
    match a.analysis.mean_delay(&a.scenario) {
        Ok(t) => {
            *out = t;
            LeomecStatus::Ok
        }
        Err(e) => from_error(&e.into()),
    }
}

/// # Safety
/// `analysis` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn leomec_analysis_free(analysis: *mut LeomecAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// Runs the Monte Carlo simulator with `trials` per task class and the
/// given master seed.
///
/// # Safety
/// `scenario` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn leomec_simulate(
    scenario: *const LeomecScenario,
    trials: u64,
    seed: u64,
    out: *mut *mut LeomecSimulation,
) -> LeomecStatus {
    non_null!(scenario, out);
    if trials == 0 {
        return fail(LeomecStatus::InvalidArgument, "trials must be at least 1");
    }
    let mut scn = (*scenario).scenario.clone();
    scn.sim.trials = trials;
    scn.sim.seed = seed;
    guard(|| {
        let run = tier_inputs(&scn, NetworkVariant::Integrated, &AnalysisOptions::default())
            .map_err(Error::from)
            .and_then(|inputs| simulate(&scn, &inputs, None));
        match run {
            Ok(simulation) => emit(out, LeomecSimulation { simulation }),
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `simulation` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn leomec_simulation_task_count(simulation: *const LeomecSimulation) -> usize {
    simulation.as_ref().map_or(0, |s| s.simulation.tasks.len())
}

/// # Safety
/// `simulation` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn leomec_simulation_task(
    simulation: *const LeomecSimulation,
    index: usize,
    out: *mut LeomecSimTaskResult,
) -> LeomecStatus {
    non_null!(simulation, out);
    let s = &*simulation;
    let Some(t) = s.simulation.tasks.get(index) else {
        return fail(
            LeomecStatus::InvalidArgument,
            format!("task index {index} out of range (have {})", s.simulation.tasks.len()),
        );
    };
    let e = |x: &leomec::montecarlo::Estimate| LeomecEstimate {
        mean: x.mean,
        lower: x.lower,
        upper: x.upper,
    };
    *out = LeomecSimTaskResult {
        task_id: t.task_id,
        trials: t.tally.trials,
        a_sat: e(&t.a_sat),
        cov_sat_down: e(&t.sat_down),
        cov_cs_down: e(&t.cs_down),
        cov_sat_up: e(&t.sat_up),
        cov_cs_up: e(&t.cs_up),
    };
    LeomecStatus::Ok
}

/// # Safety
/// `simulation` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn leomec_simulation_free(simulation: *mut LeomecSimulation) {
    if !simulation.is_null() {
        drop(Box::from_raw(simulation));
    }
}
