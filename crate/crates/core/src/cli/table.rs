//! Fixed CSV layouts per subcommand.

use crate::analysis::{method_label, ScenarioAnalysis, TaskAnalysis};
use crate::error::{Error, NumericalError};
use crate::montecarlo::{Estimate, ScenarioSimulation, TaskSimulation};
use crate::params::{ConfigDocument, Scenario};
use crate::report::float17;

/// Absolute tolerance for simulated satellite coverage.
pub const SAT_COVERAGE_TOL: f64 = 0.015;
/// Binomial standard deviations allowed for the other compared metrics.
pub const SIGMA_TOL: f64 = 3.0;

pub const SCENARIO_ECHO: [(&str, &str); 23] = [
    ("earth_radius_km", "constellation.earth_radius_km"),
    ("altitude_km", "constellation.altitude_km"),
    ("satellites", "constellation.satellites"),
    ("p_u_dbm", "link.p_u_dbm"),
    ("p_c_dbm", "link.p_c_dbm"),
    ("p_s_dbm", "link.p_s_dbm"),
    ("f_s_ghz", "link.f_s_ghz"),
    ("f_c_ghz", "link.f_c_ghz"),
    ("noise_u_dbm", "link.noise_u_dbm"),
    ("noise_c_dbm", "link.noise_c_dbm"),
    ("noise_s_dbm", "link.noise_s_dbm"),
    ("alpha", "link.alpha"),
    ("lambda_c_per_km2", "link.lambda_c_per_km2"),
    ("lambda_u_per_km2", "link.lambda_u_per_km2"),
    ("bias_ratio", "link.bias_ratio"),
    ("bandwidth_mhz", "link.bandwidth_mhz"),
    ("tau_db", "link.tau_db"),
    ("sr_omega", "link.sr_omega"),
    ("sr_b0", "link.sr_b0"),
    ("sr_m", "link.sr_m"),
    ("cpu_sat_ghz", "link.cpu_sat_ghz"),
    ("cpu_cs_ghz", "link.cpu_cs_ghz"),
    ("buffer", "link.buffer"),
];

const TASK_ECHO: [&str; 4] = ["cycles", "input_kbit", "output_kbit", "probability"];

const ANALYTIC_COLS: [&str; 29] = [
    "variant",
    "satellites_of_type",
    "fp_method",
    "fp_iterations",
    "p_ofld",
    "n_offloadable",
    "a_sat",
    "a_cs",
    "cov_sat_down",
    "cov_cs_down",
    "cov_sat_up",
    "cov_cs_up",
    "lambda_sat",
    "rho_sat",
    "lambda_cs",
    "ues_per_sat",
    "ues_per_cs",
    "w_sat_hz",
    "w_cs_hz",
    "t_sat_response",
    "t_sat_up",
    "t_sat_down",
    "t_cs_response",
    "t_cs_up",
    "t_cs_down",
    "t_avg",
    "t_mean",
    "total_cov_down",
    "total_cov_up",
];

const SIM_COLS: [&str; 24] = [
    "trials",
    "seed",
    "satellite_law",
    "disk_radius_km",
    "sim_a_sat",
    "sim_a_sat_ci",
    "sim_sat_visible",
    "sim_cov_sat_down",
    "sim_cov_sat_down_ci",
    "sim_cov_cs_down",
    "sim_cov_cs_down_ci",
    "sim_cov_sat_up",
    "sim_cov_sat_up_ci",
    "sim_cov_cs_up",
    "sim_cov_cs_up_ci",
    "sim_served_down",
    "sim_served_down_ci",
    "sim_served_up",
    "sim_served_up_ci",
    "sim_redraws",
    "sim_t_avg",
    "sim_t_mean",
    "sim_total_cov_down",
    "sim_total_cov_up",
];

const GAP_COLS: [&str; 11] = [
    "gap_a_sat",
    "tol_a_sat",
    "gap_cov_sat_down",
    "tol_cov_sat_down",
    "gap_cov_cs_down",
    "tol_cov_cs_down",
    "gap_cov_sat_up",
    "tol_cov_sat_up",
    "gap_cov_cs_up",
    "tol_cov_cs_up",
    "within_tol",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Analytic,
    Simulate,
    Compare,
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn f(x: f64) -> String {
    float17(x)
}

pub fn cell_opt(x: Option<f64>) -> String {
    x.map(float17).unwrap_or_default()
}

fn blank(n: usize) -> Vec<String> {
    vec![String::new(); n]
}

pub fn sweep_header(mode: SweepMode) -> Vec<String> {
    let mut h = strings(&["point", "sweep"]);
    h.extend(SCENARIO_ECHO.iter().map(|c| c.0.to_string()));
    h.push("task_id".into());
    h.extend(strings(&TASK_ECHO));
    if mode != SweepMode::Simulate {
        h.extend(strings(&ANALYTIC_COLS));
    }
    if mode != SweepMode::Analytic {
        h.extend(strings(&SIM_COLS));
    }
    if mode == SweepMode::Compare {
        h.extend(strings(&GAP_COLS));
    }
    h.push("status".into());
    h
}

const INTEGER_KEYS: [&str; 2] = ["constellation.satellites", "link.buffer"];

pub fn scenario_echo(doc: &ConfigDocument) -> Vec<String> {
    SCENARIO_ECHO
        .iter()
        .map(|(_, key)| {
            if INTEGER_KEYS.contains(key) {
                doc.echo(key)
            } else {
                doc.echo_real(key)
            }
        })
        .collect()
}

fn task_echo(doc: &ConfigDocument, id: u32) -> Vec<String> {
    let key = doc.task_key(id).unwrap_or_else(|| id.to_string());
    let mut v = vec![id.to_string()];
    v.extend(TASK_ECHO.iter().map(|c| doc.echo_real(&format!("tasks.{key}.{c}"))));
    v
}

fn analytic_cells(a: &ScenarioAnalysis, t: &TaskAnalysis, mean: &Result<f64, NumericalError>) -> Vec<String> {
    let times = |r: &Result<crate::queueing::TierTimes, NumericalError>| match r {
        Ok(x) => vec![f(x.response), f(x.up), f(x.down)],
        Err(_) => blank(3),
    };
    let mut v = vec![
        a.variant.name().to_string(),
        t.satellites_of_type.to_string(),
        method_label(&t.fixed_point).to_string(),
        t.fixed_point.map(|p| p.iterations.to_string()).unwrap_or_default(),
        f(t.p_ofld),
        f(t.n_offloadable),
        f(t.a_sat),
        f(t.a_cs),
        f(t.coverage.sat_down),
        f(t.coverage.cs_down),
        f(t.coverage.sat_up),
        f(t.coverage.cs_up),
        f(t.lambda_sat),
        f(t.rho_sat),
        f(t.lambda_cs),
        f(t.loads.mean_ues_sat),
        f(t.loads.mean_ues_cs),
        f(t.loads.w_sat),
        f(t.loads.w_cs),
    ];
    v.extend(times(&t.sat_times));
    v.extend(times(&t.cs_times));
    v.push(cell_opt(t.delay.as_ref().ok().map(|d| d.t_avg)));
    v.push(cell_opt(mean.as_ref().ok().copied()));
    v.push(f(a.total_cov_down));
    v.push(f(a.total_cov_up));
    v
}

fn est(e: &Estimate) -> [String; 2] {
    [f(e.mean), f(e.halfwidth())]
}

fn sim_cells(s: &ScenarioSimulation, i: usize, mean: &Result<f64, NumericalError>) -> Vec<String> {
    let t: &TaskSimulation = &s.tasks[i];
    let mut v = vec![
        s.trials.to_string(),
        s.seed.to_string(),
        s.law.name().to_string(),
        f(s.disk_radius / 1e3),
    ];
    v.extend(est(&t.a_sat));
    v.push(f(t.sat_visible.mean));
    for e in [&t.sat_down, &t.cs_down, &t.sat_up, &t.cs_up, &t.served_down, &t.served_up] {
        v.extend(est(e));
    }
    v.push(t.tally.redraws.to_string());
    v.push(cell_opt(s.plug_in.tasks[i].delay.as_ref().ok().map(|d| d.t_avg)));
    v.push(cell_opt(mean.as_ref().ok().copied()));
    v.push(f(s.plug_in.total_cov_down));
    v.push(f(s.plug_in.total_cov_up));
    v
}

/// |analytic − simulated| and its tolerance for the compared metrics.
pub fn gaps(t: &TaskAnalysis, s: &TaskSimulation) -> Vec<(f64, f64)> {
    let n = s.tally.trials;
    let sigma = |p: f64| SIGMA_TOL * Estimate::binomial_sigma(p, n);
    vec![
        ((t.a_sat - s.a_sat.mean).abs(), sigma(t.a_sat)),
        ((t.coverage.sat_down - s.sat_down.mean).abs(), SAT_COVERAGE_TOL),
        ((t.coverage.cs_down - s.cs_down.mean).abs(), sigma(t.coverage.cs_down)),
        ((t.coverage.sat_up - s.sat_up.mean).abs(), SAT_COVERAGE_TOL),
        ((t.coverage.cs_up - s.cs_up.mean).abs(), sigma(t.coverage.cs_up)),
    ]
}

fn gap_cells(t: &TaskAnalysis, s: &TaskSimulation) -> Vec<String> {
    let g = gaps(t, s);
    let mut v: Vec<String> = g.iter().flat_map(|&(gap, tol)| [f(gap), f(tol)]).collect();
    v.push(g.iter().all(|&(gap, tol)| gap <= tol).to_string());
    v
}

fn task_status(t: &TaskAnalysis) -> String {
    match &t.delay {
        Err(e) => format!("error: {e}"),
        Ok(_) => {
            let notes: Vec<String> = [("sat tier", &t.sat_times), ("cs tier", &t.cs_times)]
                .iter()
                .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
                .collect();
            if notes.is_empty() {
                "ok".into()
            } else {
                format!("ok ({})", notes.join("; "))
            }
        }
    }
}

/// Everything evaluated at one sweep point.
pub struct PointResult {
    pub index: usize,
    pub label: String,
    pub doc: ConfigDocument,
    pub scenario: Scenario,
    pub analysis: Result<ScenarioAnalysis, NumericalError>,
    pub simulation: Option<Result<ScenarioSimulation, Error>>,
}

impl PointResult {
    pub fn failed(&self) -> bool {
        self.analysis.is_err() || matches!(self.simulation, Some(Err(_)))
    }
}

pub fn sweep_rows(mode: SweepMode, p: &PointResult) -> Vec<Vec<String>> {
    let n_analytic = ANALYTIC_COLS.len();
    let n_sim = SIM_COLS.len();
    let n_gap = GAP_COLS.len();
    let mean_a = p
        .analysis
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|a| a.mean_delay(&p.scenario));
    let sim = p.simulation.as_ref().map(|r| r.as_ref());
    let mean_s = match sim {
        Some(Ok(s)) => s.plug_in.mean_delay(&p.scenario),
        _ => Err(NumericalError::NonFinite("simulation failed")),
    };
    p.scenario
        .params
        .tasks
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut row = vec![p.index.to_string(), p.label.clone()];
            row.extend(scenario_echo(&p.doc));
            row.extend(task_echo(&p.doc, spec.id));
            let task_a = p.analysis.as_ref().ok().map(|a| (a, &a.tasks[i]));
            if mode != SweepMode::Simulate {
                match task_a {
                    Some((a, t)) => row.extend(analytic_cells(a, t, &mean_a)),
                    None => row.extend(blank(n_analytic)),
                }
            }
            if mode != SweepMode::Analytic {
                match sim {
                    Some(Ok(s)) => row.extend(sim_cells(s, i, &mean_s)),
                    _ => row.extend(blank(n_sim)),
                }
            }
            if mode == SweepMode::Compare {
                match (task_a, sim) {
                    (Some((_, t)), Some(Ok(s))) => row.extend(gap_cells(t, &s.tasks[i])),
                    _ => row.extend(blank(n_gap)),
                }
            }
            let status = match (&p.analysis, sim) {
                (Err(e), _) => format!("error: {e}"),
                (_, Some(Err(e))) => format!("error: simulation: {e}"),
                (Ok(a), _) => task_status(&a.tasks[i]),
            };
            row.push(status);
            row
        })
        .collect()
}

pub fn baselines_header() -> Vec<String> {
    let mut h = strings(&["point", "sweep"]);
    h.extend(SCENARIO_ECHO.iter().map(|c| c.0.to_string()));
    h.extend(strings(&[
        "t_integrated",
        "t_sat_only",
        "t_cs_only",
        "integrated_le_min",
        "sat_only_lt_cs_only",
        "status",
    ]));
    h
}

pub fn preset_header(with_sim: bool) -> Vec<String> {
    let mut h = strings(&["preset", "family"]);
    h.extend(SCENARIO_ECHO.iter().map(|c| c.0.to_string()));
    h.extend(strings(&["t_mean", "total_cov_down", "total_cov_up", "rank"]));
    if with_sim {
        h.extend(strings(&[
            "trials",
            "seed",
            "sim_t_mean",
            "sim_total_cov_down",
            "sim_total_cov_up",
        ]));
    }
    h.push("status".into());
    h
}

pub fn cell_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

pub fn render(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        debug_assert_eq!(r.len(), header.len());
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
