//! Executable acceptance checks: Monte Carlo agreement, association
//! partition, queue oracles, delay trends, distribution validity and
//! determinism. Each check reports pass/fail with the measured numbers.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{analyze, delay_stage, first_equivalent, tier_inputs, AnalysisOptions, NetworkVariant};
use crate::association::assoc_prob_sat_thinned;
use crate::channel::sample_sr_power;
use crate::cli::sweep::{Sweep, SweepVar};
use crate::cli::table::{gaps, SweepMode, SIGMA_TOL};
use crate::cli::{in_pool, preset_document, sweep_csv};
use crate::coverage::cov_down_sat_exact_fading;
use crate::error::{Error, NumericalError};
use crate::geometry::{
    contact_cdf_nearest_sat, contact_cdf_nearest_sat_area_uniform, contact_cdf_serving_sat_uplink, contact_pdf_nearest_sat,
    contact_pdf_serving_sat_uplink, horizon, nearest_cs_cdf, nearest_cs_pdf,
};
use crate::montecarlo::queue::{mm1n_stationary, simulate_multiclass_fifo};
use crate::montecarlo::{ks_critical, ks_from_sorted_cdf, simulate, Estimate};
use crate::numerics::{integrate_with_breakpoints, sr_power_cdf, QuadratureSpec, SR_SERIES_TOL};
use crate::params::{ConfigDocument, ConstellationGeometry, Scenario};
use crate::presets::{families, PRESETS};
use crate::queueing::{cs_response_times, mean_jobs_in_system, offload_probability, CsClass};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Monte Carlo trials for the coverage and association checks; the
    /// scenario's own count when `None`.
    pub trials: Option<u64>,
    pub runtime_limit: Duration,
    /// Trials per run in the determinism check.
    pub determinism_trials: u64,
    /// Customers in the two-class queue simulation.
    pub des_customers: u64,
    /// Samples in the fading goodness-of-fit test.
    pub ks_samples: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            trials: Some(1_000_000),
            runtime_limit: Duration::from_secs(120),
            determinism_trials: 20_000,
            des_customers: 4_000_000,
            ks_samples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub summary: String,
    pub details: Vec<String>,
}

impl CriterionReport {
    fn new(id: u8, title: &'static str, passed: bool, summary: String, details: Vec<String>) -> Self {
        Self {
            id,
            title,
            passed,
            summary,
            details,
        }
    }

    fn failed(id: u8, title: &'static str, e: &Error) -> Self {
        Self::new(id, title, false, format!("could not evaluate: {e}"), Vec::new())
    }

    /// One-line verdict.
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.summary
        )
    }
}

pub fn report_csv(reports: &[CriterionReport]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["criterion", "title", "passed", "summary", "details"])?;
    for r in reports {
        w.write_record([
            r.id.to_string(),
            r.title.to_string(),
            r.passed.to_string(),
            r.summary.clone(),
            r.details.join(" | "),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Runs every check on top of the base scenario.
pub fn run_all(base: &ConfigDocument, opts: &ValidateOptions) -> Vec<CriterionReport> {
    let mc = reference_run(base, opts);
    vec![
        criterion_1(&mc, opts),
        criterion_2(base, &mc),
        criterion_3(opts),
        criterion_4(base),
        criterion_5(base),
        criterion_6(base),
        criterion_7(base, opts),
        criterion_8(base, opts),
    ]
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

fn build(doc: &ConfigDocument, edits: &[(&str, toml::Value)]) -> Result<Scenario, Error> {
    let mut d = doc.clone();
    for (k, v) in edits {
        d.set(k, v.clone())?;
    }
    Ok(d.build()?)
}

fn mean_delay(scn: &Scenario, variant: NetworkVariant) -> Result<f64, NumericalError> {
    analyze(scn, variant, &AnalysisOptions::default())?.mean_delay(scn)
}

/// Analytic and simulated results at the base scenario.
pub struct ReferenceRun {
    pub scenario: Scenario,
    pub analysis: crate::analysis::ScenarioAnalysis,
    pub simulation: crate::montecarlo::ScenarioSimulation,
    pub elapsed: Duration,
}

pub fn reference_run(base: &ConfigDocument, opts: &ValidateOptions) -> Result<ReferenceRun, Error> {
    let mut scenario = base.build()?;
    if let Some(t) = opts.trials {
        scenario.sim.trials = t;
    }
    let start = Instant::now();
    let inputs = tier_inputs(&scenario, NetworkVariant::Integrated, &AnalysisOptions::default())?;
    let analysis = delay_stage(&scenario, NetworkVariant::Integrated, &inputs);
    let simulation = simulate(&scenario, &inputs, None)?;
    Ok(ReferenceRun {
        scenario,
        analysis,
        simulation,
        elapsed: start.elapsed(),
    })
}

/// Tasks with distinct type signatures.
fn distinct_tasks(scn: &Scenario) -> Vec<usize> {
    (0..scn.params.tasks.len())
        .filter(|&i| first_equivalent(scn, i).is_none())
        .collect()
}

pub fn criterion_1(mc: &Result<ReferenceRun, Error>, opts: &ValidateOptions) -> CriterionReport {
    const TITLE: &str = "analytic vs Monte Carlo coverage";
    let run = match mc {
        Ok(r) => r,
        Err(e) => return CriterionReport::failed(1, TITLE, e),
    };
    let names = ["sat_down", "cs_down", "sat_up", "cs_up"];
    let mut ok = run.elapsed <= opts.runtime_limit;
    let mut details = Vec::new();
    let mut worst = String::new();
    let mut worst_excess = f64::NEG_INFINITY;
    for i in distinct_tasks(&run.scenario) {
        let t = &run.analysis.tasks[i];
        let s = &run.simulation.tasks[i];
        let g = gaps(t, s);
        let analytic = [t.coverage.sat_down, t.coverage.cs_down, t.coverage.sat_up, t.coverage.cs_up];
        let simulated = [s.sat_down.mean, s.cs_down.mean, s.sat_up.mean, s.cs_up.mean];
        for k in 0..4 {
            let (gap, tol) = g[k + 1];
            ok &= gap <= tol;
            if gap - tol > worst_excess {
                worst_excess = gap - tol;
                worst = format!("{} gap {:.4} vs tol {:.4}", names[k], gap, tol);
            }
            details.push(format!(
                "task {} {}: analytic {} sim {} gap {:.2e} tol {:.2e}",
                t.task_id,
                names[k],
                fmt(analytic[k]),
                fmt(simulated[k]),
                gap,
                tol
            ));
        }
        let p = &run.scenario.params;
        if let Ok(exact) =
            cov_down_sat_exact_fading(p.tau, t.n_offloadable, p, &run.scenario.geometry, &QuadratureSpec::default())
        {
            details.push(format!(
                "task {} sat_down with the exact fading law instead of the Gamma bound: {} (sim {})",
                t.task_id,
                fmt(exact),
                fmt(s.sat_down.mean)
            ));
        }
    }
    let summary = format!(
        "{} trials/task in {:.1} s (limit {} s); largest miss: {}",
        run.simulation.trials,
        run.elapsed.as_secs_f64(),
        opts.runtime_limit.as_secs(),
        worst
    );
    CriterionReport::new(1, TITLE, ok, summary, details)
}

/// a_s (km) × N_s × λ_c (per km²) grid for the partition check.
pub const PARTITION_GRID: ([f64; 3], [i64; 3], [f64; 3]) = ([500.0, 800.0, 1000.0], [200, 1000, 2500], [0.5, 1.0, 2.0]);

pub fn criterion_2(base: &ConfigDocument, mc: &Result<ReferenceRun, Error>) -> CriterionReport {
    const TITLE: &str = "association partition";
    let mut grid = Vec::new();
    for a in PARTITION_GRID.0 {
        for n in PARTITION_GRID.1 {
            for l in PARTITION_GRID.2 {
                grid.push((a, n, l));
            }
        }
    }
    let worst: Result<Vec<f64>, Error> = grid
        .par_iter()
        .map(|&(a, n, l)| {
            let scn = build(
                base,
                &[
                    ("constellation.altitude_km", toml::Value::Float(a)),
                    ("constellation.satellites", toml::Value::Integer(n)),
                    ("link.lambda_c_per_km2", toml::Value::Float(l)),
                ],
            )?;
            let r = analyze(&scn, NetworkVariant::Integrated, &AnalysisOptions::default())?;
            Ok(r.tasks.iter().map(|t| (t.a_sat + t.a_cs - 1.0).abs()).fold(0.0, f64::max))
        })
        .collect();
    let worst = match worst {
        Ok(w) => w.into_iter().fold(0.0, f64::max),
        Err(e) => return CriterionReport::failed(2, TITLE, &e),
    };
    let run = match mc {
        Ok(r) => r,
        Err(e) => return CriterionReport::failed(2, TITLE, e),
    };
    let mut ok = worst <= 1e-6;
    let mut details = vec![format!("max |A_s + A_0 - 1| over {} points: {worst:.3e}", grid.len())];
    let mut sigmas = 0.0f64;
    let p = &run.scenario.params;
    for i in distinct_tasks(&run.scenario) {
        let t = &run.analysis.tasks[i];
        let s = &run.simulation.tasks[i];
        let sigma = Estimate::binomial_sigma(t.a_sat, s.tally.trials);
        let z = (s.a_sat.mean - t.a_sat).abs() / sigma;
        sigmas = sigmas.max(z);
        ok &= z <= SIGMA_TOL;
        details.push(format!(
            "task {}: analytic A_s {} sim {} ({z:.2} sigma)",
            t.task_id,
            fmt(t.a_sat),
            fmt(s.a_sat.mean)
        ));
        if let Ok(th) = assoc_prob_sat_thinned(
            t.satellites_of_type as f64,
            t.p_ofld,
            p,
            &run.scenario.geometry,
            &QuadratureSpec::default(),
        ) {
            details.push(format!(
                "task {}: A_s with independently thinned satellites {} ({:.2} sigma from sim); mean-count decoupling accounts for {:.2e}",
                t.task_id,
                fmt(th),
                (s.a_sat.mean - th).abs() / sigma,
                t.a_sat - th
            ));
        }
    }
    let summary =
        format!("worst partition error {worst:.2e} (tol 1e-6); simulated association within {sigmas:.2} sigma (tol {SIGMA_TOL})");
    CriterionReport::new(2, TITLE, ok, summary, details)
}

pub fn criterion_3(opts: &ValidateOptions) -> CriterionReport {
    const TITLE: &str = "queue oracles";
    let mut details = Vec::new();
    let mut worst_p = 0.0f64;
    let mut worst_q = 0.0f64;
    for buffer in [1u32, 2, 5] {
        for rho in [0.1, 0.5, 1.0, 2.0] {
            let pi = match mm1n_stationary(rho, 1.0, buffer) {
                Ok(p) => p,
                Err(e) => return CriterionReport::failed(3, TITLE, &e.into()),
            };
            let p_ctmc = 1.0 - pi[buffer as usize];
            let q_ctmc: f64 = pi.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
            worst_p = worst_p.max((offload_probability(rho, buffer) - p_ctmc).abs());
            worst_q = worst_q.max((mean_jobs_in_system(rho, buffer) - q_ctmc).abs());
        }
    }
    details.push(format!("offload probability vs CTMC: max error {worst_p:.2e}"));
    details.push(format!("mean jobs vs CTMC: max error {worst_q:.2e}"));

    let one = CsClass { lambda: 0.6, mu: 1.5 };
    let pk = cs_response_times(&[one]).map(|v| v[0]);
    let mm1 = 1.0 / (one.mu - one.lambda);
    let single_err = pk.as_ref().map(|v| ((v - mm1) / mm1).abs()).unwrap_or(f64::INFINITY);
    details.push(format!("one class vs 1/(mu - lambda): relative error {single_err:.2e}"));

    let classes = [CsClass { lambda: 0.25, mu: 1.0 }, CsClass { lambda: 0.125, mu: 0.5 }];
    let pk2 = match cs_response_times(&classes) {
        Ok(v) => v,
        Err(e) => return CriterionReport::failed(3, TITLE, &e.into()),
    };
    let des = simulate_multiclass_fifo(
        &classes.iter().map(|c| (c.lambda, c.mu)).collect::<Vec<_>>(),
        opts.des_customers,
        10_000,
        0x5eed,
    );
    let des_err = pk2.iter().zip(&des).map(|(a, d)| ((a - d) / a).abs()).fold(0.0, f64::max);
    details.push(format!(
        "two classes: P-K {:?} vs simulation {:?} ({} customers)",
        pk2.iter().map(|x| fmt(*x)).collect::<Vec<_>>(),
        des.iter().map(|x| fmt(*x)).collect::<Vec<_>>(),
        opts.des_customers
    ));
    let ok = worst_p <= 1e-10 && worst_q <= 1e-10 && single_err <= 1e-14 && des_err <= 0.01;
    let summary = format!(
        "CTMC errors {worst_p:.1e} / {worst_q:.1e} (tol 1e-10); one-class {single_err:.1e}; two-class DES {:.2}% (tol 1%)",
        100.0 * des_err
    );
    CriterionReport::new(3, TITLE, ok, summary, details)
}

/// N_s grid 200, 300, ..., 2500.
pub fn satellite_grid() -> Vec<i64> {
    (2..=25).map(|k| 100 * k).collect()
}

fn delay_curve(base: &ConfigDocument, altitude_km: f64, counts: &[i64], variant: NetworkVariant) -> Result<Vec<f64>, Error> {
    counts
        .par_iter()
        .map(|&n| {
            let scn = build(
                base,
                &[
                    ("constellation.altitude_km", toml::Value::Float(altitude_km)),
                    ("constellation.satellites", toml::Value::Integer(n)),
                ],
            )?;
            Ok(mean_delay(&scn, variant)?)
        })
        .collect()
}

/// First grid step where `ys` rises (or fails to fall, when `strict`).
fn first_increase(xs: &[i64], ys: &[f64], strict: bool) -> Option<(i64, f64, f64)> {
    ys.windows(2)
        .zip(xs.windows(2))
        .find(|(y, _)| if strict { y[1] >= y[0] } else { y[1] > y[0] })
        .map(|(y, x)| (x[1], y[0], y[1]))
}

pub fn criterion_4(base: &ConfigDocument) -> CriterionReport {
    const TITLE: &str = "delay decreases with N_s and higher shells are faster";
    let grid = satellite_grid();
    let altitudes = [500.0, 800.0, 1000.0];
    let mut curves = Vec::new();
    let mut details = Vec::new();
    let mut ok = true;
    for a in altitudes {
        match delay_curve(base, a, &grid, NetworkVariant::Integrated) {
            Ok(c) => {
                if let Some((n, y0, y1)) = first_increase(&grid, &c, true) {
                    ok = false;
                    details.push(format!("{a} km: delay does not fall at N_s = {n} ({y0:.6} to {y1:.6})"));
                }
                details.push(format!("{a} km: T(200) = {:.4}, T(2500) = {:.4}", c[0], c[c.len() - 1]));
                curves.push(c);
            }
            Err(e) => return CriterionReport::failed(4, TITLE, &e),
        }
    }
    let at = |k: usize| curves.iter().map(|c| c[k]).collect::<Vec<f64>>();
    let spread =
        |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
    let first = at(0);
    let last = at(grid.len() - 1);
    let ratio = spread(&last) / spread(&first);
    let lowest_is_highest = last[2] < last[0] && last[2] < last[1];
    ok &= ratio <= 0.25 && lowest_is_highest;
    let summary = format!(
        "strictly decreasing: {}; spread at 2500 / spread at 200 = {ratio:.3} (tol 0.25); 1000 km lowest at 2500: {lowest_is_highest}",
        details.iter().all(|d| !d.contains("does not fall"))
    );
    CriterionReport::new(4, TITLE, ok, summary, details)
}

pub fn criterion_5(base: &ConfigDocument) -> CriterionReport {
    const TITLE: &str = "integrated network beats both single-tier networks";
    let grid = satellite_grid();
    let curves: Result<Vec<Vec<f64>>, Error> = [NetworkVariant::Integrated, NetworkVariant::SatOnly, NetworkVariant::CsOnly]
        .iter()
        .map(|&v| delay_curve(base, 500.0, &grid, v))
        .collect();
    let c = match curves {
        Ok(c) => c,
        Err(e) => return CriterionReport::failed(5, TITLE, &e),
    };
    let mut holds = 0;
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    let mut sat_beats_cs = Vec::new();
    for k in 0..grid.len() {
        let best = c[1][k].min(c[2][k]);
        if c[0][k] <= best {
            holds += 1;
        }
        worst = worst.max(c[0][k] / best);
        if c[1][k] < c[2][k] {
            sat_beats_cs.push(grid[k]);
        }
    }
    for k in [0, grid.len() / 2, grid.len() - 1] {
        details.push(format!(
            "N_s = {}: integrated {:.6e}, sat only {:.6e}, cs only {:.6e}",
            grid[k], c[0][k], c[1][k], c[2][k]
        ));
    }
    details.push(format!("N_s where satellite-only beats server-only: {sat_beats_cs:?}"));
    let summary = format!(
        "holds at {holds} of {} points; worst integrated / best single tier = {worst:.3e}",
        grid.len()
    );
    CriterionReport::new(5, TITLE, holds == grid.len(), summary, details)
}

pub fn criterion_6(base: &ConfigDocument) -> CriterionReport {
    const TITLE: &str = "delay trends across constellations and UE density";
    let mut ok = true;
    let mut details = Vec::new();
    for fam in families() {
        let members: Vec<_> = PRESETS.iter().filter(|p| p.family == fam).collect();
        let mut altitudes: Vec<f64> = members.iter().map(|p| p.altitude_km).collect();
        altitudes.dedup();
        for a in altitudes {
            let mut counts = satellite_grid();
            counts.extend(members.iter().filter(|p| p.altitude_km == a).map(|p| p.satellites as i64));
            counts.sort_unstable();
            counts.dedup();
            match delay_curve(base, a, &counts, NetworkVariant::Integrated) {
                Ok(c) => {
                    let bad = first_increase(&counts, &c, false);
                    ok &= bad.is_none();
                    details.push(match bad {
                        None => format!(
                            "{fam} at {a} km: nonincreasing over N_s {}..{}",
                            counts[0],
                            counts[counts.len() - 1]
                        ),
                        Some((n, y0, y1)) => format!("{fam} at {a} km: rises at N_s = {n} ({y0:.6} to {y1:.6})"),
                    });
                }
                Err(e) => return CriterionReport::failed(6, TITLE, &e),
            }
        }
    }
    let densities: Vec<f64> = (3..=15).map(|k| 5.0 * k as f64).collect();
    let ue: Result<Vec<f64>, Error> = densities
        .par_iter()
        .map(|&l| {
            Ok(mean_delay(
                &build(base, &[("link.lambda_u_per_km2", toml::Value::Float(l))])?,
                NetworkVariant::Integrated,
            )?)
        })
        .collect();
    match ue {
        Ok(c) => {
            let bad = c.windows(2).position(|w| w[1] < w[0]);
            ok &= bad.is_none();
            details.push(format!(
                "lambda_u 15..75: T = {:.4} .. {:.4}{}",
                c[0],
                c[c.len() - 1],
                bad.map(|k| format!(", falls after {}", densities[k])).unwrap_or_default()
            ));
        }
        Err(e) => return CriterionReport::failed(6, TITLE, &e),
    }
    let presets: Result<Vec<(String, f64)>, Error> = PRESETS
        .par_iter()
        .map(|p| {
            let scn = preset_document(base, p)?.build()?;
            Ok((p.name.to_string(), mean_delay(&scn, NetworkVariant::Integrated)?))
        })
        .collect();
    if let Ok(p) = presets {
        details.push(format!(
            "preset delays: {}",
            p.iter().map(|(n, t)| format!("{n} {t:.4}")).collect::<Vec<_>>().join(", ")
        ));
    }
    let summary = format!(
        "{} family curves and the UE-density curve {}",
        families().len(),
        if ok { "are monotone" } else { "include a violation" }
    );
    CriterionReport::new(6, TITLE, ok, summary, details)
}

struct PairCheck {
    name: String,
    monotone: bool,
    in_range: bool,
    pdf_ok: bool,
    integral_err: f64,
    mass_err: f64,
}

/// ∫_lo^x pdf via x = lo + t², which removes an inverse square-root edge.
fn integrate_from_edge(pdf: &dyn Fn(f64) -> f64, lo: f64, x: f64) -> Result<f64, NumericalError> {
    let q = QuadratureSpec::new(1e-13, 1e-11, 4000)?;
    let top = (x - lo).max(0.0).sqrt();
    Ok(integrate_with_breakpoints(|t| pdf(lo + t * t) * 2.0 * t, &[0.0, 0.5 * top, top], &q)?.value)
}

fn check_pair(
    name: String,
    cdf: &dyn Fn(f64) -> f64,
    pdf: Option<&dyn Fn(f64) -> f64>,
    lo: f64,
    hi: f64,
    mass_at_hi: f64,
) -> Result<PairCheck, (String, NumericalError)> {
    let n = 2000;
    let xs: Vec<f64> = (0..=n)
        .map(|k| lo - 0.1 * (hi - lo) + 1.2 * (hi - lo) * k as f64 / n as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| cdf(x)).collect();
    let monotone = fs.windows(2).all(|w| w[1] >= w[0]);
    let in_range = fs.iter().all(|&v| (0.0..=1.0).contains(&v));
    let mut pdf_ok = true;
    let mut integral_err = 0.0f64;
    if let Some(pdf) = pdf {
        pdf_ok = xs.iter().all(|&x| {
            let v = pdf(x);
            v.is_finite() && v >= 0.0
        });
        for k in 1..=10 {
            let x = lo + (hi - lo) * k as f64 / 10.0;
            let x = if k == 10 { hi * (1.0 - 1e-12) } else { x };
            let int = integrate_from_edge(pdf, lo, x).map_err(|e| (name.clone(), e))?;
            integral_err = integral_err.max((int - cdf(x)).abs());
        }
    }
    Ok(PairCheck {
        name,
        monotone,
        in_range,
        pdf_ok,
        integral_err,
        mass_err: (cdf(hi) - mass_at_hi).abs(),
    })
}

pub fn criterion_7(base: &ConfigDocument, opts: &ValidateOptions) -> CriterionReport {
    const TITLE: &str = "distribution validity";
    let scn = match base.build() {
        Ok(s) => s,
        Err(e) => return CriterionReport::failed(7, TITLE, &e.into()),
    };
    let mut checks: Vec<Result<PairCheck, (String, NumericalError)>> = Vec::new();
    for a in [500e3, 1000e3] {
        let g = match ConstellationGeometry::new(scn.geometry.earth_radius(), a, 1000) {
            Ok(g) => g,
            Err(e) => return CriterionReport::failed(7, TITLE, &e.into()),
        };
        let h = horizon(&g);
        for n in [1.0, 61.97, 250.0, 1000.0] {
            let vis = 1.0 - (1.0 - h.theta_c / PI).powf(n);
            checks.push(check_pair(
                format!("nearest satellite a_s={} km n={n}", a / 1e3),
                &|x| contact_cdf_nearest_sat(x, n, &g),
                Some(&|x| contact_pdf_nearest_sat(x, n, &g)),
                a,
                h.d_max_down,
                vis,
            ));
            let cap = 0.5 * (1.0 - h.theta_c.cos());
            checks.push(check_pair(
                format!("nearest satellite (area-uniform) a_s={} km n={n}", a / 1e3),
                &|x| contact_cdf_nearest_sat_area_uniform(x, n, &g),
                None,
                a,
                h.d_max_down,
                1.0 - (1.0 - cap).powf(n),
            ));
        }
        checks.push(check_pair(
            format!("serving uplink satellite a_s={} km", a / 1e3),
            &|x| contact_cdf_serving_sat_uplink(x, &g),
            Some(&|x| contact_pdf_serving_sat_uplink(x, &g)),
            a,
            h.d_max_up,
            1.0,
        ));
    }
    for lambda in [1e-6, 1e-5] {
        let hi = (40.0 / (lambda * PI)).sqrt();
        checks.push(check_pair(
            format!("nearest cloud server lambda={lambda:e}/m2"),
            &|x| nearest_cs_cdf(x, lambda),
            Some(&|x| nearest_cs_pdf(x, lambda)),
            0.0,
            hi,
            1.0 - (-lambda * PI * hi * hi).exp(),
        ));
    }
    let mut ok = true;
    let mut details = Vec::new();
    let mut worst_int = 0.0f64;
    for c in checks {
        match c {
            Ok(c) => {
                let pass = c.monotone && c.in_range && c.pdf_ok && c.integral_err <= 1e-8 && c.mass_err <= 1e-12;
                ok &= pass;
                worst_int = worst_int.max(c.integral_err);
                if !pass {
                    details.push(format!(
                        "{}: monotone {} range {} pdf {} integral error {:.2e} mass error {:.2e}",
                        c.name, c.monotone, c.in_range, c.pdf_ok, c.integral_err, c.mass_err
                    ));
                }
            }
            Err((name, e)) => {
                ok = false;
                details.push(format!("{name}: quadrature failed: {e}"));
            }
        }
    }

    let sr = scn.params.sr;
    let n = opts.ks_samples;
    let mut samples: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5a11);
            rng.set_stream(i);
            sample_sr_power(&sr, &mut rng)
        })
        .collect();
    samples.par_sort_by(f64::total_cmp);
    let cdf_vals: Result<Vec<f64>, NumericalError> = samples.par_iter().map(|&x| sr_power_cdf(x, &sr, SR_SERIES_TOL)).collect();
    let d = match cdf_vals {
        Ok(vals) => ks_from_sorted_cdf(&vals),
        Err(e) => return CriterionReport::failed(7, TITLE, &e.into()),
    };
    let crit = ks_critical(n);
    ok &= d <= crit;
    details.push(format!("fading sampler KS D = {d:.3e} vs {crit:.3e} at n = {n}"));
    let summary = format!("worst CDF/PDF integral mismatch {worst_int:.1e}; fading KS D = {d:.2e} (critical {crit:.2e})");
    CriterionReport::new(7, TITLE, ok, summary, details)
}

pub fn criterion_8(base: &ConfigDocument, opts: &ValidateOptions) -> CriterionReport {
    const TITLE: &str = "deterministic compare output";
    let mut doc = base.clone();
    if let Err(e) = doc.set("sim.trials", toml::Value::Integer(opts.determinism_trials as i64)) {
        return CriterionReport::failed(8, TITLE, &e.into());
    }
    let sweeps = match Sweep::new(SweepVar::Satellites, vec![600.0, 1000.0]) {
        Ok(s) => vec![s],
        Err(e) => return CriterionReport::failed(8, TITLE, &e.into()),
    };
    let mut outputs = Vec::new();
    for threads in [1usize, 1, 8, 8] {
        let r = in_pool(Some(threads), || {
            sweep_csv(&doc, &sweeps, SweepMode::Compare, NetworkVariant::Integrated, None)
        });
        match r {
            Ok(Ok((bytes, _))) => outputs.push(bytes),
            Ok(Err(e)) => return CriterionReport::failed(8, TITLE, &e),
            Err(e) => return CriterionReport::failed(8, TITLE, &e.into()),
        }
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    let summary = format!(
        "4 runs (1, 1, 8, 8 threads) of {} bytes each: {}",
        outputs[0].len(),
        if same { "identical" } else { "differ" }
    );
    let details = vec![format!(
        "first line: {}",
        String::from_utf8_lossy(outputs[0].split(|&b| b == b'\n').nth(1).unwrap_or_default())
            .chars()
            .take(80)
            .collect::<String>()
    )];
    CriterionReport::new(8, TITLE, same, summary, details)
}
