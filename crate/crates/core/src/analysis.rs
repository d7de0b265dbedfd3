//! End-to-end analytic evaluation of one scenario.
//!
//! Per task: offloadability fixed point → association → coverage → loads →
//! transmission and response times → average delay. Only the fixed point
//! couples quantities in a cycle; the rest is evaluated in that order.

use std::fmt;
use std::str::FromStr;

use crate::association::{assoc_prob_cs, assoc_prob_sat};
use crate::coverage::{
    cov_down_cs, cov_down_sat, cov_up_cs, sat_fading, sat_uplink_conditional, total_cov_down, total_cov_up, LinkCoverage, TaskMix,
};
use crate::error::{ConfigError, NumericalError};
use crate::geometry::visibility_weight;
use crate::numerics::QuadratureSpec;
use crate::params::{derived_sat_density, Scenario};
use crate::queueing::{
    average_delay, bisection_fixed_point, cs_response_times, mean_loads, offload_probability, sat_response_time,
    solve_offload_fixed_point, transmission_time, CsClass, DelayBreakdown, FixedPoint, FixedPointMethod, FixedPointOptions,
    TierLoad, TierTimes,
};

/// Which server tiers are in operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NetworkVariant {
    #[default]
    Integrated,
    /// Every UE uses its nearest cloud server.
    CsOnly,
    /// Every UE is charged the satellite-tier times.
    SatOnly,
}

impl NetworkVariant {
    pub const ALL: [NetworkVariant; 3] = [NetworkVariant::Integrated, NetworkVariant::SatOnly, NetworkVariant::CsOnly];

    pub fn name(self) -> &'static str {
        match self {
            NetworkVariant::Integrated => "integrated",
            NetworkVariant::CsOnly => "cs_only",
            NetworkVariant::SatOnly => "sat_only",
        }
    }
}

impl fmt::Display for NetworkVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NetworkVariant {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NetworkVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| ConfigError::BadValue {
                key: "variant".into(),
                reason: format!("`{s}` is not one of integrated, sat_only, cs_only"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub quad: QuadratureSpec,
    pub fixed_point: FixedPointOptions,
}

/// Everything computed for one task class.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskAnalysis {
    pub task_id: u32,
    /// N_{s_i}.
    pub satellites_of_type: u32,
    pub fixed_point: Option<FixedPoint>,
    pub p_ofld: f64,
    /// N_i = N_{s_i}·P_ofld.
    pub n_offloadable: f64,
    pub a_sat: f64,
    pub a_cs: f64,
    pub coverage: LinkCoverage,
    pub loads: TierLoad,
    /// Per-satellite task arrival rate Λ_{s,i}.
    pub lambda_sat: f64,
    pub rho_sat: f64,
    /// Per-server task arrival rate Λ_{c,i}.
    pub lambda_cs: f64,
    pub mu_sat: f64,
    pub mu_cs: f64,
    pub sat_times: Result<TierTimes, NumericalError>,
    pub cs_times: Result<TierTimes, NumericalError>,
    pub delay: Result<DelayBreakdown, NumericalError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioAnalysis {
    pub variant: NetworkVariant,
    pub tasks: Vec<TaskAnalysis>,
    pub total_cov_down: f64,
    pub total_cov_up: f64,
}

impl ScenarioAnalysis {
    /// Σ q_i T^i_avg, or the first task error.
    pub fn mean_delay(&self, scn: &Scenario) -> Result<f64, NumericalError> {
        let mut sum = 0.0;
        for (t, spec) in self.tasks.iter().zip(&scn.params.tasks) {
            sum += spec.probability * t.delay.as_ref().map_err(Clone::clone)?.t_avg;
        }
        Ok(sum)
    }
}

/// Scenario-wide quantities that do not depend on a task's satellite count.
#[derive(Debug, Clone, Copy)]
struct Shared {
    cs_down: f64,
    cs_up: f64,
    sat_up_given_visible: f64,
}

fn shared(scn: &Scenario, quad: &QuadratureSpec) -> Result<Shared, NumericalError> {
    let (p, g) = (&scn.params, &scn.geometry);
    Ok(Shared {
        cs_down: cov_down_cs(p.tau, p, g, quad)?,
        cs_up: cov_up_cs(p.tau, p, g, quad)?,
        sat_up_given_visible: sat_uplink_conditional(sat_fading(p), p.tau, p, g, quad)?,
    })
}

/// The map G(P) = P_ofld(ρ(P)) whose fixed point fixes a task's
/// offloadability. `force_sat` pins satellite association to 1 instead of
/// computing it from the association integral.
pub fn offload_map(
    scn: &Scenario,
    task: usize,
    force_sat: bool,
    quad: QuadratureSpec,
) -> Result<impl Fn(f64) -> Result<f64, NumericalError> + '_, NumericalError> {
    let sh = shared(scn, &quad)?;
    Ok(offload_map_with(scn, task, force_sat, quad, sh.sat_up_given_visible))
}

fn offload_map_with(
    scn: &Scenario,
    task: usize,
    force_sat: bool,
    quad: QuadratureSpec,
    sat_up_given_visible: f64,
) -> impl Fn(f64) -> Result<f64, NumericalError> + '_ {
    let (p, g) = (&scn.params, &scn.geometry);
    let spec = &p.tasks[task];
    let n_si = scn.satellites_per_type()[task] as f64;
    let lambda_si = derived_sat_density(n_si, g.shell_radius());
    let mu_s = p.cpu_sat / spec.cycles;
    move |x: f64| {
        let n_i = n_si * x;
        let a_sat = if force_sat { 1.0 } else { assoc_prob_sat(n_i, p, g, &quad)? };
        let p_up = visibility_weight(n_i, g) * sat_up_given_visible;
        let lambda = a_sat * p.lambda_u * spec.probability * p_up / lambda_si;
        Ok(offload_probability(lambda / mu_s, p.buffer))
    }
}

/// Solves the fixed point for one task both ways and returns
/// (damped-with-fallback, bisection).
pub fn fixed_point_pair(
    scn: &Scenario,
    task: usize,
    variant: NetworkVariant,
    opts: &AnalysisOptions,
) -> Result<(FixedPoint, FixedPoint), NumericalError> {
    let g = offload_map(scn, task, variant == NetworkVariant::SatOnly, opts.quad)?;
    Ok((
        solve_offload_fixed_point(&g, &opts.fixed_point)?,
        bisection_fixed_point(&g, 1e-12)?,
    ))
}

/// Per-task inputs of the load and delay stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierInputs {
    pub fixed_point: Option<FixedPoint>,
    pub p_ofld: f64,
    pub n_offloadable: f64,
    pub a_sat: f64,
    pub a_cs: f64,
    pub coverage: LinkCoverage,
}

/// Offloadability, association and coverage for every task. Identical task
/// classes share one evaluation.
pub fn tier_inputs(scn: &Scenario, variant: NetworkVariant, opts: &AnalysisOptions) -> Result<Vec<TierInputs>, NumericalError> {
    let (p, g) = (&scn.params, &scn.geometry);
    let quad = opts.quad;
    let sh = shared(scn, &quad)?;
    let counts = scn.satellites_per_type();

    let mut out: Vec<TierInputs> = Vec::with_capacity(p.tasks.len());
    for (i, &count) in counts.iter().enumerate() {
        if let Some(j) = first_equivalent(scn, i) {
            let c = out[j];
            out.push(c);
            continue;
        }
        let n_si = count as f64;
        let (fixed_point, p_ofld) = match variant {
            NetworkVariant::CsOnly => (None, 1.0),
            _ if count == 0 => (None, 1.0),
            _ => {
                let map = offload_map_with(scn, i, variant == NetworkVariant::SatOnly, quad, sh.sat_up_given_visible);
                let fp = solve_offload_fixed_point(map, &opts.fixed_point)?;
                (Some(fp), fp.p_ofld)
            }
        };
        let n_i = n_si * p_ofld;
        let (a_sat, a_cs) = match variant {
            NetworkVariant::Integrated => (assoc_prob_sat(n_i, p, g, &quad)?, assoc_prob_cs(n_i, p, g, &quad)?),
            NetworkVariant::CsOnly => (0.0, 1.0),
            NetworkVariant::SatOnly => (1.0, 0.0),
        };
        out.push(TierInputs {
            fixed_point,
            p_ofld,
            n_offloadable: n_i,
            a_sat,
            a_cs,
            coverage: LinkCoverage {
                sat_down: cov_down_sat(p.tau, n_i, p, g, &quad)?,
                cs_down: sh.cs_down,
                sat_up: visibility_weight(n_i, g) * sh.sat_up_given_visible,
                cs_up: sh.cs_up,
            },
        });
    }
    Ok(out)
}

/// Index of an earlier task with the same cycles, probability and satellite
/// count, whose offloading and coverage are therefore identical.
pub fn first_equivalent(scn: &Scenario, task: usize) -> Option<usize> {
    let counts = scn.satellites_per_type();
    let key = |i: usize| {
        let t = &scn.params.tasks[i];
        (t.cycles.to_bits(), t.probability.to_bits(), counts[i])
    };
    (0..task).find(|&j| key(j) == key(task))
}

pub fn analyze(scn: &Scenario, variant: NetworkVariant, opts: &AnalysisOptions) -> Result<ScenarioAnalysis, NumericalError> {
    let inputs = tier_inputs(scn, variant, opts)?;
    Ok(delay_stage(scn, variant, &inputs))
}

/// Loads, queueing and transmission times, and the resulting delays, from
/// per-task association and coverage.
pub fn delay_stage(scn: &Scenario, variant: NetworkVariant, inputs: &[TierInputs]) -> ScenarioAnalysis {
    let (p, g) = (&scn.params, &scn.geometry);
    let counts = scn.satellites_per_type();

    let mut tasks = Vec::with_capacity(p.tasks.len());
    for (i, (spec, c)) in p.tasks.iter().zip(inputs).enumerate() {
        let lambda_si = derived_sat_density(counts[i] as f64, g.shell_radius());
        let coverage = c.coverage;
        let lambda_ui = spec.probability * p.lambda_u;
        let loads = mean_loads(lambda_ui, c.a_sat, lambda_si, p.lambda_u, c.a_cs, p.lambda_c, p.bandwidth);
        let mu_sat = p.cpu_sat / spec.cycles;
        let mu_cs = p.cpu_cs / spec.cycles;
        let lambda_sat = if lambda_si > 0.0 {
            c.a_sat * p.lambda_u * spec.probability * coverage.sat_up / lambda_si
        } else {
            0.0
        };
        let lambda_cs = c.a_cs * p.lambda_u * spec.probability * coverage.cs_up / p.lambda_c;
        tasks.push(TaskAnalysis {
            task_id: spec.id,
            satellites_of_type: counts[i],
            fixed_point: c.fixed_point,
            p_ofld: c.p_ofld,
            n_offloadable: c.n_offloadable,
            a_sat: c.a_sat,
            a_cs: c.a_cs,
            coverage,
            loads,
            lambda_sat,
            rho_sat: lambda_sat / mu_sat,
            lambda_cs,
            mu_sat,
            mu_cs,
            sat_times: Err(NumericalError::NonFinite("not evaluated")),
            cs_times: Err(NumericalError::NonFinite("not evaluated")),
            delay: Err(NumericalError::NonFinite("not evaluated")),
        });
    }

    let classes: Vec<CsClass> = tasks
        .iter()
        .map(|t| CsClass {
            lambda: t.lambda_cs,
            mu: t.mu_cs,
        })
        .collect();
    let cs_response = cs_response_times(&classes);

    for (i, (t, spec)) in tasks.iter_mut().zip(&p.tasks).enumerate() {
        t.cs_times = cs_response.as_ref().map_err(Clone::clone).and_then(|r| {
            Ok(TierTimes {
                response: r[i],
                up: transmission_time(spec.input_bits, t.coverage.cs_up, t.loads.w_cs, p.tau, "UE-CS uplink")?,
                down: transmission_time(spec.output_bits, t.coverage.cs_down, t.loads.w_cs, p.tau, "CS-UE downlink")?,
            })
        });
        t.sat_times = if t.satellites_of_type == 0 {
            Err(NumericalError::Unserviceable("satellite"))
        } else {
            (|| {
                Ok(TierTimes {
                    response: sat_response_time(t.lambda_sat, t.mu_sat, p.buffer),
                    up: transmission_time(
                        spec.input_bits,
                        t.coverage.sat_up,
                        t.loads.w_sat,
                        p.tau,
                        "UE-satellite uplink",
                    )?,
                    down: transmission_time(
                        spec.output_bits,
                        t.coverage.sat_down,
                        t.loads.w_sat,
                        p.tau,
                        "satellite-UE downlink",
                    )?,
                })
            })()
        };
        t.delay = tier_delay(t.a_cs, &t.cs_times, t.a_sat, &t.sat_times);
    }

    let mix: Vec<TaskMix> = tasks
        .iter()
        .zip(&p.tasks)
        .map(|(t, s)| TaskMix {
            probability: s.probability,
            a_sat: t.a_sat,
            a_cs: t.a_cs,
            coverage: t.coverage,
        })
        .collect();
    ScenarioAnalysis {
        variant,
        total_cov_down: total_cov_down(&mix),
        total_cov_up: total_cov_up(&mix),
        tasks,
    }
}

/// A tier with zero weight never blocks the delay, whatever its error.
fn tier_delay(
    a_cs: f64,
    cs: &Result<TierTimes, NumericalError>,
    a_sat: f64,
    sat: &Result<TierTimes, NumericalError>,
) -> Result<DelayBreakdown, NumericalError> {
    let pick = |w: f64, r: &Result<TierTimes, NumericalError>| -> Result<Option<TierTimes>, NumericalError> {
        match (w > 0.0, r) {
            (false, Ok(t)) => Ok(Some(*t)),
            (false, Err(_)) => Ok(None),
            (true, Ok(t)) => Ok(Some(*t)),
            (true, Err(e)) => Err(e.clone()),
        }
    };
    average_delay(a_cs, pick(a_cs, cs)?, a_sat, pick(a_sat, sat)?)
}

/// Fixed-point method label for reports.
pub fn method_label(fp: &Option<FixedPoint>) -> &'static str {
    match fp {
        None => "none",
        Some(FixedPoint {
            method: FixedPointMethod::Damped,
            ..
        }) => "damped",
        Some(FixedPoint {
            method: FixedPointMethod::Bisection,
            ..
        }) => "bisection",
    }
}
