//! Monte Carlo estimates of association, coverage and plug-in delay.
//!
//! Trial `t` of task slot `k` draws from a ChaCha8 stream keyed by
//! `(k << 40) | t` under the master seed, and trials are reduced in fixed
//! chunks in index order. Results therefore do not depend on the number of
//! worker threads.

pub mod queue;
pub mod sampling;
pub mod trial;

mod estimate;

pub use estimate::{ks_critical, ks_from_sorted_cdf, ks_statistic, mean_ci, wilson, Estimate, KS_95, Z95};

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{delay_stage, first_equivalent, NetworkVariant, ScenarioAnalysis, TierInputs};
use crate::coverage::LinkCoverage;
use crate::error::{ConfigError, Error, NumericalError};
use crate::params::{SatelliteLaw, Scenario};
use crate::report::float17;

use sampling::ground_disk_radius;
pub use trial::TrialOutcome;
use trial::{run_trial, TrialSetup};

const CHUNK: u64 = 4096;
const BATCH: u64 = 64 * CHUNK;
const STREAM_SHIFT: u32 = 40;

/// RNG for one trial.
pub fn trial_rng(seed: u64, slot: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((slot as u64) << STREAM_SHIFT) | trial);
    rng
}

/// Integer counts over a block of trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub trials: u64,
    pub sat_associated: u64,
    pub sat_visible: u64,
    pub sat_down: u64,
    pub sat_up: u64,
    pub cs_down: u64,
    pub cs_up: u64,
    pub served_down: u64,
    pub served_up: u64,
    pub redraws: u64,
}

impl Tally {
    fn record(&mut self, o: &TrialOutcome, tau: f64) {
        self.trials += 1;
        self.sat_associated += (o.tier == trial::Tier::Satellite) as u64;
        self.sat_visible += o.sat_distance.is_some() as u64;
        if let Some(s) = o.sat_snr {
            self.sat_down += (s.down >= tau) as u64;
            self.sat_up += (s.up >= tau) as u64;
        }
        if let Some(s) = o.cs_snr {
            self.cs_down += (s.down >= tau) as u64;
            self.cs_up += (s.up >= tau) as u64;
        }
        self.served_down += o.covered_down as u64;
        self.served_up += o.covered_up as u64;
        self.redraws += o.redraws as u64;
    }

    fn merge(mut self, o: &Tally) -> Tally {
        self.trials += o.trials;
        self.sat_associated += o.sat_associated;
        self.sat_visible += o.sat_visible;
        self.sat_down += o.sat_down;
        self.sat_up += o.sat_up;
        self.cs_down += o.cs_down;
        self.cs_up += o.cs_up;
        self.served_down += o.served_down;
        self.served_up += o.served_up;
        self.redraws += o.redraws;
        self
    }
}

/// Per-trial callback within one task: trial index, outcome.
pub type OutcomeSink<'a> = dyn FnMut(u64, &TrialOutcome) -> Result<(), Error> + 'a;

/// Runs `trials` trials of `setup` on the current rayon pool. With `sink`,
/// every outcome is passed on in trial order.
pub fn run_trials(
    setup: &TrialSetup,
    seed: u64,
    slot: usize,
    trials: u64,
    mut sink: Option<&mut OutcomeSink<'_>>,
) -> Result<Tally, Error> {
    let keep = sink.is_some();
    let mut total = Tally::default();
    let mut start = 0;
    while start < trials {
        let end = (start + BATCH).min(trials);
        let chunks: Vec<(u64, u64)> = (start..end)
            .step_by(CHUNK as usize)
            .map(|a| (a, (a + CHUNK).min(end)))
            .collect();
        let results: Vec<Result<(Tally, Vec<TrialOutcome>), NumericalError>> = chunks
            .par_iter()
            .map(|&(a, b)| {
                let mut t = Tally::default();
                let mut outs = Vec::new();
                for i in a..b {
                    let o = run_trial(setup, &mut trial_rng(seed, slot, i))?;
                    t.record(&o, setup.tau);
                    if keep {
                        outs.push(o);
                    }
                }
                Ok((t, outs))
            })
            .collect();
        for (&(a, _), r) in chunks.iter().zip(results) {
            let (t, outs) = r?;
            total = total.merge(&t);
            if let Some(f) = sink.as_mut() {
                for (k, o) in outs.iter().enumerate() {
                    f(a + k as u64, o)?;
                }
            }
        }
        start = end;
    }
    Ok(total)
}

/// Estimates for one task class.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSimulation {
    pub task_id: u32,
    pub satellites_of_type: u32,
    pub p_ofld: f64,
    pub tally: Tally,
    pub a_sat: Estimate,
    pub sat_visible: Estimate,
    pub sat_down: Estimate,
    pub sat_up: Estimate,
    pub cs_down: Estimate,
    pub cs_up: Estimate,
    /// Coverage of the serving link.
    pub served_down: Estimate,
    pub served_up: Estimate,
}

impl TaskSimulation {
    fn from_tally(task_id: u32, satellites_of_type: u32, p_ofld: f64, t: Tally) -> Self {
        let n = t.trials;
        Self {
            task_id,
            satellites_of_type,
            p_ofld,
            tally: t,
            a_sat: wilson(t.sat_associated, n),
            sat_visible: wilson(t.sat_visible, n),
            sat_down: wilson(t.sat_down, n),
            sat_up: wilson(t.sat_up, n),
            cs_down: wilson(t.cs_down, n),
            cs_up: wilson(t.cs_up, n),
            served_down: wilson(t.served_down, n),
            served_up: wilson(t.served_up, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSimulation {
    pub trials: u64,
    pub seed: u64,
    pub law: SatelliteLaw,
    pub disk_radius: f64,
    pub tasks: Vec<TaskSimulation>,
    /// The delay pipeline with simulated association and coverage in place
    /// of the closed forms.
    pub plug_in: ScenarioAnalysis,
}

/// Per-trial callback: task id, trial index, outcome.
pub type TrialSink<'a> = dyn FnMut(u32, u64, &TrialOutcome) -> Result<(), Error> + 'a;

/// Simulates every task class of the scenario with its analytic
/// offloading probability. `inputs` come from
/// [`crate::analysis::tier_inputs`]. Identical task classes reuse one run
/// and are reported to `sink` once.
pub fn simulate(
    scn: &Scenario,
    inputs: &[TierInputs],
    mut sink: Option<&mut TrialSink<'_>>,
) -> Result<ScenarioSimulation, Error> {
    let p = &scn.params;
    let radius = ground_disk_radius(p.lambda_c, scn.sim.disk_radius)?;
    let counts = scn.satellites_per_type();
    let mut tasks: Vec<TaskSimulation> = Vec::with_capacity(p.tasks.len());
    for (i, spec) in p.tasks.iter().enumerate() {
        if let Some(j) = first_equivalent(scn, i) {
            let mut t = tasks[j].clone();
            t.task_id = spec.id;
            tasks.push(t);
            continue;
        }
        let setup = TrialSetup::new(p, scn.geometry, scn.sim.satellite_law, counts[i], inputs[i].p_ofld, radius);
        let tally = match sink.as_mut() {
            Some(f) => {
                let mut g = |trial: u64, o: &TrialOutcome| f(spec.id, trial, o);
                run_trials(&setup, scn.sim.seed, i, scn.sim.trials, Some(&mut g))?
            }
            None => run_trials(&setup, scn.sim.seed, i, scn.sim.trials, None)?,
        };
        tasks.push(TaskSimulation::from_tally(spec.id, counts[i], inputs[i].p_ofld, tally));
    }

    let sim_inputs: Vec<TierInputs> = inputs
        .iter()
        .zip(&tasks)
        .map(|(a, t)| TierInputs {
            fixed_point: a.fixed_point,
            p_ofld: a.p_ofld,
            n_offloadable: a.n_offloadable,
            a_sat: t.a_sat.mean,
            a_cs: 1.0 - t.a_sat.mean,
            coverage: LinkCoverage {
                sat_down: t.sat_down.mean,
                cs_down: t.cs_down.mean,
                sat_up: t.sat_up.mean,
                cs_up: t.cs_up.mean,
            },
        })
        .collect();
    Ok(ScenarioSimulation {
        trials: scn.sim.trials,
        seed: scn.sim.seed,
        law: scn.sim.satellite_law,
        disk_radius: radius,
        tasks,
        plug_in: delay_stage(scn, NetworkVariant::Integrated, &sim_inputs),
    })
}

/// Delimited per-trial dump for debugging.
pub struct TrialDump<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> TrialDump<W> {
    pub const HEADER: [&'static str; 11] = [
        "point",
        "task_id",
        "trial",
        "tier",
        "sat_distance_m",
        "cs_distance_m",
        "snr_sat_down",
        "snr_sat_up",
        "snr_cs_down",
        "snr_cs_up",
        "redraws",
    ];

    pub fn new(w: W) -> Result<Self, Error> {
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(Self::HEADER).map_err(dump_error)?;
        Ok(Self { writer })
    }

    pub fn write(&mut self, point: usize, task: u32, trial: u64, o: &TrialOutcome) -> Result<(), Error> {
        let opt = |x: Option<f64>| x.map(float17).unwrap_or_default();
        self.writer
            .write_record([
                point.to_string(),
                task.to_string(),
                trial.to_string(),
                o.tier.name().to_string(),
                opt(o.sat_distance),
                opt(o.cs_distance),
                opt(o.sat_snr.map(|s| s.down)),
                opt(o.sat_snr.map(|s| s.up)),
                opt(o.cs_snr.map(|s| s.down)),
                opt(o.cs_snr.map(|s| s.up)),
                o.redraws.to_string(),
            ])
            .map_err(dump_error)
    }

    pub fn finish(mut self) -> Result<(), Error> {
        self.writer.flush().map_err(|e| dump_error(e.into()))
    }
}

fn dump_error(e: csv::Error) -> Error {
    ConfigError::Io {
        path: "trial dump".into(),
        reason: e.to_string(),
    }
    .into()
}
