//! Command-line experiment runner.
//!
//! Exit codes: 0 success, 1 config or I/O error, 2 numerical failure at
//! some evaluation point, 3 validation failure.

pub mod args;
pub mod sweep;
pub mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use clap::Parser;
use rayon::prelude::*;

use crate::analysis::{analyze, delay_stage, tier_inputs, AnalysisOptions, NetworkVariant};
use crate::error::{ConfigError, Error};
use crate::montecarlo::sampling::ground_disk_radius;
use crate::montecarlo::{simulate, TrialDump, TrialOutcome, TrialSink};
use crate::params::{ConfigDocument, REFERENCE_TOML};
use crate::presets::{find_preset, ConstellationPreset, PRESETS};
use crate::validate::{run_all, ValidateOptions};

use args::{Cli, Command, CommonArgs, PresetMode, SweepArgs};
use sweep::{expand, Sweep, SweepPoint};
use table::{PointResult, SweepMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// N_s grid used by `baselines` when no sweep is given.
pub const DEFAULT_SATELLITE_GRID: [f64; 6] = [200.0, 600.0, 1000.0, 1500.0, 2000.0, 2500.0];

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => EXIT_CONFIG,
                Error::Numerical(_) => EXIT_NUMERICAL,
            }
        }
    }
}

fn execute(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Analytic(a) => {
            let variant: NetworkVariant = a.variant.parse()?;
            sweep_command(&a.sweep, SweepMode::Analytic, variant, None)
        }
        Command::Simulate(a) => sweep_command(
            &a.sweep,
            SweepMode::Simulate,
            NetworkVariant::Integrated,
            a.dump_trials.as_deref(),
        ),
        Command::Compare(a) => sweep_command(
            &a.sweep,
            SweepMode::Compare,
            NetworkVariant::Integrated,
            a.dump_trials.as_deref(),
        ),
        Command::Preset(a) => {
            let base = base_document(&a.common)?;
            let presets = match &a.name {
                Some(n) => vec![find_preset(n)?],
                None => PRESETS.to_vec(),
            };
            let with_sim = a.mode == PresetMode::Simulate;
            let (bytes, failed) = in_pool(a.common.threads, || preset_csv(&base, &presets, with_sim))??;
            write_output(&a.out, &bytes)?;
            Ok(if failed { EXIT_NUMERICAL } else { EXIT_OK })
        }
        Command::Baselines(a) => {
            let base = base_document(&a.common)?;
            let mut sweeps = parse_sweeps(&a.sweep)?;
            if sweeps.is_empty() {
                sweeps.push(Sweep::new(sweep::SweepVar::Satellites, DEFAULT_SATELLITE_GRID.to_vec())?);
            }
            let (bytes, failed) = in_pool(a.common.threads, || baselines_csv(&base, &sweeps))??;
            write_output(&a.out, &bytes)?;
            Ok(if failed { EXIT_NUMERICAL } else { EXIT_OK })
        }
        Command::Validate(a) => {
            let base = base_document(&a.common)?;
            base.build()?;
            let opts = ValidateOptions {
                trials: a.common.trials.or(ValidateOptions::default().trials),
                ..ValidateOptions::default()
            };
            let reports = in_pool(a.common.threads, || run_all(&base, &opts))?;
            for r in &reports {
                println!("{}", r.line());
            }
            if let Some(out) = &a.out {
                write_output(out, &crate::validate::report_csv(&reports).map_err(csv_error)?)?;
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            println!("{} of {} checks passed", reports.len() - failed, reports.len());
            Ok(if failed == 0 { EXIT_OK } else { EXIT_VALIDATION })
        }
    }
}

/// The config file (or the bundled reference scenario) with `--set`,
/// `--seed` and `--trials` applied.
pub fn base_document(common: &CommonArgs) -> Result<ConfigDocument, ConfigError> {
    let mut doc = match &common.config {
        Some(p) => ConfigDocument::load(p)?,
        None => ConfigDocument::parse(REFERENCE_TOML)?,
    };
    for s in &common.set {
        doc.apply_override(s)?;
    }
    let int = |key: &str, v: u64| -> Result<toml::Value, ConfigError> {
        i64::try_from(v)
            .map(toml::Value::Integer)
            .map_err(|_| ConfigError::OutOfRange {
                key: key.into(),
                expected: "at most 2^63 - 1",
                value: v as f64,
            })
    };
    if let Some(seed) = common.seed {
        doc.set("sim.seed", int("sim.seed", seed)?)?;
    }
    if let Some(trials) = common.trials {
        doc.set("sim.trials", int("sim.trials", trials)?)?;
    }
    doc.build()?;
    Ok(doc)
}

fn parse_sweeps(specs: &[String]) -> Result<Vec<Sweep>, ConfigError> {
    specs.iter().map(|s| Sweep::parse(s)).collect()
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global
/// pool when unset.
pub fn in_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, ConfigError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(ConfigError::OutOfRange {
            key: "threads".into(),
            expected: "at least 1",
            value: 0.0,
        }),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ConfigError::BadValue {
                    key: "threads".into(),
                    reason: e.to_string(),
                })?;
            Ok(pool.install(f))
        }
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), ConfigError> {
    std::fs::write(path, bytes).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn csv_error(e: csv::Error) -> ConfigError {
    ConfigError::Io {
        path: "csv".into(),
        reason: e.to_string(),
    }
}

fn sweep_command(a: &SweepArgs, mode: SweepMode, variant: NetworkVariant, dump: Option<&Path>) -> Result<i32, Error> {
    let base = base_document(&a.common)?;
    let sweeps = parse_sweeps(&a.sweep)?;
    let (bytes, failed) = in_pool(a.common.threads, || sweep_csv(&base, &sweeps, mode, variant, dump))??;
    write_output(&a.out, &bytes)?;
    Ok(if failed { EXIT_NUMERICAL } else { EXIT_OK })
}

/// Builds every point up front so config errors surface before any work.
fn build_points(
    base: &ConfigDocument,
    sweeps: &[Sweep],
    needs_sim: bool,
) -> Result<Vec<(SweepPoint, crate::Scenario)>, ConfigError> {
    expand(base, sweeps)?
        .into_iter()
        .map(|p| {
            let scn = p.doc.build()?;
            if needs_sim {
                ground_disk_radius(scn.params.lambda_c, scn.sim.disk_radius)?;
            }
            Ok((p, scn))
        })
        .collect()
}

fn evaluate_point(
    index: usize,
    point: SweepPoint,
    scenario: crate::Scenario,
    mode: SweepMode,
    variant: NetworkVariant,
    sink: Option<&mut TrialSink<'_>>,
) -> PointResult {
    let opts = AnalysisOptions::default();
    let (analysis, simulation) = if mode == SweepMode::Analytic {
        (analyze(&scenario, variant, &opts), None)
    } else {
        match tier_inputs(&scenario, NetworkVariant::Integrated, &opts) {
            Ok(inputs) => {
                let a = delay_stage(&scenario, NetworkVariant::Integrated, &inputs);
                (Ok(a), Some(simulate(&scenario, &inputs, sink)))
            }
            Err(e) => (Err(e), None),
        }
    };
    PointResult {
        index,
        label: point.label(),
        doc: point.doc,
        scenario,
        analysis,
        simulation,
    }
}

/// Renders a sweep as CSV. The flag reports whether any point failed.
pub fn sweep_csv(
    base: &ConfigDocument,
    sweeps: &[Sweep],
    mode: SweepMode,
    variant: NetworkVariant,
    dump: Option<&Path>,
) -> Result<(Vec<u8>, bool), Error> {
    let points = build_points(base, sweeps, mode != SweepMode::Analytic)?;
    let results: Vec<PointResult> = match dump {
        None => points
            .into_par_iter()
            .enumerate()
            .map(|(i, (p, s))| evaluate_point(i, p, s, mode, variant, None))
            .collect(),
        Some(path) => {
            // Trials are written in order, so points run one after another.
            let file = File::create(path).map_err(|e| ConfigError::Io {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            let mut dump = TrialDump::new(BufWriter::new(file))?;
            let mut out = Vec::with_capacity(points.len());
            for (i, (p, s)) in points.into_iter().enumerate() {
                let mut sink = |task: u32, trial: u64, o: &TrialOutcome| dump.write(i, task, trial, o);
                out.push(evaluate_point(i, p, s, mode, variant, Some(&mut sink)));
            }
            dump.finish()?;
            out
        }
    };
    let failed = results.iter().any(PointResult::failed);
    let rows: Vec<Vec<String>> = results.iter().flat_map(|r| table::sweep_rows(mode, r)).collect();
    let bytes = table::render(&table::sweep_header(mode), &rows).map_err(csv_error)?;
    Ok((bytes, failed))
}

/// Renders the integrated, satellite-only and server-only mean delays.
pub fn baselines_csv(base: &ConfigDocument, sweeps: &[Sweep]) -> Result<(Vec<u8>, bool), Error> {
    let points = build_points(base, sweeps, false)?;
    let opts = AnalysisOptions::default();
    let rows: Vec<(Vec<String>, bool)> = points
        .into_par_iter()
        .enumerate()
        .map(|(i, (p, scn))| {
            let delays: Vec<Result<f64, crate::NumericalError>> =
                [NetworkVariant::Integrated, NetworkVariant::SatOnly, NetworkVariant::CsOnly]
                    .iter()
                    .map(|&v| analyze(&scn, v, &opts).and_then(|a| a.mean_delay(&scn)))
                    .collect();
            let ok: Vec<Option<f64>> = delays.iter().map(|d| d.as_ref().ok().copied()).collect();
            let le_min = match (ok[0], ok[1], ok[2]) {
                (Some(i), Some(s), Some(c)) => Some(i <= s.min(c)),
                _ => None,
            };
            let sat_lt_cs = match (ok[1], ok[2]) {
                (Some(s), Some(c)) => Some(s < c),
                _ => None,
            };
            let errors: Vec<String> = ["integrated", "sat_only", "cs_only"]
                .iter()
                .zip(&delays)
                .filter_map(|(n, d)| d.as_ref().err().map(|e| format!("{n}: {e}")))
                .collect();
            let status = if errors.is_empty() {
                "ok".to_string()
            } else {
                format!("error: {}", errors.join("; "))
            };
            let mut row = vec![i.to_string(), p.label()];
            row.extend(table::scenario_echo(&p.doc));
            row.extend(ok.iter().map(|x| table::cell_opt(*x)));
            row.push(table::cell_bool(le_min));
            row.push(table::cell_bool(sat_lt_cs));
            row.push(status);
            (row, !errors.is_empty())
        })
        .collect();
    let failed = rows.iter().any(|r| r.1);
    let rows: Vec<Vec<String>> = rows.into_iter().map(|r| r.0).collect();
    Ok((table::render(&table::baselines_header(), &rows).map_err(csv_error)?, failed))
}

/// Document for a preset: the base scenario at the preset's altitude and
/// satellite count.
pub fn preset_document(base: &ConfigDocument, p: &ConstellationPreset) -> Result<ConfigDocument, ConfigError> {
    let mut doc = base.clone();
    doc.set("constellation.altitude_km", toml::Value::Float(p.altitude_km))?;
    doc.set("constellation.satellites", toml::Value::Integer(p.satellites as i64))?;
    Ok(doc)
}

/// Renders one row per preset with its delay rank (1 = lowest).
pub fn preset_csv(base: &ConfigDocument, presets: &[ConstellationPreset], with_sim: bool) -> Result<(Vec<u8>, bool), Error> {
    let docs: Vec<(ConstellationPreset, ConfigDocument, crate::Scenario)> = presets
        .iter()
        .map(|p| {
            let doc = preset_document(base, p)?;
            let scn = doc.build()?;
            if with_sim {
                ground_disk_radius(scn.params.lambda_c, scn.sim.disk_radius)?;
            }
            Ok((*p, doc, scn))
        })
        .collect::<Result<_, ConfigError>>()?;
    let evaluated: Vec<_> = docs
        .into_par_iter()
        .map(|(p, doc, scn)| {
            let mode = if with_sim { SweepMode::Compare } else { SweepMode::Analytic };
            let point = SweepPoint {
                assignments: Vec::new(),
                doc,
            };
            (p, evaluate_point(0, point, scn, mode, NetworkVariant::Integrated, None))
        })
        .collect();
    let means: Vec<Option<f64>> = evaluated
        .iter()
        .map(|(_, r)| r.analysis.as_ref().ok().and_then(|a| a.mean_delay(&r.scenario).ok()))
        .collect();
    let rank = |i: usize| -> Option<usize> {
        let m = means[i]?;
        Some(1 + means.iter().flatten().filter(|&&x| x < m).count())
    };
    let mut failed = false;
    let mut rows = Vec::with_capacity(evaluated.len());
    for (i, (p, r)) in evaluated.iter().enumerate() {
        let mut row = vec![p.name.to_string(), p.family.to_string()];
        row.extend(table::scenario_echo(&r.doc));
        row.push(table::cell_opt(means[i]));
        match &r.analysis {
            Ok(a) => {
                row.push(crate::report::float17(a.total_cov_down));
                row.push(crate::report::float17(a.total_cov_up));
            }
            Err(_) => row.extend([String::new(), String::new()]),
        }
        row.push(rank(i).map(|k| k.to_string()).unwrap_or_default());
        if with_sim {
            match &r.simulation {
                Some(Ok(s)) => {
                    row.push(s.trials.to_string());
                    row.push(s.seed.to_string());
                    row.push(table::cell_opt(s.plug_in.mean_delay(&r.scenario).ok()));
                    row.push(crate::report::float17(s.plug_in.total_cov_down));
                    row.push(crate::report::float17(s.plug_in.total_cov_up));
                }
                _ => row.extend(vec![String::new(); 5]),
            }
        }
        let status = match (&r.analysis, &r.simulation, means[i]) {
            (Err(e), _, _) => format!("error: {e}"),
            (_, Some(Err(e)), _) => format!("error: simulation: {e}"),
            (Ok(a), _, None) => format!("error: {}", a.mean_delay(&r.scenario).unwrap_err()),
            _ => "ok".into(),
        };
        failed |= r.failed();
        row.push(status);
        rows.push(row);
    }
    Ok((
        table::render(&table::preset_header(with_sim), &rows).map_err(csv_error)?,
        failed,
    ))
}
