//! Scenario parameters and the config-file boundary.
//!
//! Everything inside the library is linear SI (W, Hz, m, points per m²).
//! The config file uses the units named in each key suffix (`_dbm`, `_db`,
//! `_ghz`, `_km`, `_per_km2`, ...), and conversion happens only here.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::channel::SrFading;
use crate::error::ConfigError;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// The reference scenario shipped with the crate.
pub const REFERENCE_TOML: &str = include_str!("../configs/reference.toml");

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub id: u32,
    /// CPU cycles needed per task.
    pub cycles: f64,
    /// Input size in bits.
    pub input_bits: f64,
    /// Output size in bits.
    pub output_bits: f64,
    /// Generation probability q_i.
    pub probability: f64,
}

/// Link, fading, traffic and computing parameters in linear SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub p_u: f64,
    pub p_c: f64,
    pub p_s: f64,
    pub f_s: f64,
    pub f_c: f64,
    pub sigma2_u: f64,
    pub sigma2_c: f64,
    pub sigma2_s: f64,
    /// Terrestrial path-loss exponent.
    pub alpha: f64,
    pub lambda_c: f64,
    pub lambda_u: f64,
    /// B_s / B_c.
    pub bias_ratio: f64,
    pub bandwidth: f64,
    /// SNR threshold, linear.
    pub tau: f64,
    pub sr: SrFading,
    pub tasks: Vec<TaskSpec>,
    pub cpu_sat: f64,
    pub cpu_cs: f64,
    pub buffer: u32,
}

impl SystemParams {
    pub fn task_probabilities(&self) -> Vec<f64> {
        self.tasks.iter().map(|t| t.probability).collect()
    }
}

/// Radii in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationGeometry {
    earth_radius: f64,
    altitude: f64,
    shell_radius: f64,
    satellites: u32,
}

impl ConstellationGeometry {
    pub fn new(earth_radius: f64, altitude: f64, satellites: u32) -> Result<Self, ConfigError> {
        positive("constellation.earth_radius_km", earth_radius)?;
        positive("constellation.altitude_km", altitude)?;
        if satellites < 1 {
            return Err(ConfigError::OutOfRange {
                key: "constellation.satellites".into(),
                expected: "at least 1",
                value: satellites as f64,
            });
        }
        Ok(Self {
            earth_radius,
            altitude,
            shell_radius: earth_radius + altitude,
            satellites,
        })
    }

    pub fn earth_radius(&self) -> f64 {
        self.earth_radius
    }
    pub fn altitude(&self) -> f64 {
        self.altitude
    }
    pub fn shell_radius(&self) -> f64 {
        self.shell_radius
    }
    pub fn satellites(&self) -> u32 {
        self.satellites
    }

    /// Satellites per m² of the orbital shell.
    pub fn sat_density(&self) -> f64 {
        derived_sat_density(self.satellites as f64, self.shell_radius)
    }
}

/// Density of `n` points spread over a sphere of radius `shell_radius`.
pub fn derived_sat_density(n: f64, shell_radius: f64) -> f64 {
    n / (4.0 * PI * shell_radius * shell_radius)
}

/// Splits `total` satellites over task types in proportion to `probs`,
/// rounding by largest remainder so the counts add up to `total`.
pub fn split_satellites(total: u32, probs: &[f64]) -> Vec<u32> {
    let quotas: Vec<f64> = probs.iter().map(|q| q * total as f64).collect();
    let mut counts: Vec<u32> = quotas.iter().map(|q| q.floor() as u32).collect();
    let assigned: u32 = counts.iter().sum();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    // Stable sort keeps ties in task order, so the split is deterministic.
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
    });
    for &i in order.iter().take(total.saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SatelliteLaw {
    /// Each satellite's central angle from the UE is uniform on [0, π].
    #[default]
    CentralAngle,
    /// Area-uniform on the shell.
    UniformSphere,
}

impl SatelliteLaw {
    pub fn name(self) -> &'static str {
        match self {
            SatelliteLaw::CentralAngle => "central_angle",
            SatelliteLaw::UniformSphere => "uniform_sphere",
        }
    }
}

impl fmt::Display for SatelliteLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SatelliteLaw {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "central_angle" => Ok(SatelliteLaw::CentralAngle),
            "uniform_sphere" => Ok(SatelliteLaw::UniformSphere),
            other => Err(ConfigError::BadValue {
                key: "sim.satellite_law".into(),
                reason: format!("`{other}` is not one of central_angle, uniform_sphere"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub trials: u64,
    pub seed: u64,
    pub satellite_law: SatelliteLaw,
    /// Ground disk radius in metres. `None` picks the smallest radius
    /// that makes an empty disk less likely than 1e-12.
    pub disk_radius: Option<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            satellite_law: SatelliteLaw::default(),
            disk_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: SystemParams,
    pub geometry: ConstellationGeometry,
    pub sim: SimSettings,
}

impl Scenario {
    pub fn reference() -> Self {
        ConfigDocument::parse(REFERENCE_TOML)
            .and_then(|d| d.build())
            .expect("bundled config is valid")
    }

    /// Per-type satellite counts N_{s_i}.
    pub fn satellites_per_type(&self) -> Vec<u32> {
        split_satellites(self.geometry.satellites(), &self.params.task_probabilities())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    p_u_dbm: f64,
    p_c_dbm: f64,
    p_s_dbm: f64,
    f_s_ghz: f64,
    f_c_ghz: f64,
    noise_u_dbm: f64,
    noise_c_dbm: f64,
    noise_s_dbm: f64,
    alpha: f64,
    lambda_c_per_km2: f64,
    lambda_u_per_km2: f64,
    bias_ratio: f64,
    bandwidth_mhz: f64,
    tau_db: f64,
    sr_omega: f64,
    sr_b0: f64,
    sr_m: f64,
    cpu_sat_ghz: f64,
    cpu_cs_ghz: f64,
    buffer: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstellation {
    earth_radius_km: f64,
    altitude_km: f64,
    satellites: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    cycles: f64,
    input_kbit: f64,
    output_kbit: f64,
    probability: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    trials: Option<i64>,
    seed: Option<i64>,
    satellite_law: Option<String>,
    disk_radius_km: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    link: RawLink,
    constellation: RawConstellation,
    tasks: BTreeMap<String, RawTask>,
    #[serde(default)]
    sim: RawSim,
}

/// A parsed but not yet validated config, editable with dotted keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDocument {
    table: toml::Table,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table = text.parse::<toml::Table>().map_err(|e| ConfigError::Parse(e.to_string()))?;
        Ok(Self { table })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Applies a `section.key=value` override. The value is read as a TOML
    /// literal, falling back to a bare string.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| ConfigError::BadValue {
            key: assignment.into(),
            reason: "expected key=value".into(),
        })?;
        let key = key.trim();
        let raw = raw.trim();
        let value = match format!("v = {raw}").parse::<toml::Table>() {
            Ok(mut t) => t.remove("v").expect("key present"),
            Err(_) => toml::Value::String(raw.to_string()),
        };
        self.set(key, value)
    }

    pub fn set(&mut self, key: &str, value: toml::Value) -> Result<(), ConfigError> {
        let parts: Vec<&str> = key.split('.').collect();
        if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
            return Err(ConfigError::BadValue {
                key: key.into(),
                reason: "expected section.key".into(),
            });
        }
        let mut table = &mut self.table;
        for part in &parts[..parts.len() - 1] {
            let entry = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = entry.as_table_mut().ok_or_else(|| ConfigError::BadValue {
                key: key.into(),
                reason: format!("`{part}` is not a section"),
            })?;
        }
        table.insert(parts[parts.len() - 1].to_string(), value);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&toml::Value> {
        let mut parts = key.split('.');
        let mut value = self.table.get(parts.next()?)?;
        for part in parts {
            value = value.as_table()?.get(part)?;
        }
        Some(value)
    }

    /// The configured value at `key` as written to reports: floats with 17
    /// significant digits, other scalars verbatim, empty if unset.
    pub fn echo(&self, key: &str) -> String {
        match self.get(key) {
            Some(toml::Value::Float(x)) => crate::report::float17(*x),
            Some(toml::Value::Integer(i)) => i.to_string(),
            Some(toml::Value::String(s)) => s.clone(),
            Some(toml::Value::Boolean(b)) => b.to_string(),
            Some(other) => other.to_string(),
            None => String::new(),
        }
    }

    /// Like [`echo`](Self::echo) for a real-valued key, so `3` and `3.0`
    /// echo identically.
    pub fn echo_real(&self, key: &str) -> String {
        match self.get(key) {
            Some(toml::Value::Integer(i)) => crate::report::float17(*i as f64),
            _ => self.echo(key),
        }
    }

    /// The table name of the task with numeric id `id`.
    pub fn task_key(&self, id: u32) -> Option<String> {
        self.table
            .get("tasks")?
            .as_table()?
            .keys()
            .find(|k| k.parse::<u32>().ok() == Some(id))
            .cloned()
    }

    pub fn build(&self) -> Result<Scenario, ConfigError> {
        let raw: RawConfig = toml::Value::Table(self.table.clone())
            .try_into()
            .map_err(|e: toml::de::Error| translate_serde_error(e.message()))?;
        convert(raw)
    }
}

fn translate_serde_error(msg: &str) -> ConfigError {
    // serde names the offending field between backticks.
    let field = msg.split('`').nth(1).map(str::to_string);
    match field {
        Some(f) if msg.starts_with("missing field") => ConfigError::Missing(f),
        Some(f) if msg.starts_with("unknown field") => ConfigError::UnknownKey(f),
        _ => ConfigError::Parse(msg.to_string()),
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::OutOfRange {
            key: key.into(),
            expected: "positive and finite",
            value: v,
        })
    }
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::OutOfRange {
            key: key.into(),
            expected: "finite",
            value: v,
        })
    }
}

fn convert(raw: RawConfig) -> Result<Scenario, ConfigError> {
    let l = &raw.link;
    let dbm = |key: &str, v: f64| finite(key, v).map(dbm_to_watts);
    let alpha = finite("link.alpha", l.alpha)?;
    if alpha <= 2.0 {
        return Err(ConfigError::OutOfRange {
            key: "link.alpha".into(),
            expected: "greater than 2",
            value: alpha,
        });
    }
    if l.buffer < 1 {
        return Err(ConfigError::OutOfRange {
            key: "link.buffer".into(),
            expected: "at least 1",
            value: l.buffer as f64,
        });
    }
    let sr = SrFading::new(
        positive("link.sr_omega", l.sr_omega)?,
        positive("link.sr_b0", l.sr_b0)?,
        positive("link.sr_m", l.sr_m)?,
    );

    if raw.tasks.is_empty() {
        return Err(ConfigError::NoTasks);
    }
    let mut tasks = Vec::with_capacity(raw.tasks.len());
    for (name, t) in &raw.tasks {
        let id: u32 = name.parse().map_err(|_| ConfigError::BadValue {
            key: format!("tasks.{name}"),
            reason: "task sections must be numbered".into(),
        })?;
        let key = |field: &str| format!("tasks.{name}.{field}");
        let probability = positive(&key("probability"), t.probability)?;
        if probability > 1.0 {
            return Err(ConfigError::OutOfRange {
                key: key("probability"),
                expected: "at most 1",
                value: probability,
            });
        }
        tasks.push(TaskSpec {
            id,
            cycles: positive(&key("cycles"), t.cycles)?,
            input_bits: positive(&key("input_kbit"), t.input_kbit)? * 1e3,
            output_bits: positive(&key("output_kbit"), t.output_kbit)? * 1e3,
            probability,
        });
    }
    tasks.sort_by_key(|t| t.id);
    let sum: f64 = tasks.iter().map(|t| t.probability).sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(ConfigError::ProbabilitySum(sum));
    }

    let params = SystemParams {
        p_u: dbm("link.p_u_dbm", l.p_u_dbm)?,
        p_c: dbm("link.p_c_dbm", l.p_c_dbm)?,
        p_s: dbm("link.p_s_dbm", l.p_s_dbm)?,
        f_s: positive("link.f_s_ghz", l.f_s_ghz)? * 1e9,
        f_c: positive("link.f_c_ghz", l.f_c_ghz)? * 1e9,
        sigma2_u: dbm("link.noise_u_dbm", l.noise_u_dbm)?,
        sigma2_c: dbm("link.noise_c_dbm", l.noise_c_dbm)?,
        sigma2_s: dbm("link.noise_s_dbm", l.noise_s_dbm)?,
        alpha,
        lambda_c: positive("link.lambda_c_per_km2", l.lambda_c_per_km2)? * 1e-6,
        lambda_u: positive("link.lambda_u_per_km2", l.lambda_u_per_km2)? * 1e-6,
        bias_ratio: positive("link.bias_ratio", l.bias_ratio)?,
        bandwidth: positive("link.bandwidth_mhz", l.bandwidth_mhz)? * 1e6,
        tau: db_to_linear(finite("link.tau_db", l.tau_db)?),
        sr,
        tasks,
        cpu_sat: positive("link.cpu_sat_ghz", l.cpu_sat_ghz)? * 1e9,
        cpu_cs: positive("link.cpu_cs_ghz", l.cpu_cs_ghz)? * 1e9,
        buffer: u32::try_from(l.buffer).map_err(|_| ConfigError::OutOfRange {
            key: "link.buffer".into(),
            expected: "a 32-bit count",
            value: l.buffer as f64,
        })?,
    };

    let c = &raw.constellation;
    let satellites = u32::try_from(c.satellites).map_err(|_| ConfigError::OutOfRange {
        key: "constellation.satellites".into(),
        expected: "at least 1",
        value: c.satellites as f64,
    })?;
    let geometry = ConstellationGeometry::new(
        positive("constellation.earth_radius_km", c.earth_radius_km)? * 1e3,
        positive("constellation.altitude_km", c.altitude_km)? * 1e3,
        satellites,
    )?;

    let s = &raw.sim;
    let mut sim = SimSettings::default();
    if let Some(t) = s.trials {
        if t < 1 {
            return Err(ConfigError::OutOfRange {
                key: "sim.trials".into(),
                expected: "at least 1",
                value: t as f64,
            });
        }
        sim.trials = t as u64;
    }
    if let Some(seed) = s.seed {
        // Negative seeds are accepted and reinterpreted bitwise.
        sim.seed = seed as u64;
    }
    if let Some(law) = &s.satellite_law {
        sim.satellite_law = law.parse()?;
    }
    if let Some(r) = s.disk_radius_km {
        sim.disk_radius = Some(positive("sim.disk_radius_km", r)? * 1e3);
    }

    Ok(Scenario { params, geometry, sim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dbm_conversion() {
        assert_relative_eq!(dbm_to_watts(23.0), 0.199_526_231_496_888, max_relative = 1e-12);
        assert_relative_eq!(db_to_linear(0.0), 1.0);
        assert_relative_eq!(watts_to_dbm(dbm_to_watts(-117.0)), -117.0, max_relative = 1e-12);
    }

    #[test]
    fn reference_builds() {
        let s = Scenario::reference();
        assert_eq!(s.params.tasks.len(), 4);
        assert_eq!(s.geometry.satellites(), 1000);
        assert_relative_eq!(s.geometry.shell_radius(), 6.871e6);
        assert_relative_eq!(s.params.lambda_u, 45e-6);
        assert_relative_eq!(s.params.tau, 1.0);
        assert_eq!(s.satellites_per_type(), vec![250, 250, 250, 250]);
    }

    #[test]
    fn sat_density() {
        let r = 1.0 / (2.0 * PI.sqrt());
        assert_relative_eq!(derived_sat_density(1.0, r), 1.0, max_relative = 1e-14);
        let g = ConstellationGeometry::new(6371e3, 500e3, 1000).unwrap();
        assert_relative_eq!(g.sat_density(), 1.685_574_7e-12, max_relative = 1e-6);
        assert!(ConstellationGeometry::new(6371e3, 500e3, 0).is_err());
    }

    #[test]
    fn probability_sum_rejected() {
        let mut doc = ConfigDocument::parse(REFERENCE_TOML).unwrap();
        doc.apply_override("tasks.4.probability=0.26").unwrap();
        match doc.build() {
            Err(ConfigError::ProbabilitySum(s)) => assert_relative_eq!(s, 1.01, max_relative = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_and_bad_keys_are_named() {
        let text = REFERENCE_TOML.replace("p_s_dbm = 60.0\n", "");
        let err = ConfigDocument::parse(&text).unwrap().build().unwrap_err();
        assert_eq!(err, ConfigError::Missing("p_s_dbm".into()));

        let mut doc = ConfigDocument::parse(REFERENCE_TOML).unwrap();
        doc.apply_override("link.bandwidth_mhz=-5").unwrap();
        let msg = doc.build().unwrap_err().to_string();
        assert!(msg.contains("link.bandwidth_mhz"), "{msg}");

        let mut doc = ConfigDocument::parse(REFERENCE_TOML).unwrap();
        doc.apply_override("link.bandwith_mhz=5").unwrap();
        assert_eq!(doc.build().unwrap_err(), ConfigError::UnknownKey("bandwith_mhz".into()));
    }

    #[test]
    fn overrides_apply() {
        let mut doc = ConfigDocument::parse(REFERENCE_TOML).unwrap();
        doc.apply_override("constellation.altitude_km=800").unwrap();
        doc.apply_override("sim.satellite_law=uniform_sphere").unwrap();
        let s = doc.build().unwrap();
        assert_relative_eq!(s.geometry.altitude(), 800e3);
        assert_eq!(s.sim.satellite_law, SatelliteLaw::UniformSphere);
        assert!(doc.apply_override("nokey").is_err());
    }

    #[test]
    fn split_is_exact() {
        assert_eq!(split_satellites(10, &[0.25; 4]), vec![3, 3, 2, 2]);
        assert_eq!(split_satellites(1584, &[0.25; 4]), vec![396; 4]);
        assert_eq!(split_satellites(7, &[0.5, 0.3, 0.2]), vec![4, 2, 1]);
    }
}
