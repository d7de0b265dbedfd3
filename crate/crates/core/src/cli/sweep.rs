//! Sweep specifications and their expansion into scenario documents.

use crate::error::ConfigError;
use crate::params::ConfigDocument;

/// A variable that can be swept, with its config key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Satellites,
    Altitude,
    UeDensity,
    Threshold,
}

impl SweepVar {
    pub const ALL: [SweepVar; 4] = [
        SweepVar::Satellites,
        SweepVar::Altitude,
        SweepVar::UeDensity,
        SweepVar::Threshold,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SweepVar::Satellites => "constellation.satellites",
            SweepVar::Altitude => "constellation.altitude_km",
            SweepVar::UeDensity => "link.lambda_u_per_km2",
            SweepVar::Threshold => "link.tau_db",
        }
    }

    fn aliases(self) -> [&'static str; 2] {
        match self {
            SweepVar::Satellites => ["N_s", "satellites"],
            SweepVar::Altitude => ["a_s", "altitude_km"],
            SweepVar::UeDensity => ["lambda_u", "lambda_u_per_km2"],
            SweepVar::Threshold => ["tau", "tau_db"],
        }
    }

    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        SweepVar::ALL
            .into_iter()
            .find(|v| v.key() == name || v.aliases().contains(&name))
            .ok_or_else(|| ConfigError::BadValue {
                key: format!("sweep.{name}"),
                reason: "sweepable variables are N_s, a_s, lambda_u, tau (or their config keys)".into(),
            })
    }

    fn toml_value(self, v: f64) -> Result<toml::Value, ConfigError> {
        match self {
            SweepVar::Satellites => {
                if v.fract() != 0.0 || v < 1.0 || v > u32::MAX as f64 {
                    return Err(ConfigError::BadValue {
                        key: format!("sweep.{}", self.key()),
                        reason: format!("satellite count must be a positive integer, got {v}"),
                    });
                }
                Ok(toml::Value::Integer(v as i64))
            }
            _ => Ok(toml::Value::Float(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn new(var: SweepVar, values: Vec<f64>) -> Result<Self, ConfigError> {
        let key = format!("sweep.{}", var.key());
        if values.is_empty() {
            return Err(ConfigError::BadValue {
                key,
                reason: "empty value list".into(),
            });
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ConfigError::BadValue {
                key,
                reason: "values must be strictly increasing".into(),
            });
        }
        for &v in &values {
            var.toml_value(v)?;
        }
        Ok(Self { var, values })
    }

    /// Parses `VAR=v1,v2,...`.
    pub fn parse(spec: &str) -> Result<Self, ConfigError> {
        let (name, list) = spec.split_once('=').ok_or_else(|| ConfigError::BadValue {
            key: format!("sweep.{spec}"),
            reason: "expected VAR=V1,V2,...".into(),
        })?;
        let var = SweepVar::parse(name.trim())?;
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|_| ConfigError::BadValue {
                    key: format!("sweep.{}", var.key()),
                    reason: format!("`{s}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Sweep::new(var, values)
    }
}

/// One evaluation point: the swept assignments and the resulting document.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub assignments: Vec<(SweepVar, f64)>,
    pub doc: ConfigDocument,
}

impl SweepPoint {
    pub fn label(&self) -> String {
        self.assignments
            .iter()
            .map(|(v, x)| format!("{}={x}", v.key()))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Cartesian product of the sweeps applied to `base`, first sweep
/// slowest. No sweeps gives the base document alone.
pub fn expand(base: &ConfigDocument, sweeps: &[Sweep]) -> Result<Vec<SweepPoint>, ConfigError> {
    let mut vars: Vec<SweepVar> = Vec::new();
    for s in sweeps {
        if vars.contains(&s.var) {
            return Err(ConfigError::BadValue {
                key: format!("sweep.{}", s.var.key()),
                reason: "swept more than once".into(),
            });
        }
        vars.push(s.var);
    }
    let mut points = vec![SweepPoint {
        assignments: Vec::new(),
        doc: base.clone(),
    }];
    for s in sweeps {
        let mut next = Vec::with_capacity(points.len() * s.values.len());
        for p in &points {
            for &v in &s.values {
                let mut q = p.clone();
                q.doc.set(s.var.key(), s.var.toml_value(v)?)?;
                q.assignments.push((s.var, v));
                next.push(q);
            }
        }
        points = next;
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::REFERENCE_TOML;

    #[test]
    fn parsing_and_errors() {
        let s = Sweep::parse("N_s=200,600,1000").unwrap();
        assert_eq!(s.var, SweepVar::Satellites);
        assert_eq!(s.values, [200.0, 600.0, 1000.0]);
        let e = Sweep::parse("a_s=").unwrap_err().to_string();
        assert!(e.contains("constellation.altitude_km") && e.contains("empty"), "{e}");
        assert!(Sweep::parse("tau=1,0").is_err());
        assert!(Sweep::parse("N_s=10.5").is_err());
        assert!(Sweep::parse("speed=1").is_err());
    }

    #[test]
    fn product_order() {
        let base = ConfigDocument::parse(REFERENCE_TOML).unwrap();
        let pts = expand(
            &base,
            &[Sweep::parse("a_s=500,800").unwrap(), Sweep::parse("N_s=200,400,600").unwrap()],
        )
        .unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1].label(), "constellation.altitude_km=500;constellation.satellites=400");
        assert_eq!(pts[3].doc.build().unwrap().geometry.altitude(), 800e3);
        assert_eq!(pts[3].doc.build().unwrap().geometry.satellites(), 200);
    }
}
