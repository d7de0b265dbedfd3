//! Commercial LEO constellation configurations.

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationPreset {
    pub name: &'static str,
    pub family: &'static str,
    pub altitude_km: f64,
    pub satellites: u32,
}

pub const PRESETS: [ConstellationPreset; 8] = [
    ConstellationPreset {
        name: "starlink-1584",
        family: "starlink",
        altitude_km: 550.0,
        satellites: 1584,
    },
    ConstellationPreset {
        name: "starlink-12000",
        family: "starlink",
        altitude_km: 550.0,
        satellites: 12000,
    },
    ConstellationPreset {
        name: "oneweb-716",
        family: "oneweb",
        altitude_km: 1200.0,
        satellites: 716,
    },
    ConstellationPreset {
        name: "oneweb-6372",
        family: "oneweb",
        altitude_km: 1200.0,
        satellites: 6372,
    },
    ConstellationPreset {
        name: "amazon-578",
        family: "amazon",
        altitude_km: 630.0,
        satellites: 578,
    },
    ConstellationPreset {
        name: "amazon-3236",
        family: "amazon",
        altitude_km: 630.0,
        satellites: 3236,
    },
    ConstellationPreset {
        name: "telesat-298",
        family: "telesat",
        altitude_km: 1015.0,
        satellites: 298,
    },
    ConstellationPreset {
        name: "telesat-1671",
        family: "telesat",
        altitude_km: 1325.0,
        satellites: 1671,
    },
];

pub fn find_preset(name: &str) -> Result<ConstellationPreset, ConfigError> {
    PRESETS
        .iter()
        .copied()
        .find(|p| p.name == name)
        .ok_or_else(|| ConfigError::BadValue {
            key: "preset".into(),
            reason: format!(
                "unknown preset `{name}`; available: {}",
                PRESETS.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
            ),
        })
}

/// Distinct family names in table order.
pub fn families() -> Vec<&'static str> {
    let mut out: Vec<&'static str> = Vec::new();
    for p in PRESETS {
        if !out.contains(&p.family) {
            out.push(p.family);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        let p = find_preset("starlink-1584").unwrap();
        assert_eq!((p.altitude_km, p.satellites), (550.0, 1584));
        let err = find_preset("iridium").unwrap_err().to_string();
        assert!(err.contains("telesat-1671") && err.contains("iridium"), "{err}");
        assert_eq!(families(), ["starlink", "oneweb", "amazon", "telesat"]);
    }
}
