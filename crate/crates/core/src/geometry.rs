//! Contact-distance laws for satellites on a sphere and ground servers on
//! the plane, seen from a UE on the Earth's surface.
//!
//! Satellite counts are real-valued because the number of offloadable
//! satellites N_i = N_{s_i}·P_ofld is an expectation.

use std::f64::consts::PI;

use crate::params::{ConstellationGeometry, SatelliteLaw};

const ACOS_SLACK: f64 = 1e-12;

fn acos_clamped(u: f64) -> f64 {
    debug_assert!(u.abs() <= 1.0 + ACOS_SLACK, "arccos argument {u} outside [-1, 1]");
    u.clamp(-1.0, 1.0).acos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonQuantities {
    /// √(2 r_e a_s + a_s²).
    pub d_max_down: f64,
    /// √(r_s² − r_e²).
    pub d_max_up: f64,
    /// arccos(r_e / r_s).
    pub theta_c: f64,
}

pub fn horizon(geom: &ConstellationGeometry) -> HorizonQuantities {
    let (re, a, rs) = (geom.earth_radius(), geom.altitude(), geom.shell_radius());
    HorizonQuantities {
        d_max_down: (2.0 * re * a + a * a).sqrt(),
        d_max_up: (rs * rs - re * re).sqrt(),
        theta_c: acos_clamped(re / rs),
    }
}

/// Central angle at which a satellite sits at distance `x` from the UE.
pub fn central_angle(x: f64, geom: &ConstellationGeometry) -> f64 {
    let (re, rs) = (geom.earth_radius(), geom.shell_radius());
    acos_clamped((re * re + rs * rs - x * x) / (2.0 * re * rs))
}

/// Slant range to a satellite at central angle `psi`.
pub fn slant_range(psi: f64, geom: &ConstellationGeometry) -> f64 {
    let (re, rs) = (geom.earth_radius(), geom.shell_radius());
    (re * re + rs * rs - 2.0 * re * rs * psi.cos()).max(0.0).sqrt()
}

/// 1 − (1 − φ/π)^n, evaluated without cancellation for small φ.
fn one_minus_pow(phi: f64, n: f64) -> f64 {
    -(n * (-phi / PI).ln_1p()).exp_m1()
}

/// CDF of the distance to the nearest of `n` satellites.
pub fn contact_cdf_nearest_sat(x: f64, n: f64, geom: &ConstellationGeometry) -> f64 {
    let a = geom.altitude();
    if x < a || n <= 0.0 {
        return 0.0;
    }
    let h = horizon(geom);
    let phi = if x >= h.d_max_down {
        h.theta_c
    } else {
        let (re, rs) = (geom.earth_radius(), geom.shell_radius());
        acos_clamped(1.0 - (x * x - a * a) / (2.0 * re * rs))
    };
    one_minus_pow(phi, n)
}

/// Density of the nearest-satellite distance on `[a_s, d_max)`.
pub fn contact_pdf_nearest_sat(x: f64, n: f64, geom: &ConstellationGeometry) -> f64 {
    let a = geom.altitude();
    let h = horizon(geom);
    if x < a || x >= h.d_max_down || n <= 0.0 {
        return 0.0;
    }
    let (re, rs) = (geom.earth_radius(), geom.shell_radius());
    // w = 1 - cos φ, kept separate so sin φ stays accurate near x = a_s.
    let w = (x - a) * (x + a) / (2.0 * re * rs);
    let phi = acos_clamped(1.0 - w);
    let root = (w * (2.0 - w)).max(0.0).sqrt();
    if root == 0.0 {
        // Integrable singularity exactly at x = a_s.
        return 0.0;
    }
    n * x / (PI * re * rs * root) * (1.0 - phi / PI).powf(n - 1.0)
}

/// Density of the central angle to the nearest of `n` satellites on
/// `[0, θ_c]`. Smooth, unlike the distance density at x = a_s, so
/// satellite integrals are carried out in this variable.
pub fn nearest_sat_angle_density(phi: f64, n: f64) -> f64 {
    if n <= 0.0 || !(0.0..=PI).contains(&phi) {
        return 0.0;
    }
    n / PI * ((n - 1.0) * (-phi / PI).ln_1p()).exp()
}

/// Central-angle density of the nearest kept satellite when each of `n`
/// satellites is kept independently with probability `keep`:
/// n·keep/π·(1 − keep·φ/π)^{n−1}. This is the law the simulator samples;
/// the closed forms use the mean count n·keep instead.
pub fn thinned_nearest_angle_density(phi: f64, n: f64, keep: f64) -> f64 {
    if n <= 0.0 || keep <= 0.0 || !(0.0..=PI).contains(&phi) {
        return 0.0;
    }
    n * keep / PI * ((n - 1.0) * (-keep * phi / PI).ln_1p()).exp()
}

/// CDF of the distance to a satellite placed uniformly (by central angle)
/// on the visible cap.
pub fn contact_cdf_serving_sat_uplink(x: f64, geom: &ConstellationGeometry) -> f64 {
    let h = horizon(geom);
    if x < geom.altitude() {
        0.0
    } else if x >= h.d_max_up {
        1.0
    } else {
        central_angle(x, geom) / h.theta_c
    }
}

pub fn contact_pdf_serving_sat_uplink(x: f64, geom: &ConstellationGeometry) -> f64 {
    let h = horizon(geom);
    if x < geom.altitude() || x >= h.d_max_up {
        return 0.0;
    }
    let (re, rs, a) = (geom.earth_radius(), geom.shell_radius(), geom.altitude());
    let w = (x - a) * (x + a) / (2.0 * re * rs);
    let root = (w * (2.0 - w)).max(0.0).sqrt();
    if root == 0.0 {
        return 0.0;
    }
    x / (h.theta_c * re * rs * root)
}

pub fn nearest_cs_cdf(x: f64, lambda_c: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    -(-lambda_c * PI * x * x).exp_m1()
}

pub fn nearest_cs_pdf(x: f64, lambda_c: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    2.0 * lambda_c * PI * x * (-lambda_c * PI * x * x).exp()
}

/// Probability weight 1 − ((1 + cos θ_c)/2)^{n−1} that at least one
/// satellite is in view; zero when n ≤ 1.
pub fn visibility_weight(n: f64, geom: &ConstellationGeometry) -> f64 {
    let h = horizon(geom);
    let base = 0.5 * (1.0 + h.theta_c.cos());
    (1.0 - base.powf(n - 1.0)).max(0.0)
}

/// Probability that a single satellite is above the horizon.
pub fn visible_fraction(law: SatelliteLaw, geom: &ConstellationGeometry) -> f64 {
    let h = horizon(geom);
    match law {
        SatelliteLaw::CentralAngle => h.theta_c / PI,
        SatelliteLaw::UniformSphere => 0.5 * (1.0 - h.theta_c.cos()),
    }
}

/// Nearest-satellite distance CDF when the `n` satellites are area-uniform
/// on the shell: 1 − (1 − (x² − a_s²)/(4 r_e r_s))^n.
pub fn contact_cdf_nearest_sat_area_uniform(x: f64, n: f64, geom: &ConstellationGeometry) -> f64 {
    let a = geom.altitude();
    if x < a || n <= 0.0 {
        return 0.0;
    }
    let h = horizon(geom);
    let xc = x.min(h.d_max_down);
    let (re, rs) = (geom.earth_radius(), geom.shell_radius());
    let cap = (xc * xc - a * a) / (4.0 * re * rs);
    -(n * (-cap).ln_1p()).exp_m1()
}
