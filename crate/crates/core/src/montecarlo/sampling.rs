//! Point-process samplers for the constellation and the ground servers.
//!
//! The UE sits at the north pole of the Earth, (0, 0, r_e), so a
//! satellite's central angle from the UE is its polar angle.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use crate::error::ConfigError;
use crate::geometry::{horizon, slant_range, visible_fraction};
use crate::params::{ConstellationGeometry, SatelliteLaw};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatPoint {
    /// Cartesian position on the shell.
    pub position: [f64; 3],
    /// Task type whose service the satellite caches, 0-based.
    pub kind: usize,
}

impl SatPoint {
    /// Polar angle, which is the central angle seen from the UE.
    pub fn central_angle(&self, geom: &ConstellationGeometry) -> f64 {
        (self.position[2] / geom.shell_radius()).clamp(-1.0, 1.0).acos()
    }

    pub fn distance_to_ue(&self, geom: &ConstellationGeometry) -> f64 {
        let [x, y, z] = self.position;
        let dz = z - geom.earth_radius();
        (x * x + y * y + dz * dz).sqrt()
    }
}

/// Polar angle of one satellite placed anywhere on the shell.
fn draw_angle<R: Rng + ?Sized>(law: SatelliteLaw, rng: &mut R) -> f64 {
    match law {
        SatelliteLaw::CentralAngle => PI * rng.random::<f64>(),
        SatelliteLaw::UniformSphere => (1.0 - 2.0 * rng.random::<f64>()).acos(),
    }
}

/// Polar angle of one satellite conditioned on being above the horizon.
pub fn draw_visible_angle<R: Rng + ?Sized>(law: SatelliteLaw, theta_c: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    match law {
        SatelliteLaw::CentralAngle => theta_c * u,
        SatelliteLaw::UniformSphere => (1.0 - u * (1.0 - theta_c.cos())).acos(),
    }
}

/// Places `counts[i]` satellites of each type i.i.d. on the shell.
pub fn sample_constellation<R: Rng + ?Sized>(
    counts: &[u32],
    geom: &ConstellationGeometry,
    law: SatelliteLaw,
    rng: &mut R,
) -> Vec<SatPoint> {
    let rs = geom.shell_radius();
    let mut out = Vec::with_capacity(counts.iter().map(|&c| c as usize).sum());
    for (kind, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let psi = draw_angle(law, rng);
            let az = 2.0 * PI * rng.random::<f64>();
            let (s, c) = psi.sin_cos();
            out.push(SatPoint {
                position: [rs * s * az.cos(), rs * s * az.sin(), rs * c],
                kind,
            });
        }
    }
    out
}

/// Distance to the nearest of `n` satellites, or `None` when none is in
/// view. Each satellite is kept independently with probability `keep`
/// before visibility, so only the Binomial number of kept visible
/// satellites is placed.
pub fn nearest_visible_distance<R: Rng + ?Sized>(
    n: u32,
    keep: f64,
    geom: &ConstellationGeometry,
    law: SatelliteLaw,
    rng: &mut R,
) -> Option<f64> {
    let h = horizon(geom);
    let p = (keep * visible_fraction(law, geom)).clamp(0.0, 1.0);
    let visible = Binomial::new(n as u64, p).expect("probability in [0, 1]").sample(rng);
    (0..visible)
        .map(|_| draw_visible_angle(law, h.theta_c, rng))
        .min_by(f64::total_cmp)
        .map(|psi| slant_range(psi, geom))
}

/// Planar PPP of intensity `lambda` on the disk of radius `radius` around
/// the UE.
pub fn sample_ground_ppp<R: Rng + ?Sized>(lambda: f64, radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let count = poisson_count(lambda * PI * radius * radius, rng);
    (0..count)
        .map(|_| {
            let r = radius * unit_open_low(rng).sqrt();
            let az = 2.0 * PI * rng.random::<f64>();
            [r * az.cos(), r * az.sin()]
        })
        .collect()
}

/// Distance to the nearest point of the disk PPP, drawing only radii.
pub fn nearest_ground_distance<R: Rng + ?Sized>(lambda: f64, radius: f64, rng: &mut R) -> Option<f64> {
    let count = poisson_count(lambda * PI * radius * radius, rng);
    (0..count)
        .map(|_| unit_open_low(rng))
        .min_by(f64::total_cmp)
        .map(|u| radius * u.sqrt())
}

/// Uniform on (0, 1], so radii are strictly positive.
fn unit_open_low<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
}

/// exp(−λπR²) must stay below this so an empty disk is negligible.
pub const EMPTY_DISK_BOUND: f64 = 1e-12;

/// Ground-disk radius: the requested one if it satisfies the empty-disk
/// bound, else a default with exp(−λπR²) = 1e-13.
pub fn ground_disk_radius(lambda_c: f64, requested: Option<f64>) -> Result<f64, ConfigError> {
    match requested {
        Some(r) => {
            if (-lambda_c * PI * r * r).exp() < EMPTY_DISK_BOUND {
                Ok(r)
            } else {
                Err(ConfigError::BadValue {
                    key: "sim.disk_radius_km".into(),
                    reason: format!(
                        "radius {:.3} km leaves an empty disk with probability above {EMPTY_DISK_BOUND:e}",
                        r / 1e3
                    ),
                })
            }
        }
        None => Ok((13.0 * std::f64::consts::LN_10 / (lambda_c * PI)).sqrt()),
    }
}
