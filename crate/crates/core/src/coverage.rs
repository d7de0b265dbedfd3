//! SNR coverage probabilities per link and their system-wide mixtures.
//!
//! All four link integrals go through [`CoverageIntegrand`], which pairs a
//! serving-distance law with a fading survival function evaluated at
//! `A·x^exponent`, where A is the link's threshold constant. Satellite laws
//! are integrated over the central angle, whose density is smooth.

use crate::association::GRADING_LEVELS;
use crate::channel::{gamma_approx_of_sr, GammaApprox, LinkBudget, SrFading};
use crate::error::NumericalError;
use crate::geometry::{horizon, nearest_cs_pdf, nearest_sat_angle_density, slant_range, visibility_weight};
use crate::numerics::{graded_toward_lower, integrate_with_breakpoints, sr_power_cdf, QuadratureSpec, SR_SERIES_TOL};
use crate::params::{ConstellationGeometry, SystemParams};

/// P(fading > y) for the fading model used in a closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Survival {
    /// Integer-shape tight bound on the Gamma approximation of SR fading.
    GammaBound(GammaApprox),
    /// Unit-mean exponential power.
    Rayleigh,
    /// The exact Shadowed-Rician series, for diagnostics.
    ExactSr(SrFading),
}

impl Survival {
    pub fn at(&self, y: f64) -> Result<f64, NumericalError> {
        Ok(match self {
            Survival::GammaBound(g) => g.bound_survival(y),
            Survival::Rayleigh => (-y).exp(),
            Survival::ExactSr(sr) => 1.0 - sr_power_cdf(y, sr, SR_SERIES_TOL)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceLaw {
    /// Nearest of `n` satellites.
    NearestSatellite { n: f64 },
    /// A satellite drawn uniformly from the visible cap.
    ServingSatelliteUplink,
    /// Nearest point of a planar PPP.
    NearestCs { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageIntegrand {
    pub law: DistanceLaw,
    pub a_const: f64,
    pub exponent: f64,
    pub fading: Survival,
}

/// Below this, exp(−λπx²) has fallen under 1e-16.
fn cs_truncation(lambda: f64) -> f64 {
    (16.0 * std::f64::consts::LN_10 / (lambda * std::f64::consts::PI)).sqrt()
}

impl CoverageIntegrand {
    pub fn evaluate(&self, geom: &ConstellationGeometry, quad: &QuadratureSpec) -> Result<f64, NumericalError> {
        let a = self.a_const;
        let e = self.exponent;
        let fading = self.fading;
        // Survival of the fading at the distance-dependent threshold. The
        // exact-series branch can fail; errors are rare and surface as NaN,
        // which the quadrature reports as non-finite.
        let surv = move |x: f64| fading.at(a * x.powf(e)).unwrap_or(f64::NAN);
        let h = horizon(geom);
        let value = match self.law {
            DistanceLaw::NearestSatellite { n } => {
                if n <= 0.0 {
                    return Ok(0.0);
                }
                let pts = graded_toward_lower(0.0, h.theta_c, GRADING_LEVELS);
                let f = |phi: f64| surv(slant_range(phi, geom)) * nearest_sat_angle_density(phi, n);
                integrate_with_breakpoints(f, &pts, quad)?.value
            }
            DistanceLaw::ServingSatelliteUplink => {
                let f = |phi: f64| surv(slant_range(phi, geom)) / h.theta_c;
                integrate_with_breakpoints(f, &[0.0, h.theta_c], quad)?.value
            }
            DistanceLaw::NearestCs { lambda } => {
                let f = |x: f64| surv(x) * nearest_cs_pdf(x, lambda);
                let truncated = integrate_with_breakpoints(f, &[0.0, cs_truncation(lambda)], quad)?.value;
                let infinite = integrate_with_breakpoints(f, &[0.0, f64::INFINITY], quad)?.value;
                if (truncated - infinite).abs() > 1e-8 {
                    return Err(NumericalError::TailMismatch { truncated, infinite });
                }
                truncated
            }
        };
        Ok(value.clamp(0.0, 1.0))
    }
}

/// The fading model used by the satellite closed forms.
pub fn sat_fading(params: &SystemParams) -> Survival {
    Survival::GammaBound(gamma_approx_of_sr(&params.sr))
}

/// Downlink coverage from the nearest of `n_i` offloadable satellites.
pub fn cov_down_sat(
    tau: f64,
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    sat_down_with(sat_fading(params), tau, n_i, params, geom, quad)
}

/// Same link as [`cov_down_sat`] but with the exact SR power law in place
/// of the Gamma bound.
pub fn cov_down_sat_exact_fading(
    tau: f64,
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    sat_down_with(Survival::ExactSr(params.sr), tau, n_i, params, geom, quad)
}

fn sat_down_with(
    fading: Survival,
    tau: f64,
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    let link = LinkBudget::sat_downlink(params);
    CoverageIntegrand {
        law: DistanceLaw::NearestSatellite { n: n_i },
        a_const: link.threshold_constant(tau),
        exponent: 2.0,
        fading,
    }
    .evaluate(geom, quad)
}

pub fn cov_down_cs(
    tau: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    let link = LinkBudget::cs_downlink(params);
    CoverageIntegrand {
        law: DistanceLaw::NearestCs { lambda: params.lambda_c },
        a_const: link.threshold_constant(tau),
        exponent: params.alpha,
        fading: Survival::Rayleigh,
    }
    .evaluate(geom, quad)
}

/// Uplink coverage to a visible offloadable satellite, weighted by the
/// probability that one is in view.
pub fn cov_up_sat(
    tau: f64,
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    sat_up_with(sat_fading(params), tau, n_i, params, geom, quad)
}

pub fn cov_up_sat_exact_fading(
    tau: f64,
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    sat_up_with(Survival::ExactSr(params.sr), tau, n_i, params, geom, quad)
}

fn sat_up_with(
    fading: Survival,
    tau: f64,
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    let w = visibility_weight(n_i, geom);
    if w == 0.0 {
        return Ok(0.0);
    }
    Ok(w * sat_uplink_conditional(fading, tau, params, geom, quad)?)
}

/// Uplink coverage given that a satellite is in view. It does not depend on
/// the satellite count, so callers iterating over counts can reuse it.
pub fn sat_uplink_conditional(
    fading: Survival,
    tau: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    let link = LinkBudget::sat_uplink(params);
    CoverageIntegrand {
        law: DistanceLaw::ServingSatelliteUplink,
        a_const: link.threshold_constant(tau),
        exponent: 2.0,
        fading,
    }
    .evaluate(geom, quad)
}

pub fn cov_up_cs(
    tau: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    let link = LinkBudget::cs_uplink(params);
    CoverageIntegrand {
        law: DistanceLaw::NearestCs { lambda: params.lambda_c },
        a_const: link.threshold_constant(tau),
        exponent: params.alpha,
        fading: Survival::Rayleigh,
    }
    .evaluate(geom, quad)
}

/// Per-task link coverages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkCoverage {
    pub sat_down: f64,
    pub cs_down: f64,
    pub sat_up: f64,
    pub cs_up: f64,
}

/// One task's weight in the system mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskMix {
    pub probability: f64,
    pub a_sat: f64,
    pub a_cs: f64,
    pub coverage: LinkCoverage,
}

pub fn total_cov_down(tasks: &[TaskMix]) -> f64 {
    tasks
        .iter()
        .map(|t| t.probability * (t.a_sat * t.coverage.sat_down + t.a_cs * t.coverage.cs_down))
        .sum()
}

pub fn total_cov_up(tasks: &[TaskMix]) -> f64 {
    tasks
        .iter()
        .map(|t| t.probability * (t.a_sat * t.coverage.sat_up + t.a_cs * t.coverage.cs_up))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::contact_cdf_nearest_sat;
    use crate::params::Scenario;
    use approx::assert_relative_eq;

    fn setup() -> (SystemParams, ConstellationGeometry, QuadratureSpec) {
        let s = Scenario::reference();
        (s.params, s.geometry, QuadratureSpec::default())
    }

    #[test]
    fn small_threshold_limits() {
        let (p, g, q) = setup();
        let h = horizon(&g);
        let tau = 1e-30;
        assert_relative_eq!(
            cov_down_sat(tau, 250.0, &p, &g, &q).unwrap(),
            contact_cdf_nearest_sat(h.d_max_down, 250.0, &g),
            max_relative = 1e-8
        );
        assert_relative_eq!(cov_down_cs(tau, &p, &g, &q).unwrap(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(
            cov_up_sat(tau, 250.0, &p, &g, &q).unwrap(),
            visibility_weight(250.0, &g),
            max_relative = 1e-8
        );
        assert_relative_eq!(cov_up_cs(tau, &p, &g, &q).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn large_threshold_limits() {
        let (p, g, q) = setup();
        let tau = 1e30;
        assert!(cov_down_sat(tau, 250.0, &p, &g, &q).unwrap() < 1e-12);
        assert!(cov_down_cs(tau, &p, &g, &q).unwrap() < 1e-12);
        assert!(cov_up_sat(tau, 250.0, &p, &g, &q).unwrap() < 1e-12);
        assert!(cov_up_cs(tau, &p, &g, &q).unwrap() < 1e-12);
    }

    #[test]
    fn single_satellite_has_no_uplink() {
        let (p, g, q) = setup();
        assert_eq!(cov_up_sat(1.0, 1.0, &p, &g, &q).unwrap(), 0.0);
    }

    #[test]
    fn strong_uplink_power_saturates() {
        let (mut p, g, q) = setup();
        p.p_u = 1e12;
        assert_relative_eq!(cov_up_cs(1.0, &p, &g, &q).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn mixtures() {
        let full = LinkCoverage {
            sat_down: 1.0,
            cs_down: 1.0,
            sat_up: 1.0,
            cs_up: 1.0,
        };
        let tasks: Vec<TaskMix> = (0..4)
            .map(|k| TaskMix {
                probability: 0.25,
                a_sat: 0.1 * k as f64,
                a_cs: 1.0 - 0.1 * k as f64,
                coverage: full,
            })
            .collect();
        assert_relative_eq!(total_cov_down(&tasks), 1.0, epsilon = 1e-15);
        let one = [TaskMix {
            probability: 1.0,
            a_sat: 1.0,
            a_cs: 0.0,
            coverage: LinkCoverage {
                sat_down: 0.7,
                cs_down: 0.2,
                sat_up: 0.4,
                cs_up: 0.9,
            },
        }];
        assert_relative_eq!(total_cov_down(&one), 0.7);
        assert_relative_eq!(total_cov_up(&one), 0.4);
    }
}
