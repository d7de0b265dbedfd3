//! Biased average-power association between the nearest offloadable
//! satellite of a task type and the nearest cloud server.

use std::f64::consts::PI;

use crate::error::NumericalError;
use crate::geometry::{horizon, nearest_sat_angle_density, slant_range, thinned_nearest_angle_density};
use crate::numerics::{graded_toward_lower, integrate_with_breakpoints, QuadratureSpec};
use crate::params::{ConstellationGeometry, SystemParams, SPEED_OF_LIGHT};

/// Refinement levels used toward the lower edge of satellite integrals,
/// where the nearest-satellite density concentrates for large N.
pub(crate) const GRADING_LEVELS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationResult {
    pub a_sat: f64,
    pub a_cs: f64,
    pub q_s_factor: f64,
    pub n_offloadable: f64,
}

/// Q_s = (p_c B_c / (p_s B_s))^{1/α} (4πf_s/c)^{2/α} (c/4πf_c). A UE picks
/// the satellite iff D_c ≥ Q_s D_s^{2/α}.
pub fn q_s_constant(params: &SystemParams) -> f64 {
    let a = params.alpha;
    let ratio = params.p_c / (params.p_s * params.bias_ratio);
    ratio.powf(1.0 / a) * (4.0 * PI * params.f_s / SPEED_OF_LIGHT).powf(2.0 / a) * (SPEED_OF_LIGHT / (4.0 * PI * params.f_c))
}

/// Probability that the UE associates with the nearest of `n_i` offloadable
/// satellites.
pub fn assoc_prob_sat(
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    if n_i <= 0.0 {
        return Ok(0.0);
    }
    let q = q_s_constant(params);
    let lc = params.lambda_c;
    let e = 4.0 / params.alpha;
    let h = horizon(geom);
    let pts = graded_toward_lower(0.0, h.theta_c, GRADING_LEVELS);
    let f = |phi: f64| {
        let x = slant_range(phi, geom);
        (-lc * PI * q * q * x.powf(e)).exp() * nearest_sat_angle_density(phi, n_i)
    };
    Ok(integrate_with_breakpoints(f, &pts, quad)?.value.clamp(0.0, 1.0))
}

/// Satellite association when each of `n_si` satellites is offloadable
/// independently with probability `p_ofld`, rather than through the mean
/// count N_i. Used to separate the mean-count decoupling from sampling
/// error when comparing with simulation.
pub fn assoc_prob_sat_thinned(
    n_si: f64,
    p_ofld: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    if n_si <= 0.0 || p_ofld <= 0.0 {
        return Ok(0.0);
    }
    let q = q_s_constant(params);
    let lc = params.lambda_c;
    let e = 4.0 / params.alpha;
    let h = horizon(geom);
    let pts = graded_toward_lower(0.0, h.theta_c, GRADING_LEVELS);
    let f = |phi: f64| {
        let x = slant_range(phi, geom);
        (-lc * PI * q * q * x.powf(e)).exp() * thinned_nearest_angle_density(phi, n_si, p_ofld)
    };
    Ok(integrate_with_breakpoints(f, &pts, quad)?.value.clamp(0.0, 1.0))
}

/// Probability that the UE associates with the nearest cloud server, as the
/// sum of the three ranges of the CS distance: closer than any satellite
/// could win, the contested band, and beyond the band.
pub fn assoc_prob_cs(
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, NumericalError> {
    if n_i <= 0.0 {
        return Ok(1.0);
    }
    let q = q_s_constant(params);
    let a = params.alpha;
    let lc = params.lambda_c;
    let (re, rs, a_s) = (geom.earth_radius(), geom.shell_radius(), geom.altitude());
    let h = horizon(geom);
    let lo = (a_s * q.powf(a / 2.0)).powf(2.0 / a);
    let hi = (h.d_max_down * q.powf(a / 2.0)).powf(2.0 / a);
    let planar = |x: f64| 2.0 * PI * lc * x * (-PI * lc * x * x).exp();

    let near = integrate_with_breakpoints(planar, &[0.0, lo], quad)?.value;
    let band = |x: f64| {
        let u = 1.0 - (q.powf(-a) * x.powf(a) - a_s * a_s) / (2.0 * re * rs);
        let void = (1.0 - u.clamp(-1.0, 1.0).acos() / PI).powf(n_i);
        void * planar(x)
    };
    let pts = graded_toward_lower(lo, hi, GRADING_LEVELS);
    let middle = integrate_with_breakpoints(band, &pts, quad)?.value;
    let void_all = (1.0 - (re / rs).acos() / PI).powf(n_i);
    let far = integrate_with_breakpoints(|x| void_all * planar(x), &[hi, f64::INFINITY], quad)?.value;
    Ok((near + middle + far).clamp(0.0, 1.0))
}

pub fn associate(
    n_i: f64,
    params: &SystemParams,
    geom: &ConstellationGeometry,
    quad: &QuadratureSpec,
) -> Result<AssociationResult, NumericalError> {
    Ok(AssociationResult {
        a_sat: assoc_prob_sat(n_i, params, geom, quad)?,
        a_cs: assoc_prob_cs(n_i, params, geom, quad)?,
        q_s_factor: q_s_constant(params),
        n_offloadable: n_i,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::contact_cdf_nearest_sat;
    use crate::params::Scenario;
    use approx::assert_relative_eq;

    #[test]
    fn q_s_unity_construction() {
        let mut p = Scenario::reference().params;
        p.p_c = 1.0;
        p.p_s = 1.0;
        p.bias_ratio = 1.0;
        p.f_c = 1e9;
        // (4πf_s/c)^{2/α} = 4πf_c/c
        p.f_s = (4.0 * PI * p.f_c / SPEED_OF_LIGHT).powf(p.alpha / 2.0) * SPEED_OF_LIGHT / (4.0 * PI);
        assert_relative_eq!(q_s_constant(&p), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn q_s_bias_scaling() {
        let mut p = Scenario::reference().params;
        let q1 = q_s_constant(&p);
        p.bias_ratio *= 2.0;
        assert_relative_eq!(q_s_constant(&p) / q1, 2f64.powf(-1.0 / 2.7), max_relative = 1e-13);
    }

    #[test]
    fn vanishing_cs_density_leaves_visibility_mass() {
        let s = Scenario::reference();
        let mut p = s.params.clone();
        p.lambda_c = 1e-30;
        let q = QuadratureSpec::default();
        let a = assoc_prob_sat(100.0, &p, &s.geometry, &q).unwrap();
        let h = horizon(&s.geometry);
        assert_relative_eq!(
            a,
            contact_cdf_nearest_sat(h.d_max_down, 100.0, &s.geometry),
            max_relative = 1e-8
        );
    }

    #[test]
    fn degenerate_counts() {
        let s = Scenario::reference();
        let q = QuadratureSpec::default();
        assert_eq!(assoc_prob_sat(0.0, &s.params, &s.geometry, &q).unwrap(), 0.0);
        assert_eq!(assoc_prob_cs(0.0, &s.params, &s.geometry, &q).unwrap(), 1.0);
        let mut p = s.params.clone();
        p.lambda_c = 1e-2;
        assert!(assoc_prob_cs(100.0, &p, &s.geometry, &q).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn partition_at_reference_point() {
        let s = Scenario::reference();
        let r = associate(61.97, &s.params, &s.geometry, &QuadratureSpec::default()).unwrap();
        assert!((r.a_sat + r.a_cs - 1.0).abs() < 1e-6, "{r:?}");
    }
}
