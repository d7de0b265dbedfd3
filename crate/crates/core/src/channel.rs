//! Fading laws, path loss and per-link SNR.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::NumericalError;
use crate::numerics::gamma;
use crate::params::{SystemParams, SPEED_OF_LIGHT};

/// Shadowed-Rician parameters: LOS power Ω, half scatter power b₀ and
/// Nakagami shape m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrFading {
    pub omega: f64,
    pub b0: f64,
    pub m: f64,
}

impl SrFading {
    pub fn new(omega: f64, b0: f64, m: f64) -> Self {
        Self { omega, b0, m }
    }

    /// E[|h|²] = 2b₀ + Ω.
    pub fn mean_power(&self) -> f64 {
        2.0 * self.b0 + self.omega
    }
}

/// Moment-matched Gamma law for the Shadowed-Rician power, plus the
/// integer-shape variant used by the closed-form coverage expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox {
    pub alpha_s: f64,
    pub beta_s: f64,
    /// round(α_s), at least 1.
    pub alpha_int: u32,
    /// Scale paired with `alpha_int` so the mean stays 2b₀ + Ω.
    pub beta_int: f64,
    /// Γ(α_int + 1)^{−1/α_int}.
    pub mu: f64,
}

pub fn gamma_approx_of_sr(sr: &SrFading) -> GammaApprox {
    let SrFading { omega, b0, m } = *sr;
    let mean = 2.0 * b0 + omega;
    let v = 4.0 * m * b0 * b0 + 4.0 * m * b0 * omega + omega * omega;
    let alpha_s = m * mean * mean / v;
    let beta_s = v / (m * mean);
    let alpha_int = (alpha_s.round() as u32).max(1);
    let a = alpha_int as f64;
    GammaApprox {
        alpha_s,
        beta_s,
        alpha_int,
        beta_int: mean / a,
        mu: gamma(a + 1.0).powf(-1.0 / a),
    }
}

impl GammaApprox {
    /// (1 − e^{−μt/β'})^{α_int}.
    pub fn tight_bound_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        (-(-self.mu * t / self.beta_int).exp_m1()).powi(self.alpha_int as i32)
    }

    /// Complement of the tight bound written as the finite binomial sum
    /// Σ_{j=1}^{α} C(α,j)(−1)^{j+1} e^{−jμy/β'}.
    pub fn bound_survival(&self, y: f64) -> f64 {
        let n = self.alpha_int;
        let base = -self.mu * y / self.beta_int;
        let mut binom = 1.0;
        let mut sum = 0.0;
        for j in 1..=n {
            binom *= (n - j + 1) as f64 / j as f64;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * binom * (j as f64 * base).exp();
        }
        sum
    }
}

/// Free-space style gain (c/(4πfd))^exponent.
pub fn path_loss(d: f64, f: f64, exponent: f64) -> Result<f64, NumericalError> {
    if !(d > 0.0) {
        return Err(NumericalError::Domain(format!("path loss at distance {d}")));
    }
    Ok((SPEED_OF_LIGHT / (4.0 * PI * f * d)).powf(exponent))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingKind {
    ShadowedRician(SrFading),
    Rayleigh,
}

impl FadingKind {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingKind::ShadowedRician(sr) => sample_sr_power(sr, rng),
            FadingKind::Rayleigh => sample_rayleigh_power(rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power: f64,
    pub frequency: f64,
    pub noise: f64,
    pub path_loss_exp: f64,
    pub fading: FadingKind,
}

impl LinkBudget {
    pub fn sat_downlink(p: &SystemParams) -> Self {
        Self {
            tx_power: p.p_s,
            frequency: p.f_s,
            noise: p.sigma2_u,
            path_loss_exp: 2.0,
            fading: FadingKind::ShadowedRician(p.sr),
        }
    }

    pub fn sat_uplink(p: &SystemParams) -> Self {
        Self {
            tx_power: p.p_u,
            frequency: p.f_s,
            noise: p.sigma2_s,
            path_loss_exp: 2.0,
            fading: FadingKind::ShadowedRician(p.sr),
        }
    }

    pub fn cs_downlink(p: &SystemParams) -> Self {
        Self {
            tx_power: p.p_c,
            frequency: p.f_c,
            noise: p.sigma2_u,
            path_loss_exp: p.alpha,
            fading: FadingKind::Rayleigh,
        }
    }

    pub fn cs_uplink(p: &SystemParams) -> Self {
        Self {
            tx_power: p.p_u,
            frequency: p.f_c,
            noise: p.sigma2_c,
            path_loss_exp: p.alpha,
            fading: FadingKind::Rayleigh,
        }
    }

    /// Received power with fading averaged out.
    pub fn mean_rx_power(&self, d: f64) -> Result<f64, NumericalError> {
        Ok(self.tx_power * path_loss(d, self.frequency, self.path_loss_exp)?)
    }

    pub fn snr(&self, d: f64, fading_draw: f64) -> Result<f64, NumericalError> {
        Ok(self.mean_rx_power(d)? * fading_draw / self.noise)
    }

    /// The constant A with SNR ≥ τ ⇔ fading ≥ A·d^exponent.
    pub fn threshold_constant(&self, tau: f64) -> f64 {
        let g = SPEED_OF_LIGHT / (4.0 * PI * self.frequency);
        tau * self.noise / (self.tx_power * g.powf(self.path_loss_exp))
    }
}

/// Draws |h|² as |A e^{jθ} + S|² with A² ~ Gamma(m, Ω/m) and S circularly
/// symmetric Gaussian with variance b₀ per component. The phase θ is
/// dropped because S is rotation invariant.
pub fn sample_sr_power<R: Rng + ?Sized>(sr: &SrFading, rng: &mut R) -> f64 {
    let los = Gamma::new(sr.m, sr.omega / sr.m)
        .expect("validated SR parameters")
        .sample(rng);
    let s = sr.b0.sqrt();
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    let re = los.sqrt() + s * x;
    let im = s * y;
    re * re + im * im
}

pub fn sample_rayleigh_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sr_power_cdf, SR_SERIES_TOL};
    use approx::assert_relative_eq;

    fn table_sr() -> SrFading {
        SrFading::new(1.29, 0.158, 19.4)
    }

    #[test]
    fn gamma_moments() {
        let g = gamma_approx_of_sr(&table_sr());
        assert_relative_eq!(g.alpha_s * g.beta_s, 1.606, max_relative = 1e-12);
        assert_relative_eq!(g.alpha_s, 2.576_9, max_relative = 5e-5);
        assert_relative_eq!(g.beta_s, 0.623_24, max_relative = 5e-5);
        assert_eq!(g.alpha_int, 3);
        assert_relative_eq!(g.beta_int * 3.0, 1.606, max_relative = 1e-14);
        assert_relative_eq!(g.mu, 6f64.powf(-1.0 / 3.0), max_relative = 1e-14);
    }

    #[test]
    fn binomial_sum_matches_bound() {
        let g = gamma_approx_of_sr(&table_sr());
        for k in 0..50 {
            let t = k as f64 * 0.2;
            assert_relative_eq!(1.0 - g.tight_bound_cdf(t), g.bound_survival(t), epsilon = 1e-13);
        }
    }

    #[test]
    fn tight_bound_gap_to_series() {
        let sr = table_sr();
        let g = gamma_approx_of_sr(&sr);
        let gap = (0..=1000)
            .map(|k| {
                let t = k as f64 * 0.01;
                (g.tight_bound_cdf(t) - sr_power_cdf(t, &sr, SR_SERIES_TOL).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert!(gap < 0.05, "gap {gap}");
    }

    #[test]
    fn path_loss_values() {
        let f = 2e9;
        let d0 = SPEED_OF_LIGHT / (4.0 * PI * f);
        assert_relative_eq!(path_loss(d0, f, 2.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(path_loss(5e5, f, 2.0).unwrap(), 5.694e-16, max_relative = 1e-3);
        let r = path_loss(1e6, f, 2.0).unwrap() / path_loss(5e5, f, 2.0).unwrap();
        assert_relative_eq!(r, 0.25, max_relative = 1e-14);
        assert!(path_loss(0.0, f, 2.0).is_err());
    }

    #[test]
    fn snr_zero_fading() {
        let p = crate::params::Scenario::reference().params;
        assert_eq!(LinkBudget::sat_downlink(&p).snr(5e5, 0.0).unwrap(), 0.0);
    }
}
