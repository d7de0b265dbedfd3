//! One Monte Carlo trial: a fresh constellation and ground process around a
//! typical UE, the biased-power association and per-link fading draws.

use rand::Rng;

use crate::association::q_s_constant;
use crate::channel::LinkBudget;
use crate::error::NumericalError;
use crate::params::{ConstellationGeometry, SatelliteLaw, SystemParams};

use super::sampling::{nearest_ground_distance, nearest_visible_distance};

/// Redraws allowed when a trial has neither a visible satellite nor a
/// server in the disk.
pub const MAX_REDRAWS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Satellite,
    CloudServer,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Satellite => "sat",
            Tier::CloudServer => "cs",
        }
    }
}

/// Per-link SNRs (linear) for the nearest candidate of each tier.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkSnr {
    pub down: f64,
    pub up: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub tier: Tier,
    pub sat_distance: Option<f64>,
    pub cs_distance: Option<f64>,
    pub sat_snr: Option<LinkSnr>,
    pub cs_snr: Option<LinkSnr>,
    /// SNR ≥ τ on the serving link.
    pub covered_down: bool,
    pub covered_up: bool,
    pub redraws: u32,
}

/// Everything a trial of one task class needs, resolved once.
#[derive(Debug, Clone, Copy)]
pub struct TrialSetup {
    pub geometry: ConstellationGeometry,
    pub law: SatelliteLaw,
    /// N_{s_i}.
    pub satellites: u32,
    /// Probability that a satellite accepts the task.
    pub p_ofld: f64,
    pub lambda_c: f64,
    pub disk_radius: f64,
    pub alpha: f64,
    pub q_s: f64,
    pub tau: f64,
    pub sat_down: LinkBudget,
    pub sat_up: LinkBudget,
    pub cs_down: LinkBudget,
    pub cs_up: LinkBudget,
}

impl TrialSetup {
    pub fn new(
        params: &SystemParams,
        geometry: ConstellationGeometry,
        law: SatelliteLaw,
        satellites: u32,
        p_ofld: f64,
        disk_radius: f64,
    ) -> Self {
        Self {
            geometry,
            law,
            satellites,
            p_ofld,
            lambda_c: params.lambda_c,
            disk_radius,
            alpha: params.alpha,
            q_s: q_s_constant(params),
            tau: params.tau,
            sat_down: LinkBudget::sat_downlink(params),
            sat_up: LinkBudget::sat_uplink(params),
            cs_down: LinkBudget::cs_downlink(params),
            cs_up: LinkBudget::cs_uplink(params),
        }
    }
}

fn draw_link<R: Rng + ?Sized>(down: &LinkBudget, up: &LinkBudget, d: f64, rng: &mut R) -> Result<LinkSnr, NumericalError> {
    let fd = down.fading.sample(rng);
    let fu = up.fading.sample(rng);
    Ok(LinkSnr {
        down: down.snr(d, fd)?,
        up: up.snr(d, fu)?,
    })
}

pub fn run_trial<R: Rng + ?Sized>(setup: &TrialSetup, rng: &mut R) -> Result<TrialOutcome, NumericalError> {
    let mut redraws = 0;
    let (sat, cs) = loop {
        let sat = nearest_visible_distance(setup.satellites, setup.p_ofld, &setup.geometry, setup.law, rng);
        let cs = nearest_ground_distance(setup.lambda_c, setup.disk_radius, rng);
        if sat.is_some() || cs.is_some() {
            break (sat, cs);
        }
        redraws += 1;
        if redraws > MAX_REDRAWS {
            return Err(NumericalError::Redraw(redraws));
        }
    };

    // Biased average power favours the satellite iff D_c ≥ Q_s D_s^{2/α}.
    let tier = match (sat, cs) {
        (Some(ds), Some(dc)) if dc >= setup.q_s * ds.powf(2.0 / setup.alpha) => Tier::Satellite,
        (Some(_), None) => Tier::Satellite,
        _ => Tier::CloudServer,
    };

    let sat_snr = sat.map(|d| draw_link(&setup.sat_down, &setup.sat_up, d, rng)).transpose()?;
    let cs_snr = cs.map(|d| draw_link(&setup.cs_down, &setup.cs_up, d, rng)).transpose()?;
    let serving = match tier {
        Tier::Satellite => sat_snr,
        Tier::CloudServer => cs_snr,
    }
    .expect("serving tier has a link");
    Ok(TrialOutcome {
        tier,
        sat_distance: sat,
        cs_distance: cs,
        sat_snr,
        cs_snr,
        covered_down: serving.down >= setup.tau,
        covered_up: serving.up >= setup.tau,
        redraws,
    })
}
