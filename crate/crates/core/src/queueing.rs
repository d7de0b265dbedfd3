//! Loads, transmission times, queueing response times and the
//! offloadability fixed point.

use crate::coverage::LinkCoverage;
use crate::error::NumericalError;

/// Σ_{n=0}^{N} ρ^{n−s} for a shift `s`, used to keep powers bounded.
fn shifted_power_sum(rho: f64, buffer: u32, shift: u32) -> f64 {
    (0..=buffer).map(|n| rho.powi(n as i32 - shift as i32)).sum()
}

/// Probability that an M/M/1/N buffer is full, ρ^N / Σ_{n=0}^{N} ρ^n.
pub fn blocking_probability(rho: f64, buffer: u32) -> f64 {
    if rho == f64::INFINITY {
        return 1.0;
    }
    if rho <= 1.0 {
        rho.powi(buffer as i32) / shifted_power_sum(rho, buffer, 0)
    } else {
        1.0 / shifted_power_sum(rho, buffer, buffer)
    }
}

/// Probability 1 − (1−ρ)ρ^N/(1−ρ^{N+1}) that a satellite accepts a task.
/// Evaluated in the equivalent form 1 − ρ^N/Σρ^n, which is continuous
/// through ρ = 1.
pub fn offload_probability(rho: f64, buffer: u32) -> f64 {
    if rho == f64::INFINITY {
        return 0.0;
    }
    if rho <= 1.0 {
        1.0 - blocking_probability(rho, buffer)
    } else {
        let total = shifted_power_sum(rho, buffer, buffer);
        (total - 1.0) / total
    }
}

/// Mean number of jobs in an M/M/1/N system,
/// ρ(1 − (N+1)ρ^N + Nρ^{N+1}) / ((1−ρ)(1−ρ^{N+1})).
pub fn mean_jobs_in_system(rho: f64, buffer: u32) -> f64 {
    let n = buffer as f64;
    if (rho - 1.0).abs() < 1e-3 || rho > 1e3 {
        // Direct weighted sum; the closed form cancels badly here.
        let shift = if rho > 1.0 { buffer } else { 0 };
        let weights: Vec<f64> = (0..=buffer).map(|k| rho.powi(k as i32 - shift as i32)).collect();
        let total: f64 = weights.iter().sum();
        return weights.iter().enumerate().map(|(k, w)| k as f64 * w).sum::<f64>() / total;
    }
    let rn = rho.powi(buffer as i32);
    rho * (1.0 - (n + 1.0) * rn + n * rn * rho) / ((1.0 - rho) * (1.0 - rn * rho))
}

/// Mean sojourn time at a satellite via Little's law on the accepted
/// traffic. With no arrivals the bare service time is returned.
pub fn sat_response_time(lambda: f64, mu: f64, buffer: u32) -> f64 {
    if lambda <= 0.0 {
        return 1.0 / mu;
    }
    let rho = lambda / mu;
    mean_jobs_in_system(rho, buffer) / (lambda * offload_probability(rho, buffer))
}

/// One task class at a cloud server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsClass {
    pub lambda: f64,
    pub mu: f64,
}

/// Multi-class M/G/1 response times (Pollaczek–Khinchin mean value) with
/// exponential service per class.
pub fn cs_response_times(classes: &[CsClass]) -> Result<Vec<f64>, NumericalError> {
    let total: f64 = classes.iter().map(|c| c.lambda).sum();
    if total <= 0.0 {
        return Ok(classes.iter().map(|c| 1.0 / c.mu).collect());
    }
    let util = total * classes.iter().map(|c| c.lambda / total / c.mu).sum::<f64>();
    if !(util < 1.0) {
        return Err(NumericalError::Unstable { utilization: util });
    }
    let second = classes.iter().map(|c| 2.0 * (c.lambda / total) / (c.mu * c.mu)).sum::<f64>();
    let wait = total * second / (2.0 * (1.0 - util));
    Ok(classes.iter().map(|c| 1.0 / c.mu + wait).collect())
}

/// Mean number of UEs sharing a server and the resulting bandwidth share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierLoad {
    pub mean_ues_sat: f64,
    pub mean_ues_cs: f64,
    pub w_sat: f64,
    pub w_cs: f64,
}

/// Mean loads under the mean-load approximation:
/// E[N_s] = 1 + 1.28 λ_{u_i} A_s / λ_{s_i} and E[N_c] = λ_u A_0 / λ_c.
pub fn mean_loads(
    lambda_ui: f64,
    a_sat: f64,
    lambda_si: f64,
    lambda_u: f64,
    a_cs: f64,
    lambda_c: f64,
    bandwidth: f64,
) -> TierLoad {
    let mean_ues_sat = if a_sat > 0.0 {
        1.0 + 1.28 * lambda_ui * a_sat / lambda_si
    } else {
        1.0
    };
    let mean_ues_cs = lambda_u * a_cs / lambda_c;
    TierLoad {
        mean_ues_sat,
        mean_ues_cs,
        w_sat: bandwidth / mean_ues_sat,
        w_cs: if mean_ues_cs > 0.0 {
            bandwidth / mean_ues_cs
        } else {
            bandwidth
        },
    }
}

/// D / (P · W · log₂(1+τ)).
pub fn transmission_time(bits: f64, coverage: f64, bandwidth: f64, tau: f64, link: &'static str) -> Result<f64, NumericalError> {
    let rate = coverage * bandwidth * (1.0 + tau).log2();
    if !(rate > 0.0) {
        return Err(NumericalError::Unserviceable(link));
    }
    Ok(bits / rate)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionTimes {
    pub up_cs: f64,
    pub down_cs: f64,
    pub up_sat: f64,
    pub down_sat: f64,
}

pub fn transmission_times(
    input_bits: f64,
    output_bits: f64,
    coverage: &LinkCoverage,
    loads: &TierLoad,
    tau: f64,
) -> Result<TransmissionTimes, NumericalError> {
    Ok(TransmissionTimes {
        up_cs: transmission_time(input_bits, coverage.cs_up, loads.w_cs, tau, "UE-CS uplink")?,
        down_cs: transmission_time(output_bits, coverage.cs_down, loads.w_cs, tau, "CS-UE downlink")?,
        up_sat: transmission_time(input_bits, coverage.sat_up, loads.w_sat, tau, "UE-satellite uplink")?,
        down_sat: transmission_time(output_bits, coverage.sat_down, loads.w_sat, tau, "satellite-UE downlink")?,
    })
}

/// Times for one tier: response plus both transmissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierTimes {
    pub response: f64,
    pub up: f64,
    pub down: f64,
}

impl TierTimes {
    pub fn total(&self) -> f64 {
        self.response + self.up + self.down
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBreakdown {
    pub cs: Option<TierTimes>,
    pub sat: Option<TierTimes>,
    pub t_avg: f64,
}

/// A_0·(CS times) + A_s·(satellite times). A tier with zero weight may be
/// left out; one with positive weight must be present.
pub fn average_delay(
    a_cs: f64,
    cs: Option<TierTimes>,
    a_sat: f64,
    sat: Option<TierTimes>,
) -> Result<DelayBreakdown, NumericalError> {
    let part = |w: f64, t: Option<TierTimes>, name: &'static str| match (w > 0.0, t) {
        (false, _) => Ok(0.0),
        (true, Some(t)) => Ok(w * t.total()),
        (true, None) => Err(NumericalError::Unserviceable(name)),
    };
    let t_avg = part(a_cs, cs, "cloud server")? + part(a_sat, sat, "satellite")?;
    if !t_avg.is_finite() {
        return Err(NumericalError::NonFinite("average delay"));
    }
    Ok(DelayBreakdown { cs, sat, t_avg })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMethod {
    Damped,
    Bisection,
}

impl FixedPointMethod {
    pub fn name(self) -> &'static str {
        match self {
            FixedPointMethod::Damped => "damped",
            FixedPointMethod::Bisection => "bisection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub p_ofld: f64,
    pub iterations: usize,
    pub method: FixedPointMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-9,
            max_iter: 500,
        }
    }
}

/// Damped iteration x ← (1−γ)x + γG(x) on [0, 1], starting from x = 1.
pub fn damped_fixed_point<G>(g: G, opts: &FixedPointOptions) -> Result<FixedPoint, NumericalError>
where
    G: Fn(f64) -> Result<f64, NumericalError>,
{
    let mut x = 1.0;
    let mut step = f64::INFINITY;
    for k in 1..=opts.max_iter {
        let next = ((1.0 - opts.damping) * x + opts.damping * g(x)?).clamp(0.0, 1.0);
        step = (next - x).abs();
        x = next;
        if step < opts.tol {
            return Ok(FixedPoint {
                p_ofld: x,
                iterations: k,
                method: FixedPointMethod::Damped,
            });
        }
    }
    Err(NumericalError::FixedPoint {
        iterations: opts.max_iter,
        last_step: step,
    })
}

/// Bisection on G(x) − x over [0, 1]; valid when G is nonincreasing, which
/// makes the root unique.
pub fn bisection_fixed_point<G>(g: G, tol: f64) -> Result<FixedPoint, NumericalError>
where
    G: Fn(f64) -> Result<f64, NumericalError>,
{
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if g(hi)? - hi >= 0.0 {
        return Ok(FixedPoint {
            p_ofld: 1.0,
            iterations: 1,
            method: FixedPointMethod::Bisection,
        });
    }
    let mut k = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid)? - mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        k += 1;
        if k > 200 {
            break;
        }
    }
    Ok(FixedPoint {
        p_ofld: 0.5 * (lo + hi),
        iterations: k,
        method: FixedPointMethod::Bisection,
    })
}

/// Damped iteration with bisection as the fallback.
pub fn solve_offload_fixed_point<G>(g: G, opts: &FixedPointOptions) -> Result<FixedPoint, NumericalError>
where
    G: Fn(f64) -> Result<f64, NumericalError>,
{
    match damped_fixed_point(&g, opts) {
        Ok(fp) => Ok(fp),
        Err(NumericalError::FixedPoint { .. }) => bisection_fixed_point(&g, 1e-12),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn offload_probability_values() {
        assert_eq!(offload_probability(0.0, 2), 1.0);
        assert_relative_eq!(offload_probability(1.0, 2), 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(offload_probability(100.0, 2), 101.0 / 10101.0, max_relative = 1e-14);
        assert_eq!(offload_probability(f64::INFINITY, 2), 0.0);
        for n in [1u32, 2, 5] {
            let limit = 1.0 - 1.0 / (n as f64 + 1.0);
            for r in [1.0 - 1e-6, 1.0 + 1e-6] {
                assert!((offload_probability(r, n) - limit).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn printed_form_agrees_away_from_one() {
        for rho in [0.1f64, 0.5, 0.9, 1.5, 3.0] {
            for n in [1u32, 2, 5] {
                let printed = 1.0 - (1.0 - rho) * rho.powi(n as i32) / (1.0 - rho.powi(n as i32 + 1));
                assert_relative_eq!(offload_probability(rho, n), printed, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn response_time_limits() {
        assert_eq!(sat_response_time(0.0, 4.0, 2), 0.25);
        assert_relative_eq!(sat_response_time(1e-9, 4.0, 2), 0.25, max_relative = 1e-8);
        let one = cs_response_times(&[CsClass { lambda: 3.0, mu: 5.0 }]).unwrap();
        assert_relative_eq!(one[0], 1.0 / (5.0 - 3.0), max_relative = 1e-14);
        assert_relative_eq!(cs_response_times(&[CsClass { lambda: 0.0, mu: 5.0 }]).unwrap()[0], 0.2);
        let two = cs_response_times(&[CsClass { lambda: 1.5, mu: 5.0 }, CsClass { lambda: 1.5, mu: 5.0 }]).unwrap();
        assert_relative_eq!(two[0], one[0], max_relative = 1e-12);
        assert_relative_eq!(two[1], one[0], max_relative = 1e-12);
        match cs_response_times(&[CsClass { lambda: 6.0, mu: 5.0 }]) {
            Err(NumericalError::Unstable { utilization }) => assert_relative_eq!(utilization, 1.2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loads_and_times() {
        let l = mean_loads(1.0, 0.0, 1.0, 5.0, 0.2, 1.0, 100.0);
        assert_eq!(l.mean_ues_sat, 1.0);
        assert_eq!(l.w_sat, 100.0);
        assert_relative_eq!(l.mean_ues_cs, 1.0);
        assert_relative_eq!(transmission_time(8.0, 1.0, 8.0, 1.0, "x").unwrap(), 1.0);
        assert_relative_eq!(transmission_time(8.0, 0.5, 8.0, 1.0, "x").unwrap(), 2.0);
        assert!(transmission_time(8.0, 0.0, 8.0, 1.0, "x").is_err());
        let t = TierTimes {
            response: 1.0,
            up: 1.0,
            down: 1.0,
        };
        let d = average_delay(0.3, Some(t), 0.7, Some(t)).unwrap();
        assert_relative_eq!(d.t_avg, 3.0, max_relative = 1e-15);
        assert!(average_delay(0.3, Some(t), 0.7, None).is_err());
        assert_relative_eq!(average_delay(1.0, Some(t), 0.0, None).unwrap().t_avg, 3.0);
    }

    #[test]
    fn fixed_point_solvers_agree() {
        let g = |x: f64| Ok(offload_probability(4.0 * x, 2));
        let a = damped_fixed_point(g, &FixedPointOptions::default()).unwrap();
        let b = bisection_fixed_point(g, 1e-12).unwrap();
        assert!((a.p_ofld - b.p_ofld).abs() < 1e-8);
        let stiff = |x: f64| Ok(offload_probability(1e4 * x, 2));
        let opts = FixedPointOptions {
            max_iter: 5,
            ..Default::default()
        };
        let fp = solve_offload_fixed_point(stiff, &opts).unwrap();
        assert_eq!(fp.method, FixedPointMethod::Bisection);
        assert!((stiff(fp.p_ofld).unwrap() - fp.p_ofld).abs() < 1e-6);
    }
}
