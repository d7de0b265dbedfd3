//! Independent checks for the queueing closed forms: a generic CTMC
//! stationary solve and discrete-event simulation of single queues.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::NumericalError;

/// Stationary distribution of an M/M/1/N queue, from the full generator
/// with one balance equation replaced by normalisation.
pub fn mm1n_stationary(lambda: f64, mu: f64, buffer: u32) -> Result<Vec<f64>, NumericalError> {
    let n = buffer as usize + 1;
    let mut q = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        if k + 1 < n {
            q[(k, k + 1)] = lambda;
            q[(k, k)] -= lambda;
        }
        if k > 0 {
            q[(k, k - 1)] = mu;
            q[(k, k)] -= mu;
        }
    }
    // π Q = 0  ⇔  Qᵀ πᵀ = 0.
    let mut a = q.transpose();
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| NumericalError::Domain("singular generator".into()))?;
    Ok(pi.iter().copied().collect())
}

/// Queue statistics estimated by simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueStats {
    /// Fraction of arrivals admitted.
    pub admitted: f64,
    /// Time-average number in system.
    pub mean_in_system: f64,
    /// Mean sojourn of admitted jobs.
    pub mean_sojourn: f64,
}

/// Event-driven M/M/1/N simulation over `arrivals` arrival epochs.
pub fn simulate_mm1n(lambda: f64, mu: f64, buffer: u32, arrivals: u64, seed: u64) -> QueueStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inter = Exp::new(lambda).expect("positive rate");
    let service = Exp::new(mu).expect("positive rate");
    let mut t = 0.0;
    let mut in_system: u32 = 0;
    let mut next_arrival = inter.sample(&mut rng);
    let mut next_departure = f64::INFINITY;
    let mut area = 0.0;
    let (mut seen, mut admitted) = (0u64, 0u64);
    while seen < arrivals {
        let next = next_arrival.min(next_departure);
        area += in_system as f64 * (next - t);
        t = next;
        if next_arrival <= next_departure {
            seen += 1;
            if in_system < buffer {
                admitted += 1;
                in_system += 1;
                if in_system == 1 {
                    next_departure = t + service.sample(&mut rng);
                }
            }
            next_arrival = t + inter.sample(&mut rng);
        } else {
            in_system -= 1;
            next_departure = if in_system > 0 {
                t + service.sample(&mut rng)
            } else {
                f64::INFINITY
            };
        }
    }
    let mean_in_system = area / t;
    let admitted_rate = admitted as f64 / t;
    QueueStats {
        admitted: admitted as f64 / seen as f64,
        mean_in_system,
        mean_sojourn: mean_in_system / admitted_rate,
    }
}

/// Mean sojourn per class in a FIFO single-server queue with Poisson
/// arrivals per class and exponential service at the class rate, via the
/// Lindley recursion over `customers` arrivals after `warmup` discarded ones.
pub fn simulate_multiclass_fifo(classes: &[(f64, f64)], customers: u64, warmup: u64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = classes.iter().map(|c| c.0).sum();
    let inter = Exp::new(total).expect("positive rate");
    let services: Vec<Exp<f64>> = classes.iter().map(|c| Exp::new(c.1).expect("positive rate")).collect();
    let mut sums = vec![0.0; classes.len()];
    let mut counts = vec![0u64; classes.len()];
    let mut wait = 0.0;
    for n in 0..customers + warmup {
        let u: f64 = rng.random::<f64>() * total;
        let mut k = 0;
        let mut acc = classes[0].0;
        while u >= acc && k + 1 < classes.len() {
            k += 1;
            acc += classes[k].0;
        }
        let s = services[k].sample(&mut rng);
        if n >= warmup {
            sums[k] += wait + s;
            counts[k] += 1;
        }
        let gap = inter.sample(&mut rng);
        wait = (wait + s - gap).max(0.0);
    }
    sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stationary_sums_to_one_and_is_geometric() {
        let pi = mm1n_stationary(0.5, 1.0, 4).unwrap();
        assert_relative_eq!(pi.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
        for w in pi.windows(2) {
            assert_relative_eq!(w[1] / w[0], 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn des_admission_close_to_stationary() {
        let pi = mm1n_stationary(0.8, 1.0, 2).unwrap();
        let s = simulate_mm1n(0.8, 1.0, 2, 400_000, 7);
        assert!((s.admitted - (1.0 - pi[2])).abs() < 5e-3, "{s:?}");
    }
}
