//! Point estimates with 95% confidence intervals and goodness-of-fit.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Asymptotic 95% Kolmogorov–Smirnov coefficient: reject when
/// D > KS_95 / √n.
pub const KS_95: f64 = 1.358;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub n: u64,
}

impl Estimate {
    pub fn halfwidth(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    /// √(p(1−p)/n) at a reference probability `p`.
    pub fn binomial_sigma(p: f64, n: u64) -> f64 {
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

/// Wilson score interval for `successes` out of `n`.
pub fn wilson(successes: u64, n: u64) -> Estimate {
    assert!(n > 0, "Wilson interval needs at least one trial");
    assert!(successes <= n);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    Estimate {
        mean: p,
        lower: (centre - half).max(0.0),
        upper: (centre + half).min(1.0),
        n,
    }
}

/// Sample mean with a normal-approximation interval.
pub fn mean_ci(samples: &[f64]) -> Estimate {
    let n = samples.len();
    assert!(n > 1, "need at least two samples");
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let half = Z95 * (var / nf).sqrt();
    Estimate {
        mean,
        lower: mean - half,
        upper: mean + half,
        n: n as u64,
    }
}

/// Kolmogorov–Smirnov distance between the samples (sorted in place) and
/// a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let f: Vec<f64> = samples.iter().map(|&x| cdf(x)).collect();
    ks_from_sorted_cdf(&f)
}

/// KS statistic given the model CDF at each sample in ascending order.
pub fn ks_from_sorted_cdf(cdf_values: &[f64]) -> f64 {
    let n = cdf_values.len() as f64;
    cdf_values
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let hi = (i as f64 + 1.0) / n - f;
            let lo = f - i as f64 / n;
            hi.max(lo)
        })
        .fold(0.0, f64::max)
}

pub fn ks_critical(n: usize) -> f64 {
    KS_95 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wilson_all_ones() {
        let e = wilson(50, 50);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.upper, 1.0);
        assert!(e.lower < 1.0 && e.lower > 0.9);
    }

    #[test]
    fn wilson_half() {
        let e = wilson(500_000, 1_000_000);
        assert_relative_eq!(e.halfwidth(), 0.00098, max_relative = 1e-3);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut xs, |x| x);
        assert_relative_eq!(d, 0.5 / n as f64, max_relative = 1e-9);
    }

    #[test]
    fn normal_interval() {
        let e = mean_ci(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert_relative_eq!(e.halfwidth(), Z95 * (5.0f64 / 12.0).sqrt(), max_relative = 1e-12);
    }
}
