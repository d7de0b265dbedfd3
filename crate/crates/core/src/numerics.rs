//! Adaptive quadrature and special functions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use statrs::function::gamma as sg;

use crate::channel::SrFading;
use crate::error::NumericalError;

/// Error targets for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self, NumericalError> {
        if !(abs_tol > 0.0 && rel_tol > 0.0 && max_subdivisions >= 1) {
            return Err(NumericalError::Domain(format!(
                "quadrature tolerances must be positive (abs {abs_tol}, rel {rel_tol}, max {max_subdivisions})"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 15-point Kronrod rule with the embedded 7-point Gauss error estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`; `b` may be `+∞`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral, NumericalError> {
    integrate_with_breakpoints(f, &[a, b], spec)
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], ...`, starting the
/// adaptive refinement from that partition. The last point may be `+∞`.
///
/// Breakpoints are how callers give hints about narrow features or endpoint
/// singularities near a known location without altering the integrand.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral, NumericalError> {
    if points.len() < 2 {
        return Err(NumericalError::Domain("need at least two breakpoints".into()));
    }
    if points.iter().any(|p| p.is_nan()) || points[..points.len() - 1].iter().any(|p| !p.is_finite()) {
        return Err(NumericalError::Domain(format!("bad integration limits {points:?}")));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(NumericalError::Domain(format!("limits not increasing: {points:?}")));
    }
    let last = points[points.len() - 1];
    if last == f64::INFINITY {
        // Piecewise map: the finite pieces stay as they are and the tail
        // [p, ∞) becomes [0, 1) under x = p + t/(1 − t).
        let p = points[points.len() - 2];
        let finite = &points[..points.len() - 1];
        let head = if finite.len() >= 2 {
            Some(adaptive(&f, finite, spec)?)
        } else {
            None
        };
        let tail_fn = |t: f64| {
            let u = 1.0 - t;
            let v = f(p + t / u) / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let tail = adaptive(&tail_fn, &[0.0, 1.0], spec)?;
        return Ok(match head {
            Some(h) => Integral {
                value: h.value + tail.value,
                abs_error: h.abs_error + tail.abs_error,
                intervals: h.intervals + tail.intervals,
            },
            None => tail,
        });
    }
    adaptive(&f, points, spec)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral, NumericalError> {
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(f, w[0], w[1]));
        }
    }
    let totals = |heap: &BinaryHeap<Segment>| heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    let max_intervals = spec.max_subdivisions.max(heap.len());
    loop {
        let (value, error) = totals(&heap);
        if !value.is_finite() {
            return Err(NumericalError::NonFinite("integrand"));
        }
        if error <= spec.target(value) {
            return Ok(Integral {
                value,
                abs_error: error,
                intervals: heap.len(),
            });
        }
        let worst = match heap.peek() {
            Some(s) => *s,
            None => {
                return Ok(Integral {
                    value: 0.0,
                    abs_error: 0.0,
                    intervals: 0,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        let splittable = mid > worst.a && mid < worst.b;
        if heap.len() >= max_intervals || !splittable {
            return Err(NumericalError::Quadrature {
                value,
                abs_error: error,
                intervals: heap.len(),
            });
        }
        heap.pop();
        heap.push(gk15(f, worst.a, mid));
        heap.push(gk15(f, mid, worst.b));
    }
}

/// Breakpoints on `[a, b]` that shrink geometrically towards `a`, for
/// integrands with a singularity or a sharp peak at the lower endpoint.
pub fn graded_toward_lower(a: f64, b: f64, levels: u32) -> Vec<f64> {
    let mut pts: Vec<f64> = (1..=levels).rev().map(|k| a + (b - a) * 0.5f64.powi(k as i32)).collect();
    pts.insert(0, a);
    pts.push(b);
    pts.dedup();
    pts
}

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

/// Regularized lower incomplete gamma P(s, x).
pub fn regularized_lower_gamma(s: f64, x: f64) -> Result<f64, NumericalError> {
    if !(s > 0.0 && s.is_finite()) || !(x >= 0.0) {
        return Err(NumericalError::Domain(format!(
            "incomplete gamma needs s > 0, x >= 0 (got s = {s}, x = {x})"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    sg::checked_gamma_lr(s, x).map_err(|e| NumericalError::Domain(e.to_string()))
}

/// Lower incomplete gamma ϒ(s, x) = ∫₀ˣ t^{s−1} e^{−t} dt.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64, NumericalError> {
    Ok(regularized_lower_gamma(s, x)? * gamma(s))
}

/// Default truncation tolerance for [`sr_power_cdf`].
pub const SR_SERIES_TOL: f64 = 1e-12;

/// CDF of the squared Shadowed-Rician envelope,
/// `K^m Σ_z (m)_z δ^z / (z!)² · ϒ(z+1, t/(2b₀))` with
/// `K = 2b₀m/(2b₀m+Ω)` and `δ = Ω/(2b₀m+Ω)`.
///
/// The series stops once `z > m` and the remaining tail, bounded term by
/// term using `ϒ(z+1, ·) ≤ z!`, is below `trunc_tol`.
pub fn sr_power_cdf(t: f64, sr: &SrFading, trunc_tol: f64) -> Result<f64, NumericalError> {
    if !(t >= 0.0) {
        return Err(NumericalError::Domain(format!("SR CDF at t = {t}")));
    }
    if !(trunc_tol > 0.0) {
        return Err(NumericalError::Domain("truncation tolerance must be positive".into()));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (omega, b0, m) = (sr.omega, sr.b0, sr.m);
    let denom = 2.0 * b0 * m + omega;
    let ln_k = (2.0 * b0 * m / denom).ln();
    let delta = omega / denom;
    let y = t / (2.0 * b0);
    let ln_gamma_m = ln_gamma(m);
    let mut sum = 0.0;
    let mut z = 0u32;
    loop {
        let zf = z as f64;
        // Weight K^m (m)_z δ^z / z!; P(z+1, y) carries the remaining 1/z!.
        let ln_w = m * ln_k + ln_gamma(m + zf) - ln_gamma_m - ln_gamma(zf + 1.0) + zf * delta.ln();
        let w = ln_w.exp();
        sum += w * regularized_lower_gamma(zf + 1.0, y)?;
        if zf > m {
            // Weight ratio (m+z)δ/(z+1) is decreasing for m ≥ 1 and below δ
            // otherwise, so the tail is bounded by a geometric series.
            let ratio = if m >= 1.0 {
                (m + zf + 1.0) * delta / (zf + 2.0)
            } else {
                delta
            };
            let next = w * (m + zf) * delta / (zf + 1.0);
            if ratio < 1.0 && next / (1.0 - ratio) < trunc_tol {
                break;
            }
        }
        z += 1;
        if z > 100_000 {
            return Err(NumericalError::NonFinite("SR series did not terminate"));
        }
    }
    Ok(sum.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn constant_and_polynomial() {
        let r = integrate(|_| 1.0, 0.0, 1.0, &q()).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-14);
        let r = integrate(|x| x.powi(5), -1.0, 2.0, &q()).unwrap();
        assert_relative_eq!(r.value, (64.0 - 1.0) / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn nearest_point_pdf_has_unit_mass() {
        let lambda = 1.0;
        let r = integrate(
            |x| 2.0 * PI * lambda * x * (-lambda * PI * x * x).exp(),
            0.0,
            f64::INFINITY,
            &q(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let pts = graded_toward_lower(0.0, 1.0, 40);
        let r = integrate_with_breakpoints(|x: f64| 1.0 / x.sqrt(), &pts, &q()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-8);
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &q()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn reports_failure() {
        let spec = QuadratureSpec::new(1e-14, 1e-14, 3).unwrap();
        match integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &spec) {
            Err(NumericalError::Quadrature { intervals, .. }) => assert_eq!(intervals, 3),
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(QuadratureSpec::new(0.0, 1e-8, 10).is_err());
    }

    #[test]
    fn incomplete_gamma_basics() {
        assert_relative_eq!(lower_incomplete_gamma(1.0, 2f64.ln()).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(lower_incomplete_gamma(2.5, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            lower_incomplete_gamma(2.5, f64::INFINITY).unwrap(),
            gamma(2.5),
            max_relative = 1e-14
        );
        assert!(lower_incomplete_gamma(0.0, 1.0).is_err());
        assert!(lower_incomplete_gamma(1.0, -1.0).is_err());
    }

    #[test]
    fn sr_cdf_limits() {
        let sr = SrFading::new(1.29, 0.158, 19.4);
        assert_eq!(sr_power_cdf(0.0, &sr, SR_SERIES_TOL).unwrap(), 0.0);
        assert_relative_eq!(sr_power_cdf(1e3, &sr, SR_SERIES_TOL).unwrap(), 1.0, epsilon = 1e-12);
        let mut prev = 0.0;
        for k in 1..=100 {
            let v = sr_power_cdf(k as f64 * 0.1, &sr, SR_SERIES_TOL).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }
}
