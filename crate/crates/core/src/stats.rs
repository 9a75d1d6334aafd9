//! Small statistics helpers: Wilson intervals, normal CDF, sample moments.

use serde::Serialize;
use libm::erfc;

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WilsonInterval {
    pub lo: f64,
    pub hi: f64,
}

impl WilsonInterval {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> WilsonInterval {
    if trials == 0 {
        return WilsonInterval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = p + z2 / (2.0 * n);
    let rad = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    WilsonInterval {
        lo: ((centre - rad) / denom).clamp(0.0, p),
        hi: ((centre + rad) / denom).clamp(p, 1.0),
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `ln Φ(z)`, finite far into the lower tail.
pub fn log_normal_cdf(z: f64) -> f64 {
    if z > -30.0 {
        normal_cdf(z).ln()
    } else {
        // Mills-ratio asymptotic: Φ(z) ~ φ(z)/|z| (1 - 1/z² + 3/z⁴)
        let z2 = z * z;
        -0.5 * z2 - (-z).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + (1.0 - 1.0 / z2 + 3.0 / (z2 * z2)).ln()
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wilson_brackets_rate() {
        for (k, n) in [(0, 100), (5, 100), (50, 100), (100, 100), (1, 4000)] {
            let w = wilson_interval(k, n, Z95);
            let p = k as f64 / n as f64;
            assert!(w.lo <= p && p <= w.hi, "{k}/{n}: {w:?}");
            assert!(w.lo >= 0.0 && w.hi <= 1.0);
        }
    }

    #[test]
    fn wilson_known_value() {
        // 50/100 at z = 1.96: centre 0.5, radius ~0.0958
        let w = wilson_interval(50, 100, Z95);
        assert_relative_eq!(w.lo, 0.403_831_530_365_995_7, max_relative = 1e-9);
        assert_relative_eq!(w.hi, 0.596_168_469_634_004_4, max_relative = 1e-9);
    }

    #[test]
    fn normal_cdf_values() {
        assert_relative_eq!(normal_cdf(0.0), 0.5);
        assert_relative_eq!(normal_cdf(1.959_963_984_540_054), 0.975, max_relative = 1e-12);
        assert_relative_eq!(log_normal_cdf(-2.0), normal_cdf(-2.0).ln(), max_relative = 1e-14);
        // both branches agree near the switch
        let near = normal_cdf(-29.9).ln();
        assert_relative_eq!(log_normal_cdf(-29.9), near, max_relative = 1e-12);
        assert!(log_normal_cdf(-50.0).is_finite());
        assert!(log_normal_cdf(-30.1) < log_normal_cdf(-29.9));
    }

    #[test]
    fn moments() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_relative_eq!(m, 2.5);
        assert_relative_eq!(se, (5.0f64 / 3.0 / 4.0).sqrt());
    }
}
