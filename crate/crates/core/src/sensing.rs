//! Random designs and the linear / one-bit measurement channels.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ensembles::Signal;
use crate::error::{rejected, Result};
use crate::stats::mean_and_se;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    /// i.i.d. `N(0, 1/n)` entries.
    Gaussian,
    /// i.i.d. `±1/√n` entries with equal probability.
    Bernoulli,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    kind: DesignKind,
    matrix: DMatrix<f64>,
}

impl DesignMatrix {
    /// Wraps an explicit matrix, e.g. to pin a design in tests.
    pub fn from_matrix(kind: DesignKind, matrix: DMatrix<f64>) -> Self {
        Self { kind, matrix }
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `X β`.
    pub fn apply(&self, beta: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(beta)).data.into()
    }

    /// `Xᵀ r`.
    pub fn apply_transpose(&self, r: &[f64]) -> Vec<f64> {
        (self.matrix.tr_mul(&DVector::from_column_slice(r))).data.into()
    }
}

/// Draws an `n x d` design. Entries are generated row by row.
pub fn make_design<R: Rng + ?Sized>(kind: DesignKind, n: usize, d: usize, rng: &mut R) -> DesignMatrix {
    assert!(n >= 1 && d >= 1, "design dimensions must be positive");
    let scale = 1.0 / (n as f64).sqrt();
    let entries: Vec<f64> = match kind {
        DesignKind::Gaussian => (0..n * d)
            .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect(),
        DesignKind::Bernoulli => (0..n * d)
            .map(|_| if rng.random::<bool>() { scale } else { -scale })
            .collect(),
    };
    DesignMatrix {
        kind,
        matrix: DMatrix::from_row_slice(n, d, &entries),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Linear,
    OneBit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    pub y: Vec<f64>,
    /// The realised noise `e`; the error predicates compare against `‖e‖`.
    pub noise: Vec<f64>,
    pub sigma: f64,
    pub channel: Channel,
}

/// `sign` with `sign(0) = +1`.
pub fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `y = Xβ + e` or `y = sign(Xβ + e)` with `e ~ N(0, σ² I)`. No randomness is
/// consumed when `σ = 0`.
pub fn measure<R: Rng + ?Sized>(
    x: &DesignMatrix,
    beta: &Signal,
    sigma: f64,
    channel: Channel,
    rng: &mut R,
) -> Result<MeasurementSet> {
    if x.cols() != beta.dim() {
        return Err(rejected(format!("design has {} columns, signal has dimension {}", x.cols(), beta.dim())));
    }
    if !(sigma >= 0.0) {
        return Err(rejected(format!("sigma = {sigma} must be non-negative")));
    }
    let clean = x.apply(beta.values());
    let noise: Vec<f64> = if sigma == 0.0 {
        vec![0.0; clean.len()]
    } else {
        let dist = Normal::new(0.0, sigma).map_err(|e| rejected(e.to_string()))?;
        (0..clean.len()).map(|_| dist.sample(rng)).collect()
    };
    let y = clean
        .iter()
        .zip(&noise)
        .map(|(c, e)| match channel {
            Channel::Linear => c + e,
            Channel::OneBit => sign(c + e),
        })
        .collect();
    Ok(MeasurementSet { y, noise, sigma, channel })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RipEstimate {
    pub mean: f64,
    pub se: f64,
    pub target: f64,
}

/// Monte Carlo estimate of `E‖Xβ‖²` over fresh designs; the target is `‖β‖²`.
pub fn rip_expectation_check<R: Rng + ?Sized>(
    kind: DesignKind,
    beta: &[f64],
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<RipEstimate> {
    if trials < 100 {
        return Err(rejected(format!("need at least 100 trials, got {trials}")));
    }
    let draws: Vec<f64> = (0..trials)
        .map(|_| {
            let x = make_design(kind, n, beta.len(), rng);
            x.apply(beta).iter().map(|v| v * v).sum()
        })
        .collect();
    let (mean, se) = mean_and_se(&draws);
    Ok(RipEstimate {
        mean,
        se,
        target: beta.iter().map(|v| v * v).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bernoulli_entries() {
        let x = make_design(DesignKind::Bernoulli, 2, 3, &mut ChaCha8Rng::seed_from_u64(3));
        let v = 1.0 / 2f64.sqrt();
        assert!(x.matrix().iter().all(|&e| e == v || e == -v));
        assert_eq!((x.rows(), x.cols()), (2, 3));
    }

    #[test]
    fn designs_are_reproducible() {
        for kind in [DesignKind::Gaussian, DesignKind::Bernoulli] {
            let a = make_design(kind, 5, 7, &mut ChaCha8Rng::seed_from_u64(11));
            let b = make_design(kind, 5, 7, &mut ChaCha8Rng::seed_from_u64(11));
            let bytes = |m: &DesignMatrix| m.matrix().iter().flat_map(|v| v.to_le_bytes()).collect::<Vec<_>>();
            assert_eq!(bytes(&a), bytes(&b));
        }
    }

    #[test]
    fn gaussian_moments() {
        let n = 4;
        let x = make_design(DesignKind::Gaussian, n, 2_500, &mut ChaCha8Rng::seed_from_u64(5));
        let entries: Vec<f64> = x.matrix().iter().copied().collect();
        let m = entries.len() as f64;
        let mean = entries.iter().sum::<f64>() / m;
        let var = entries.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let target = 1.0 / n as f64;
        assert!(mean.abs() <= 5.0 * (target / m).sqrt(), "mean {mean}");
        // Var of the sample variance of normals is 2 σ⁴ / (m - 1)
        assert!((var - target).abs() <= 5.0 * (2.0 * target * target / (m - 1.0)).sqrt(), "var {var}");
    }

    #[test]
    fn noiseless_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let zero = Signal::zeros(3);
        let x = make_design(DesignKind::Gaussian, 4, 3, &mut rng);
        let m = measure(&x, &zero, 0.0, Channel::Linear, &mut rng).unwrap();
        assert!(m.y.iter().all(|&v| v == 0.0));

        let pinned = DesignMatrix::from_matrix(DesignKind::Gaussian, DMatrix::from_row_slice(2, 1, &[0.3, -1.2]));
        let one = Signal::from_values(vec![1.0]);
        let m = measure(&pinned, &one, 0.0, Channel::OneBit, &mut rng).unwrap();
        assert_eq!(m.y, vec![1.0, -1.0]);
        let m = measure(&pinned, &Signal::zeros(1), 0.0, Channel::OneBit, &mut rng).unwrap();
        assert_eq!(m.y, vec![1.0, 1.0]);
    }

    #[test]
    fn linear_noise_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 100_000;
        let pinned = DesignMatrix::from_matrix(DesignKind::Gaussian, DMatrix::from_element(n, 1, 0.5));
        let beta = Signal::from_values(vec![2.0]);
        let m = measure(&pinned, &beta, 1.0, Channel::Linear, &mut rng).unwrap();
        let resid: Vec<f64> = m.y.iter().map(|y| y - 1.0).collect();
        let mean = resid.iter().sum::<f64>() / n as f64;
        let var = resid.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((var - 1.0).abs() <= 5.0 * (2.0 / (n as f64 - 1.0)).sqrt(), "var {var}");
        assert_eq!(m.noise.len(), n);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = make_design(DesignKind::Gaussian, 2, 3, &mut rng);
        assert!(measure(&x, &Signal::zeros(4), 0.0, Channel::Linear, &mut rng).is_err());
        assert!(measure(&x, &Signal::zeros(3), -1.0, Channel::Linear, &mut rng).is_err());
    }

    #[test]
    fn rip_zero_and_unit_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let zero = rip_expectation_check(DesignKind::Gaussian, &[0.0; 5], 3, 200, &mut rng).unwrap();
        assert_eq!(zero.mean, 0.0);
        let mut e3 = vec![0.0; 5];
        e3[2] = 1.0;
        let unit = rip_expectation_check(DesignKind::Bernoulli, &e3, 7, 200, &mut rng).unwrap();
        assert!((unit.mean - 1.0).abs() < 1e-12 && unit.se < 1e-12);
        assert!(rip_expectation_check(DesignKind::Bernoulli, &e3, 7, 99, &mut rng).is_err());
    }

    #[test]
    fn rip_expectation_gaussian() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let beta = [0.5, -1.0, 0.0, 2.0];
        let est = rip_expectation_check(DesignKind::Gaussian, &beta, 6, 10_000, &mut rng).unwrap();
        assert!((est.mean - est.target).abs() <= 4.0 * est.se, "{est:?}");
    }

    #[test]
    fn distinct_columns_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for kind in [DesignKind::Gaussian, DesignKind::Bernoulli] {
            let draws = 20_000;
            let n = 3;
            let prods: Vec<f64> = (0..draws)
                .map(|_| {
                    let x = make_design(kind, n, 2, &mut rng);
                    x.matrix()[(0, 0)] * x.matrix()[(0, 1)]
                })
                .collect();
            let (mean, se) = mean_and_se(&prods);
            assert!(mean.abs() <= 5.0 * se, "{kind:?}: {mean} vs {se}");
        }
    }
}
