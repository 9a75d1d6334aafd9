//! Closed-form mutual-information upper bounds, Fano's inequality and the
//! sample-count thresholds obtained by inverting it. All logs are natural.

use std::f64::consts::LN_2;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::ensembles::Signal;
use crate::error::{rejected, Result};
use crate::graph_model::binomial;

/// Which mutual-information bound applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "setting", rename_all = "snake_case")]
pub enum MiSetting {
    /// Gaussian design, Gaussian noise, two-level ensemble.
    StdNoisy { s: usize, d: usize, k1: f64, k2: f64 },
    /// Bernoulli design, no noise, `±1` ensemble.
    StdNoiseless { s: usize },
    /// Sign measurements, with or without noise.
    OneBit,
}

impl MiSetting {
    /// Bound per sample; every bound here is linear in `n`.
    pub fn per_sample(&self) -> Result<f64> {
        match *self {
            MiSetting::StdNoisy { s, d, k1, k2 } => mi_bound_std_noisy(1.0, s, d, k1, k2),
            MiSetting::StdNoiseless { s } => mi_bound_std_noiseless(1.0, s),
            MiSetting::OneBit => Ok(mi_bound_onebit(1.0)),
        }
    }

    pub fn at(&self, n: f64) -> Result<f64> {
        Ok(n * self.per_sample()?)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MiSetting::StdNoisy { .. } => "std_noisy",
            MiSetting::StdNoiseless { .. } => "std_noiseless",
            MiSetting::OneBit => "onebit",
        }
    }
}

/// `(n/2) ln(1 + (s/2)k1² + (s/2)k2² - (s²/d)(k1²/4 + k2²/4 + k1k2/2))`.
pub fn mi_bound_std_noisy(n: f64, s: usize, d: usize, k1: f64, k2: f64) -> Result<f64> {
    let (sf, df) = (s as f64, d as f64);
    if d == 0 || s > d {
        return Err(rejected(format!("need s <= d, got s = {s}, d = {d}")));
    }
    let arg = 1.0 + sf / 2.0 * (k1 * k1 + k2 * k2) - sf * sf / df * (k1 * k1 / 4.0 + k2 * k2 / 4.0 + k1 * k2 / 2.0);
    if !(arg > 0.0) {
        return Err(rejected(format!("log argument {arg} is not positive")));
    }
    Ok(n / 2.0 * arg.ln())
}

/// `n ln(e³s³/27) = 3n ln(es/3)`.
pub fn mi_bound_std_noiseless(n: f64, s: usize) -> Result<f64> {
    if s < 2 {
        return Err(rejected(format!("noiseless bound needs s >= 2, got {s}")));
    }
    Ok(3.0 * n * (std::f64::consts::E * s as f64 / 3.0).ln())
}

/// Number of `(α, β, γ, τ) ≥ 0` with `α+β+γ+τ = s`: `C(s+3, 3)`.
pub fn count_noiseless_outputs(s: usize) -> u128 {
    binomial(s as u64 + 3, 3)
}

/// `2n ln 2`.
pub fn mi_bound_onebit(n: f64) -> f64 {
    2.0 * n * LN_2
}

/// Per-sample KL of a `Bernoulli(p)` sign against a fair coin,
/// `p ln 2p + (1-p) ln 2(1-p)`.
pub fn onebit_sample_kl(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { q * (2.0 * q).ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// `max(0, 1 - (I + ln 2) / ln|F|)`.
pub fn fano_lower_bound(mi_upper: f64, log_card: f64) -> Result<f64> {
    if !(log_card > 0.0) {
        return Err(rejected(format!("log cardinality {log_card} must be positive")));
    }
    if !(mi_upper >= 0.0) {
        return Err(rejected(format!("mutual information {mi_upper} must be non-negative")));
    }
    Ok((1.0 - (mi_upper + LN_2) / log_card).max(0.0))
}

/// `1 - exp(-ε² n / 4)`, the lower bound on `P(‖e‖² ≤ σ² n / (1-ε))`.
pub fn noise_concentration_bound(n: f64, eps: f64) -> f64 {
    1.0 - (-eps * eps * n / 4.0).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Threshold {
    /// Largest real `n` at which the Fano bound still reaches 1/2.
    pub n: f64,
    /// `n < 1`: no integer sample count is covered.
    pub vacuous: bool,
}

/// Solves `fano_lower_bound(mi(n), log_card) = 1/2` for `n`.
pub fn sample_threshold(setting: &MiSetting, log_card: f64) -> Result<Threshold> {
    if !(log_card > 0.0) {
        return Err(rejected(format!("log cardinality {log_card} must be positive")));
    }
    let slope = setting.per_sample()?;
    let budget = log_card / 2.0 - LN_2;
    let n = if slope > 0.0 {
        budget / slope
    } else if budget >= 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    Ok(Threshold { n, vacuous: n < 1.0 })
}

/// Analytic summary for one setting at one sample count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub setting: String,
    pub n: f64,
    pub log_card: f64,
    pub mi: f64,
    pub fano: f64,
    pub threshold_n: f64,
    pub vacuous: bool,
}

impl BoundReport {
    pub fn new(setting: &MiSetting, n: f64, log_card: f64) -> Result<Self> {
        let mi = setting.at(n)?;
        let threshold = sample_threshold(setting, log_card)?;
        Ok(Self {
            setting: setting.name().to_string(),
            n,
            log_card,
            mi,
            fano: fano_lower_bound(mi, log_card)?,
            threshold_n: threshold.n,
            vacuous: threshold.vacuous,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_value(self).expect("report serialises").to_string()
    }
}

/// Joint covariance of one row `(X_i, y_i)` given `β` under an `N(0, 1/n)`
/// design and `N(0, σ²)` noise.
pub fn joint_covariance(beta: &[f64], n: usize, sigma: f64) -> DMatrix<f64> {
    let d = beta.len();
    let nf = n as f64;
    let mut m = DMatrix::zeros(d + 1, d + 1);
    for j in 0..d {
        m[(j, j)] = 1.0 / nf;
        m[(j, d)] = beta[j] / nf;
        m[(d, j)] = beta[j] / nf;
    }
    m[(d, d)] = beta.iter().map(|b| b * b).sum::<f64>() / nf + sigma * sigma;
    m
}

/// Mean of the joint covariances over a uniform prior on `members`.
pub fn averaged_covariance(members: &[Signal], n: usize, sigma: f64) -> DMatrix<f64> {
    let d = members[0].dim();
    let mut acc = DMatrix::zeros(d + 1, d + 1);
    for m in members {
        acc += joint_covariance(m.values(), n, sigma);
    }
    acc / members.len() as f64
}

/// `det` of the averaged covariance from its block structure:
/// `(σ² + mean‖β‖²/n - Σ β̄ᵢ²/n) / nᵈ`.
pub fn averaged_covariance_det(members: &[Signal], n: usize, sigma: f64) -> f64 {
    let d = members[0].dim();
    let count = members.len() as f64;
    let nf = n as f64;
    let mean_norm = members.iter().map(Signal::norm_sq).sum::<f64>() / count;
    let centre: f64 = (0..d)
        .map(|i| {
            let avg = members.iter().map(|m| m.values()[i]).sum::<f64>() / count;
            avg * avg
        })
        .sum();
    (sigma * sigma + mean_norm / nf - centre / nf) / nf.powi(d as i32)
}

/// MI upper bound through the optimal Gaussian reference:
/// `(n/2) [ln det Σ̄ - ln(σ²/nᵈ)]`, with `det Σ̄` from LU.
pub fn mi_via_averaged_covariance(members: &[Signal], n: usize, sigma: f64) -> f64 {
    let d = members[0].dim();
    let nf = n as f64;
    let det = averaged_covariance(members, n, sigma).determinant();
    nf / 2.0 * (det.ln() - (sigma * sigma / nf.powi(d as i32)).ln())
}
