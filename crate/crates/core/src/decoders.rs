//! Exhaustive maximum-likelihood decoders over an ensemble, projection onto a
//! support model and model-based iterative hard thresholding.
//!
//! Ties are resolved by taking the first member (or support) in canonical
//! order among those within `TIE_RTOL * (1 + |best|)` of the best score.

use serde::{Deserialize, Serialize};

use crate::ensembles::{Ensemble, Signal};
use crate::error::{Error, Result};
use crate::graph_model::{Support, SupportModel};
use crate::sensing::DesignMatrix;
use crate::stats::log_normal_cdf;

pub const TIE_RTOL: f64 = 1e-9;

/// Growth factor of `‖β‖` over `‖y‖` treated as divergence in IHT.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// Canonical index of the chosen member.
    pub index: usize,
    pub estimate: Signal,
    /// Objective at the chosen member: residual norm for linear decoding,
    /// agreement count or log-likelihood for one-bit decoding.
    pub score: f64,
    /// Members that tied with the winner, the winner included.
    pub ties: usize,
}

/// Objective for one-bit decoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneBitRule {
    /// Agreement count when `σ = 0`, Gaussian log-likelihood otherwise.
    Auto,
    /// Number of `i` with `sign((Xβ)_i) = y_i`, regardless of `σ`.
    Agreement,
}

/// First index within tolerance of the maximum, and the tie count.
fn pick_max(scores: &[f64]) -> (usize, usize) {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_RTOL * (1.0 + best.abs());
    let mut first = None;
    let mut ties = 0;
    for (i, &sc) in scores.iter().enumerate() {
        if sc >= best - tol || (best == f64::NEG_INFINITY && sc == best) {
            first.get_or_insert(i);
            ties += 1;
        }
    }
    (first.expect("non-empty score list"), ties)
}

fn check_dims(x: &DesignMatrix, y: &[f64], ensemble: &Ensemble) -> Result<()> {
    if x.rows() != y.len() || x.cols() != ensemble.d() {
        return Err(crate::error::rejected(format!(
            "design is {}x{}, y has length {}, ensemble dimension {}",
            x.rows(),
            x.cols(),
            y.len(),
            ensemble.d()
        )));
    }
    if ensemble.is_empty() {
        return Err(crate::error::rejected("empty ensemble"));
    }
    Ok(())
}

/// `argmin ‖y - Xβ‖` over the ensemble.
pub fn ml_decode_linear(x: &DesignMatrix, y: &[f64], ensemble: &Ensemble) -> Result<DecodeResult> {
    check_dims(x, y, ensemble)?;
    let scores: Vec<f64> = ensemble
        .members()
        .map(|m| {
            let r: f64 = x.apply(m.values()).iter().zip(y).map(|(a, b)| (b - a) * (b - a)).sum();
            -r.sqrt()
        })
        .collect();
    let (index, ties) = pick_max(&scores);
    Ok(DecodeResult {
        index,
        estimate: ensemble.member(index),
        score: -scores[index],
        ties,
    })
}

/// `Σ_i ln Φ(y_i (Xβ)_i / σ)`.
pub fn onebit_log_likelihood(xb: &[f64], y: &[f64], sigma: f64) -> f64 {
    xb.iter().zip(y).map(|(a, b)| log_normal_cdf(b * a / sigma)).sum()
}

/// Number of coordinates with `sign((Xβ)_i) = y_i`.
pub fn onebit_agreements(xb: &[f64], y: &[f64]) -> usize {
    xb.iter().zip(y).filter(|(a, b)| crate::sensing::sign(**a) == **b).count()
}

/// Maximum-likelihood decoding from sign measurements.
pub fn ml_decode_onebit(
    x: &DesignMatrix,
    y: &[f64],
    ensemble: &Ensemble,
    sigma: f64,
    rule: OneBitRule,
) -> Result<DecodeResult> {
    check_dims(x, y, ensemble)?;
    if !(sigma >= 0.0) {
        return Err(crate::error::rejected(format!("sigma = {sigma} must be non-negative")));
    }
    let agreement = sigma == 0.0 || rule == OneBitRule::Agreement;
    let scores: Vec<f64> = ensemble
        .members()
        .map(|m| {
            let xb = x.apply(m.values());
            if agreement {
                onebit_agreements(&xb, y) as f64
            } else {
                onebit_log_likelihood(&xb, y, sigma)
            }
        })
        .collect();
    let (index, ties) = pick_max(&scores);
    Ok(DecodeResult {
        index,
        estimate: ensemble.member(index),
        score: scores[index],
        ties,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub support: Support,
    /// `v` restricted to `support`, zero elsewhere.
    pub values: Vec<f64>,
}

/// Projection onto the model: the support maximising `‖v_S‖²`.
pub fn model_project(v: &[f64], model: &SupportModel) -> Result<Projection> {
    if v.len() != model.d() {
        return Err(crate::error::rejected(format!(
            "vector has length {}, model dimension {}",
            v.len(),
            model.d()
        )));
    }
    let supports = model.supports()?;
    if supports.is_empty() {
        return Err(crate::error::rejected("model has no supports"));
    }
    let energies: Vec<f64> = supports
        .iter()
        .map(|s| s.indices().iter().map(|&i| v[i - 1] * v[i - 1]).sum())
        .collect();
    let (best, _) = pick_max(&energies);
    let support = supports[best].clone();
    let mut values = vec![0.0; v.len()];
    for &i in support.indices() {
        values[i - 1] = v[i - 1];
    }
    Ok(Projection { support, values })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IhtResult {
    pub estimate: Vec<f64>,
    pub support: Support,
    pub iterations: usize,
}

/// `β ← P(β + step · Xᵀ(y - Xβ))` from `β = 0`.
pub fn model_iht(
    x: &DesignMatrix,
    y: &[f64],
    model: &SupportModel,
    iterations: usize,
    step: f64,
) -> Result<IhtResult> {
    if x.rows() != y.len() || x.cols() != model.d() {
        return Err(crate::error::rejected("design, measurements and model disagree in size"));
    }
    if !(step > 0.0) || iterations == 0 {
        return Err(crate::error::rejected("step and iteration count must be positive"));
    }
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut beta = vec![0.0; model.d()];
    let mut support = None;
    for it in 1..=iterations {
        let xb = x.apply(&beta);
        let resid: Vec<f64> = y.iter().zip(&xb).map(|(a, b)| a - b).collect();
        let grad = x.apply_transpose(&resid);
        let proxy: Vec<f64> = beta.iter().zip(&grad).map(|(b, g)| b + step * g).collect();
        let p = model_project(&proxy, model)?;
        let norm = p.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > DIVERGENCE_FACTOR * y_norm {
            return Err(Error::Divergence { iteration: it, norm });
        }
        beta = p.values;
        support = Some(p.support);
    }
    Ok(IhtResult {
        estimate: beta,
        support: support.expect("at least one iteration"),
        iterations,
    })
}
