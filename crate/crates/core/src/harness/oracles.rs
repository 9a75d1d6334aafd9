//! Exact mutual information for tiny instances, used as oracles for the
//! closed-form bounds.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::ensembles::{Ensemble, Signal};
use crate::error::{rejected, Error, Result};
use crate::sensing::{make_design, sign, DesignKind, DesignMatrix};
use crate::stats::log_normal_cdf;

pub const MAX_ORACLE_MEMBERS: usize = 1_000;
pub const MAX_ONEBIT_SAMPLES: usize = 10;
/// Largest `n·d` for which every Bernoulli design is enumerated.
pub const MAX_EXACT_DESIGN_BITS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MiEstimate {
    /// Nats.
    pub value: f64,
    /// Whether the design expectation was computed exactly.
    pub exact: bool,
    pub designs: u64,
}

fn check_members(members: &[Signal]) -> Result<usize> {
    if members.len() > MAX_ORACLE_MEMBERS {
        return Err(Error::TooLarge {
            what: "ensemble",
            count: members.len() as u128,
            cap: MAX_ORACLE_MEMBERS as u128,
        });
    }
    let d = members.first().ok_or_else(|| rejected("empty ensemble"))?.dim();
    if members.iter().any(|m| m.dim() != d) {
        return Err(rejected("members differ in dimension"));
    }
    Ok(d)
}

/// `H(y | X)` for deterministic outputs `key(β)` under a uniform prior.
fn entropy_of_keys<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>, total: usize) -> f64 {
    let mut counts: HashMap<K, usize> = HashMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    if counts.len() == 1 {
        return 0.0;
    }
    let t = total as f64;
    counts.values().map(|&c| -(c as f64 / t) * (c as f64 / t).ln()).sum()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `I(β*; y | X)` for one fixed design under the sign channel.
fn onebit_mi_given_design(products: &[Vec<f64>], n: usize, sigma: f64) -> f64 {
    let count = products.len();
    if sigma == 0.0 {
        return entropy_of_keys(
            products.iter().map(|xb| xb.iter().map(|v| sign(*v) > 0.0).collect::<Vec<bool>>()),
            count,
        );
    }
    // KL form: Σ_β (1/|F|) Σ_y p(y|β) [ln p(y|β) - ln p(y)]
    let ln_count = (count as f64).ln();
    let mut total = 0.0;
    let mut loglik = vec![0.0; count];
    for pattern in 0..(1u32 << n) {
        for (m, xb) in products.iter().enumerate() {
            loglik[m] = xb
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let y = if pattern >> i & 1 == 1 { 1.0 } else { -1.0 };
                    log_normal_cdf(y * v / sigma)
                })
                .sum();
        }
        let log_marginal = log_sum_exp(&loglik) - ln_count;
        for &l in &loglik {
            if l > f64::NEG_INFINITY {
                total += l.exp() * (l - log_marginal);
            }
        }
    }
    (total / count as f64).max(0.0)
}

/// `I(β*; (X, y))` under sign measurements with a Gaussian design, averaged
/// over `x_samples` designs; the inner MI is exact.
pub fn empirical_mi_onebit<R: Rng + ?Sized>(
    ens: &Ensemble,
    n: usize,
    sigma: f64,
    x_samples: usize,
    rng: &mut R,
) -> Result<MiEstimate> {
    onebit_mi_for_members(&small_members(ens)?, n, sigma, x_samples, rng)
}

fn small_members(ens: &Ensemble) -> Result<Vec<Signal>> {
    if ens.len() > MAX_ORACLE_MEMBERS {
        return Err(Error::TooLarge {
            what: "ensemble",
            count: ens.len() as u128,
            cap: MAX_ORACLE_MEMBERS as u128,
        });
    }
    Ok(ens.members().collect())
}

/// As [`empirical_mi_onebit`] for an explicit uniform prior over `members`.
pub fn onebit_mi_for_members<R: Rng + ?Sized>(
    members: &[Signal],
    n: usize,
    sigma: f64,
    x_samples: usize,
    rng: &mut R,
) -> Result<MiEstimate> {
    let d = check_members(members)?;
    if n > MAX_ONEBIT_SAMPLES {
        return Err(Error::TooLarge {
            what: "one-bit output alphabet",
            count: 1u128 << n.min(127),
            cap: 1u128 << MAX_ONEBIT_SAMPLES,
        });
    }
    if !(sigma >= 0.0) || x_samples == 0 {
        return Err(rejected("sigma must be non-negative and x_samples positive"));
    }
    if n == 0 {
        return Ok(MiEstimate {
            value: 0.0,
            exact: true,
            designs: 0,
        });
    }
    let mut acc = 0.0;
    for _ in 0..x_samples {
        let x = make_design(DesignKind::Gaussian, n, d, rng);
        let products: Vec<Vec<f64>> = members.iter().map(|m| x.apply(m.values())).collect();
        acc += onebit_mi_given_design(&products, n, sigma);
    }
    Ok(MiEstimate {
        value: acc / x_samples as f64,
        exact: false,
        designs: x_samples as u64,
    })
}

fn linear_output_key(y: &[f64]) -> Vec<i64> {
    y.iter().map(|v| (v * 1e9).round() as i64).collect()
}

/// `I(β*; (X, y)) = E_X H(y | X)` for noiseless linear measurements with a
/// Bernoulli design. Every `±1/√n` matrix is enumerated when
/// `n·d ≤ MAX_EXACT_DESIGN_BITS`; otherwise `x_samples` designs are drawn.
pub fn empirical_mi_noiseless_std<R: Rng + ?Sized>(
    ens: &Ensemble,
    n: usize,
    x_samples: usize,
    rng: &mut R,
) -> Result<MiEstimate> {
    noiseless_mi_for_members(&small_members(ens)?, n, x_samples, rng)
}

/// As [`empirical_mi_noiseless_std`] for an explicit uniform prior.
pub fn noiseless_mi_for_members<R: Rng + ?Sized>(
    members: &[Signal],
    n: usize,
    x_samples: usize,
    rng: &mut R,
) -> Result<MiEstimate> {
    let d = check_members(members)?;
    if n == 0 {
        return Ok(MiEstimate {
            value: 0.0,
            exact: true,
            designs: 0,
        });
    }
    let given = |x: &DesignMatrix| {
        entropy_of_keys(members.iter().map(|m| linear_output_key(&x.apply(m.values()))), members.len())
    };
    if n * d <= MAX_EXACT_DESIGN_BITS {
        let bits = n * d;
        let scale = 1.0 / (n as f64).sqrt();
        let total = 1u64 << bits;
        let mut acc = 0.0;
        for code in 0..total {
            let x = DMatrix::from_fn(n, d, |i, j| if code >> (i * d + j) & 1 == 1 { scale } else { -scale });
            acc += given(&DesignMatrix::from_matrix(DesignKind::Bernoulli, x));
        }
        return Ok(MiEstimate {
            value: acc / total as f64,
            exact: true,
            designs: total,
        });
    }
    if x_samples == 0 {
        return Err(Error::TooLarge {
            what: "Bernoulli design space",
            count: 1u128 << (n * d).min(127),
            cap: 1u128 << MAX_EXACT_DESIGN_BITS,
        });
    }
    let mut acc = 0.0;
    for _ in 0..x_samples {
        acc += given(&make_design(DesignKind::Bernoulli, n, d, rng));
    }
    Ok(MiEstimate {
        value: acc / x_samples as f64,
        exact: false,
        designs: x_samples as u64,
    })
}
