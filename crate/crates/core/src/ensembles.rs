//! Restricted signal ensembles over a support model.
//!
//! * `F1` – every support coordinate takes one of two positive levels
//!   `v1 = k1 σ√n`, `v2 = k2 σ√n`; used for noisy linear measurements.
//! * `F2` – every support coordinate is `±1`; noiseless linear measurements.
//! * `F3` – half of the support sits at `-ε`, the other half at `√(2/s) + ε`;
//!   one-bit measurements.
//!
//! Members are indexed `support_index * patterns + pattern_index`, which is
//! the canonical order used for tie-breaking everywhere else.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{rejected, Error, Result};
use crate::graph_model::{binomial, Support, SupportModel};

/// `ε = √(-4 ln 0.8)`: the noise-concentration bound equals 0.2 at `n = 1`.
pub const DEFAULT_F1_EPS: f64 = 0.9448;
pub const DEFAULT_C0: f64 = 1.0;

const BRUTE_FORCE_MEMBERS: usize = 1_000;
const MAX_SUPPORT_PAIRS: u128 = 100_000_000;
const MAX_PATTERN_BITS: usize = 20;

/// Dense signal with its support (the non-zero coordinates, 1-based).
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
    support: Support,
}

impl Signal {
    pub fn from_values(values: Vec<f64>) -> Self {
        let idx = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i + 1)
            .collect();
        Self {
            values,
            support: Support::from_sorted(idx),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self::from_values(vec![0.0; d])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(&self, other: &Signal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    F1 { n: usize, sigma: f64, c0: f64, eps: f64 },
    F2,
    F3 { eps: f64 },
}

#[derive(Clone, Debug)]
pub struct EnsembleSpec {
    pub family: Family,
    pub model: SupportModel,
}

/// Level multipliers and separation of the `F1` ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecoveryConstants {
    pub k1: f64,
    pub k2: f64,
    pub v1: f64,
    pub v2: f64,
    /// `C0 σ √n / √(1-ε)`, the distance between the two levels.
    pub sep: f64,
}

impl RecoveryConstants {
    pub fn new(c0: f64, eps: f64, sigma: f64, n: usize) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(rejected(format!("eps = {eps} must lie in (0, 1)")));
        }
        if !(c0 > 0.0 && sigma > 0.0) || n == 0 {
            return Err(rejected("C0, sigma and n must be positive"));
        }
        let k1 = c0 / (2.0 * (1.0 - eps)).sqrt();
        let k2 = c0 * (1.0 / (2.0 * (1.0 - eps)).sqrt() + 1.0 / (1.0 - eps).sqrt());
        let scale = sigma * (n as f64).sqrt();
        Ok(Self {
            k1,
            k2,
            v1: k1 * scale,
            v2: k2 * scale,
            sep: c0 * scale / (1.0 - eps).sqrt(),
        })
    }
}

/// Finite signal family: enumerated supports times per-support value patterns.
#[derive(Clone, Debug)]
pub struct Ensemble {
    family: Family,
    model: SupportModel,
    supports: Vec<Support>,
    patterns: Vec<Vec<f64>>,
}

impl Ensemble {
    pub fn build(spec: EnsembleSpec) -> Result<Self> {
        let s = spec.model.s();
        if s > MAX_PATTERN_BITS {
            return Err(Error::TooLarge {
                what: "value patterns",
                count: 1u128 << s.min(127),
                cap: 1 << MAX_PATTERN_BITS,
            });
        }
        let patterns: Vec<Vec<f64>> = match spec.family {
            Family::F1 { n, sigma, c0, eps } => {
                let rc = RecoveryConstants::new(c0, eps, sigma, n)?;
                bit_patterns(s, rc.v1, rc.v2)
            }
            Family::F2 => bit_patterns(s, -1.0, 1.0),
            Family::F3 { eps } => {
                if s % 2 != 0 {
                    return Err(rejected(format!("F3 needs even sparsity, got s = {s}")));
                }
                if !(eps > 0.0) {
                    return Err(rejected(format!("F3 needs eps > 0, got {eps}")));
                }
                let high = (2.0 / s as f64).sqrt() + eps;
                (0..s)
                    .combinations(s / 2)
                    .map(|low| {
                        let mut p = vec![high; s];
                        for k in low {
                            p[k] = -eps;
                        }
                        p
                    })
                    .collect()
            }
        };
        let supports = spec.model.supports()?.to_vec();
        Ok(Self {
            family: spec.family,
            model: spec.model,
            supports,
            patterns,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn model(&self) -> &SupportModel {
        &self.model
    }

    pub fn supports(&self) -> &[Support] {
        &self.supports
    }

    pub fn d(&self) -> usize {
        self.model.d()
    }

    pub fn patterns_per_support(&self) -> usize {
        self.patterns.len()
    }

    pub fn len(&self) -> usize {
        self.supports.len() * self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Closed-form size: `|M| 2^s` for F1/F2, `|M| C(s, s/2)` for F3.
    pub fn closed_form_len(&self) -> u128 {
        let s = self.model.s() as u64;
        let per = match self.family {
            Family::F3 { .. } => binomial(s, s / 2),
            _ => 1u128 << s,
        };
        self.supports.len() as u128 * per
    }

    pub fn log_len(&self) -> f64 {
        (self.len() as f64).ln()
    }

    pub fn member(&self, index: usize) -> Signal {
        let per = self.patterns.len();
        self.compose(index / per, index % per)
    }

    fn compose(&self, support: usize, pattern: usize) -> Signal {
        let mut values = vec![0.0; self.d()];
        for (&i, &v) in self.supports[support].indices().iter().zip(&self.patterns[pattern]) {
            values[i - 1] = v;
        }
        Signal {
            values,
            support: self.supports[support].clone(),
        }
    }

    pub fn members(&self) -> impl Iterator<Item = Signal> + '_ {
        (0..self.len()).map(|i| self.member(i))
    }

    /// Uniform draw: a support uniformly from the model, then a value pattern
    /// uniformly. Returns the canonical member index alongside the signal.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Signal) {
        let support = rng.random_range(0..self.supports.len());
        let pattern = rng.random_range(0..self.patterns.len());
        (support * self.patterns.len() + pattern, self.compose(support, pattern))
    }

    /// Minimum ℓ2 distance between distinct members.
    pub fn min_pairwise_distance(&self) -> Result<f64> {
        if self.len() < 2 {
            return Err(rejected("need at least two members"));
        }
        if self.len() <= BRUTE_FORCE_MEMBERS {
            Ok(self.min_pairwise_distance_exhaustive())
        } else {
            self.min_pairwise_distance_structured()
        }
    }

    pub(crate) fn min_pairwise_distance_exhaustive(&self) -> f64 {
        let members: Vec<Signal> = self.members().collect();
        let mut best = f64::INFINITY;
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                best = best.min(a.distance(b));
            }
        }
        best
    }

    /// Same-support pairs by scanning pattern pairs, cross-support pairs from
    /// the size of the symmetric difference alone.
    pub(crate) fn min_pairwise_distance_structured(&self) -> Result<f64> {
        let m = self.supports.len() as u128;
        if m * m.saturating_sub(1) / 2 > MAX_SUPPORT_PAIRS {
            return Err(Error::TooLarge {
                what: "support pairs",
                count: m * m.saturating_sub(1) / 2,
                cap: MAX_SUPPORT_PAIRS,
            });
        }
        let mut best = f64::INFINITY;
        for (i, a) in self.patterns.iter().enumerate() {
            for b in &self.patterns[i + 1..] {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                best = best.min(d2.sqrt());
            }
        }
        let s = self.model.s();
        let mut seen = vec![false; s + 1];
        for (i, a) in self.supports.iter().enumerate() {
            for b in &self.supports[i + 1..] {
                let shared = a.indices().iter().filter(|&&v| b.contains(v)).count();
                seen[s - shared] = true;
            }
        }
        for k in (1..=s).filter(|&k| seen[k]) {
            best = best.min(self.cross_support_min_sq(k).sqrt());
        }
        Ok(best)
    }

    /// Smallest squared distance between members on two supports that differ
    /// in `k` coordinates each.
    fn cross_support_min_sq(&self, k: usize) -> f64 {
        match self.family {
            Family::F1 { .. } | Family::F2 => {
                let smallest = self.patterns[0]
                    .iter()
                    .chain(self.patterns.last().unwrap())
                    .map(|v| v * v)
                    .fold(f64::INFINITY, f64::min);
                2.0 * k as f64 * smallest
            }
            Family::F3 { eps } => {
                let s = self.model.s();
                let half = s / 2;
                let high = (2.0 / s as f64).sqrt() + eps;
                let (lo2, hi2, gap2) = (eps * eps, high * high, (high + eps) * (high + eps));
                let range = k.saturating_sub(half)..=k.min(half);
                let mut best = f64::INFINITY;
                for a1 in range.clone() {
                    for a2 in range.clone() {
                        let cost = (a1 + a2) as f64 * lo2 + (2 * k - a1 - a2) as f64 * hi2 + a1.abs_diff(a2) as f64 * gap2;
                        best = best.min(cost);
                    }
                }
                best
            }
        }
    }

    /// `{"members":[{"support":[..],"values":[..]},..]}` in canonical order.
    pub fn to_json(&self) -> String {
        let members: Vec<_> = self
            .members()
            .map(|m| json!({ "support": m.support().indices(), "values": m.values() }))
            .collect();
        json!({ "members": members }).to_string()
    }
}

fn bit_patterns(s: usize, clear: f64, set: f64) -> Vec<Vec<f64>> {
    (0..1usize << s)
        .map(|bits| (0..s).map(|k| if bits >> k & 1 == 1 { set } else { clear }).collect())
        .collect()
}

/// Squared norm shared by every `F3` member: `1 + ε√(2s) + sε²`.
pub fn f3_norm_sq(s: usize, eps: f64) -> f64 {
    1.0 + eps * (2.0 * s as f64).sqrt() + s as f64 * eps * eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::WgmParams;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wgm6() -> SupportModel {
        SupportModel::wgm(WgmParams::new(6, 4, 2, 2, 2)).unwrap()
    }

    fn build(family: Family, model: SupportModel) -> Ensemble {
        Ensemble::build(EnsembleSpec { family, model }).unwrap()
    }

    #[test]
    fn cardinalities_over_smallest_wgm() {
        let f2 = build(Family::F2, wgm6());
        assert_eq!(f2.len(), 144);
        assert_eq!(f2.closed_form_len(), 144);
        let f3 = build(Family::F3 { eps: 0.1 }, wgm6());
        assert_eq!(f3.len(), 54);
        assert_eq!(f3.closed_form_len(), 54);
    }

    #[test]
    fn f1_levels() {
        let f1 = build(
            Family::F1 { n: 4, sigma: 1.0, c0: 1.0, eps: 0.5 },
            SupportModel::regular(4, 2).unwrap(),
        );
        let mut levels: Vec<f64> = f1.members().flat_map(|m| m.values().to_vec()).filter(|v| *v != 0.0).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        assert_eq!(levels.len(), 2);
        assert_relative_eq!(levels[0], 2.0, max_relative = 1e-15);
        assert_relative_eq!(levels[1], 2.0 + 2.0 * 2f64.sqrt(), max_relative = 1e-15);
        let rc = RecoveryConstants::new(1.0, 0.5, 1.0, 4).unwrap();
        assert_relative_eq!(rc.sep, rc.v2 - rc.v1, max_relative = 1e-15);
    }

    #[test]
    fn f3_rejects_odd_sparsity() {
        let err = Ensemble::build(EnsembleSpec {
            family: Family::F3 { eps: 0.1 },
            model: SupportModel::regular(5, 3).unwrap(),
        });
        assert!(matches!(err, Err(Error::RejectedParameters(_))));
    }

    #[test]
    fn members_respect_family_values() {
        let f3 = build(Family::F3 { eps: 0.1 }, wgm6());
        for m in f3.members() {
            assert_eq!(m.support().len(), 4);
            let low = m.values().iter().filter(|&&v| v == -0.1).count();
            assert_eq!(low, 2);
            assert_relative_eq!(m.norm_sq(), f3_norm_sq(4, 0.1), max_relative = 1e-12);
        }
        let f2 = build(Family::F2, wgm6());
        assert!(f2.members().all(|m| m.values().iter().all(|v| [-1.0, 0.0, 1.0].contains(v))));
    }

    #[test]
    fn min_distances_small_instances() {
        let f1 = build(
            Family::F1 { n: 4, sigma: 1.0, c0: 1.0, eps: 0.5 },
            SupportModel::regular(4, 2).unwrap(),
        );
        assert_relative_eq!(f1.min_pairwise_distance().unwrap(), 2.0 * 2f64.sqrt(), max_relative = 1e-12);
        let f2 = build(Family::F2, SupportModel::regular(4, 2).unwrap());
        assert_relative_eq!(f2.min_pairwise_distance().unwrap(), 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn f3_same_support_swap_distance() {
        // one support only: swapping one low/high pair moves two coordinates
        // by √(2/s) + 2ε each
        let single = SupportModel::regular(4, 4).unwrap();
        let f3 = build(Family::F3 { eps: 0.1 }, single);
        let expected = 2f64.sqrt() * (0.5f64.sqrt() + 0.2);
        assert_relative_eq!(f3.min_pairwise_distance().unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 1.282_842_712_474_619, max_relative = 1e-12);
    }

    #[test]
    fn structured_shortcut_matches_exhaustive() {
        let cases = [
            build(Family::F2, wgm6()),
            build(Family::F3 { eps: 0.1 }, wgm6()),
            build(Family::F3 { eps: 0.7 }, SupportModel::regular(6, 4).unwrap()),
            build(Family::F3 { eps: 0.05 }, SupportModel::regular(6, 2).unwrap()),
            build(Family::F1 { n: 3, sigma: 0.5, c0: 1.0, eps: 0.9448 }, SupportModel::regular(5, 2).unwrap()),
            build(Family::F2, SupportModel::tree(7, 3).unwrap()),
        ];
        for e in &cases {
            let exhaustive = e.min_pairwise_distance_exhaustive();
            let structured = e.min_pairwise_distance_structured().unwrap();
            assert_relative_eq!(exhaustive, structured, max_relative = 1e-12);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let f2 = build(Family::F2, wgm6());
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<usize> = (0..20).map(|_| f2.sample_uniform(&mut a).0).collect();
        let ys: Vec<usize> = (0..20).map(|_| f2.sample_uniform(&mut b).0).collect();
        assert_eq!(xs, ys);
        let (i, m) = f2.sample_uniform(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(m, f2.member(i));
    }

    #[test]
    fn two_member_ensemble_draws_both() {
        let e = build(Family::F2, SupportModel::tree(3, 1).unwrap());
        assert_eq!(e.len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [false; 2];
        for _ in 0..64 {
            let (i, m) = e.sample_uniform(&mut rng);
            assert_eq!(m, e.member(i));
            seen[i] = true;
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn uniform_frequencies() {
        let f3 = build(Family::F3 { eps: 0.1 }, wgm6());
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 100_000;
        let mut counts = vec![0u32; f3.len()];
        for _ in 0..draws {
            counts[f3.sample_uniform(&mut rng).0] += 1;
        }
        let p = 1.0 / 54.0;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((f64::from(c) - draws as f64 * p).abs() <= 5.0 * sd);
        }
    }

    #[test]
    fn json_export() {
        let f2 = build(Family::F2, SupportModel::regular(2, 1).unwrap());
        assert_eq!(
            f2.to_json(),
            r#"{"members":[{"support":[1],"values":[-1.0,0.0]},{"support":[1],"values":[1.0,0.0]},{"support":[2],"values":[0.0,-1.0]},{"support":[2],"values":[0.0,1.0]}]}"#
        );
    }
}
