use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{fano_lower_bound, noise_concentration_bound, sample_threshold, MiSetting};
use crate::decoders::{ml_decode_linear, ml_decode_onebit, DecodeResult, OneBitRule};
use crate::ensembles::{Ensemble, EnsembleSpec, Family, RecoveryConstants, DEFAULT_C0, DEFAULT_F1_EPS};
use crate::error::{rejected, Result};
use crate::graph_model::SupportModel;
use crate::sensing::{make_design, measure, Channel, DesignKind};
use crate::stats::{wilson_interval, WilsonInterval, Z95};

/// Offset used for the one-bit ensemble when none is given.
pub const DEFAULT_F3_EPS: f64 = 0.1;
pub const DEFAULT_TRIALS: u64 = 4_000;
pub const MIN_TRIALS: u64 = 100;

/// Worker count from `CSSLB_THREADS`, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var("CSSLB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    StdNoisy,
    StdNoiseless,
    OnebitExact,
    OnebitApprox,
}

impl Setting {
    pub fn default_design(self) -> DesignKind {
        match self {
            Setting::StdNoiseless => DesignKind::Bernoulli,
            _ => DesignKind::Gaussian,
        }
    }

    pub fn default_eps(self) -> f64 {
        match self {
            Setting::StdNoisy => DEFAULT_F1_EPS,
            _ => DEFAULT_F3_EPS,
        }
    }

    pub fn channel(self) -> Channel {
        match self {
            Setting::StdNoisy | Setting::StdNoiseless => Channel::Linear,
            Setting::OnebitExact | Setting::OnebitApprox => Channel::OneBit,
        }
    }
}

/// One Monte Carlo experiment, minus the sample count.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub setting: Setting,
    pub model: SupportModel,
    pub sigma: f64,
    /// Recovery constant; also the `C` of the noisy failure predicate.
    pub c0: f64,
    /// `ε` of the ensemble (F1 concentration or F3 offset).
    pub eps: f64,
    pub seed: u64,
    /// Replaces the setting's design; must be set explicitly to deviate.
    pub design_override: Option<DesignKind>,
    pub onebit_rule: OneBitRule,
}

impl Scenario {
    pub fn new(setting: Setting, model: SupportModel, sigma: f64, seed: u64) -> Self {
        Self {
            setting,
            model,
            sigma,
            c0: DEFAULT_C0,
            eps: setting.default_eps(),
            seed,
            design_override: None,
            onebit_rule: OneBitRule::Auto,
        }
    }

    pub fn design(&self) -> DesignKind {
        self.design_override.unwrap_or(self.setting.default_design())
    }

    pub fn validate(&self) -> Result<()> {
        match self.setting {
            Setting::StdNoiseless if self.sigma != 0.0 => {
                Err(rejected(format!("std_noiseless needs sigma = 0, got {}", self.sigma)))
            }
            Setting::StdNoisy if !(self.sigma > 0.0) => {
                Err(rejected(format!("std_noisy needs sigma > 0, got {}", self.sigma)))
            }
            _ if !(self.sigma >= 0.0) => Err(rejected(format!("sigma = {} must be non-negative", self.sigma))),
            _ => Ok(()),
        }
    }

    pub fn family(&self, n: usize) -> Family {
        match self.setting {
            Setting::StdNoisy => Family::F1 {
                n,
                sigma: self.sigma,
                c0: self.c0,
                eps: self.eps,
            },
            Setting::StdNoiseless => Family::F2,
            Setting::OnebitExact | Setting::OnebitApprox => Family::F3 { eps: self.eps },
        }
    }

    /// The ensemble at sample count `n` (only F1 depends on `n`).
    pub fn ensemble(&self, n: usize) -> Result<Ensemble> {
        Ensemble::build(EnsembleSpec {
            family: self.family(n),
            model: self.model.clone(),
        })
    }

    pub fn mi_setting(&self) -> Result<MiSetting> {
        Ok(match self.setting {
            Setting::StdNoisy => {
                // k1, k2 do not depend on n or sigma
                let rc = RecoveryConstants::new(self.c0, self.eps, 1.0, 1)?;
                MiSetting::StdNoisy {
                    s: self.model.s(),
                    d: self.model.d(),
                    k1: rc.k1,
                    k2: rc.k2,
                }
            }
            Setting::StdNoiseless => MiSetting::StdNoiseless { s: self.model.s() },
            Setting::OnebitExact | Setting::OnebitApprox => MiSetting::OneBit,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct TrialOutcome {
    failed: bool,
    /// One-bit approximate setting only: the normalised-distance predicate
    /// disagreed with `β̂ ≠ β*`.
    mismatch: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub n: usize,
    pub trials: u64,
    pub failures: u64,
    pub err_rate: f64,
    pub wilson: WilsonInterval,
    /// Trial indices that failed, ascending.
    pub failed_trials: Vec<u64>,
    pub predicate_mismatches: u64,
}

fn decode(sc: &Scenario, ens: &Ensemble, x: &crate::sensing::DesignMatrix, y: &[f64]) -> Result<DecodeResult> {
    match sc.setting.channel() {
        Channel::Linear => ml_decode_linear(x, y, ens),
        Channel::OneBit => ml_decode_onebit(x, y, ens, sc.sigma, sc.onebit_rule),
    }
}

fn run_trial(sc: &Scenario, ens: &Ensemble, n: usize, trial: u64) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    rng.set_stream(trial);
    let (truth, beta) = ens.sample_uniform(&mut rng);
    let x = make_design(sc.design(), n, ens.d(), &mut rng);
    let meas = measure(&x, &beta, sc.sigma, sc.setting.channel(), &mut rng)?;
    let r = decode(sc, ens, &x, &meas.y)?;
    let wrong = r.index != truth;
    Ok(match sc.setting {
        Setting::StdNoiseless | Setting::OnebitExact => TrialOutcome {
            failed: wrong,
            mismatch: false,
        },
        Setting::StdNoisy => {
            let e_norm = meas.noise.iter().map(|v| v * v).sum::<f64>().sqrt();
            TrialOutcome {
                failed: r.estimate.distance(&beta) >= sc.c0 * e_norm,
                mismatch: false,
            }
        }
        Setting::OnebitApprox => {
            let norm = beta.norm();
            let far = r.estimate.distance(&beta) / norm >= sc.eps / norm;
            TrialOutcome {
                failed: far,
                mismatch: far != wrong,
            }
        }
    })
}

/// Error probability of the setting's ML decoder at `n` samples.
///
/// Trial `t` draws everything from the ChaCha stream `t` of `seed`, so the
/// outcome does not depend on `threads`.
pub fn estimate_error_probability(sc: &Scenario, n: usize, trials: u64, threads: usize) -> Result<ErrorEstimate> {
    let ens = sc.ensemble(n)?;
    estimate_with(sc, &ens, n, trials, threads)
}

fn estimate_with(sc: &Scenario, ens: &Ensemble, n: usize, trials: u64, threads: usize) -> Result<ErrorEstimate> {
    sc.validate()?;
    if trials < MIN_TRIALS {
        return Err(rejected(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    if n == 0 {
        return Err(rejected("n must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| rejected(e.to_string()))?;
    let outcomes: Vec<TrialOutcome> =
        pool.install(|| (0..trials).into_par_iter().map(|t| run_trial(sc, ens, n, t)).collect::<Result<_>>())?;
    let failed_trials: Vec<u64> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.failed)
        .map(|(t, _)| t as u64)
        .collect();
    let failures = failed_trials.len() as u64;
    Ok(ErrorEstimate {
        n,
        trials,
        failures,
        err_rate: failures as f64 / trials as f64,
        wilson: wilson_interval(failures, trials, Z95),
        failed_trials,
        predicate_mismatches: outcomes.iter().filter(|o| o.mismatch).count() as u64,
    })
}

pub const CSV_HEADER: &str = "n,trials,failures,err_rate,wilson_lo,wilson_hi,mi_bound,fano_bound,threshold_n";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub trials: u64,
    pub failures: u64,
    pub err_rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub mi_bound: f64,
    /// Fano bound; for `std_noisy` composed with the noise-concentration
    /// probability.
    pub fano_bound: f64,
    pub threshold_n: f64,
}

impl CurveRow {
    /// `3 ×` the Wilson half-width.
    pub fn slack(&self) -> f64 {
        3.0 * (self.wilson_hi - self.wilson_lo) / 2.0
    }

    pub fn fano_consistent(&self) -> bool {
        self.err_rate + self.slack() >= self.fano_bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
    pub predicate_mismatches: u64,
}

impl CurveTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.n, r.trials, r.failures, r.err_rate, r.wilson_lo, r.wilson_hi, r.mi_bound, r.fano_bound, r.threshold_n
            ));
        }
        out
    }

    /// Rows where the empirical error sits more than the slack below the bound.
    pub fn violations(&self) -> Vec<&CurveRow> {
        self.rows.iter().filter(|r| !r.fano_consistent()).collect()
    }
}

/// Analytic columns at `n` for the scenario, against `ln|F|` of `ens`.
pub fn analytic_columns(sc: &Scenario, ens: &Ensemble, n: usize) -> Result<(f64, f64, f64)> {
    let mi = sc.mi_setting()?;
    let log_card = ens.log_len();
    let mi_n = mi.at(n as f64)?;
    let mut fano = fano_lower_bound(mi_n, log_card)?;
    if sc.setting == Setting::StdNoisy {
        fano *= noise_concentration_bound(n as f64, sc.eps);
    }
    Ok((mi_n, fano, sample_threshold(&mi, log_card)?.n))
}

/// One row per distinct `n` in ascending order.
pub fn phase_curve(sc: &Scenario, n_grid: &[usize], trials: u64, threads: usize) -> Result<CurveTable> {
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let mut rows = Vec::with_capacity(grid.len());
    let mut mismatches = 0;
    for n in grid {
        let ens = sc.ensemble(n)?;
        let est = estimate_with(sc, &ens, n, trials, threads)?;
        let (mi_bound, fano_bound, threshold_n) = analytic_columns(sc, &ens, n)?;
        mismatches += est.predicate_mismatches;
        rows.push(CurveRow {
            n,
            trials,
            failures: est.failures,
            err_rate: est.err_rate,
            wilson_lo: est.wilson.lo,
            wilson_hi: est.wilson.hi,
            mi_bound,
            fano_bound,
            threshold_n,
        });
    }
    Ok(CurveTable {
        rows,
        predicate_mismatches: mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::WgmParams;

    fn wgm6() -> SupportModel {
        SupportModel::wgm(WgmParams::new(6, 4, 2, 2, 2)).unwrap()
    }

    #[test]
    fn sigma_rules() {
        assert!(Scenario::new(Setting::StdNoiseless, wgm6(), 0.1, 1).validate().is_err());
        assert!(Scenario::new(Setting::StdNoisy, wgm6(), 0.0, 1).validate().is_err());
        assert!(Scenario::new(Setting::OnebitExact, wgm6(), 0.0, 1).validate().is_ok());
        assert!(Scenario::new(Setting::OnebitExact, wgm6(), -1.0, 1).validate().is_err());
    }

    #[test]
    fn designs_follow_setting() {
        let mut sc = Scenario::new(Setting::StdNoiseless, wgm6(), 0.0, 1);
        assert_eq!(sc.design(), DesignKind::Bernoulli);
        sc.design_override = Some(DesignKind::Gaussian);
        assert_eq!(sc.design(), DesignKind::Gaussian);
        assert_eq!(Scenario::new(Setting::OnebitApprox, wgm6(), 0.0, 1).design(), DesignKind::Gaussian);
    }

    #[test]
    fn too_few_trials_rejected() {
        let sc = Scenario::new(Setting::OnebitExact, wgm6(), 0.0, 1);
        assert!(estimate_error_probability(&sc, 1, 99, 1).is_err());
    }

    #[test]
    fn schedule_does_not_change_failures() {
        let sc = Scenario::new(Setting::OnebitExact, wgm6(), 0.5, 42);
        let a = estimate_error_probability(&sc, 2, 300, 1).unwrap();
        let b = estimate_error_probability(&sc, 2, 300, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.failures as usize, a.failed_trials.len());
    }

    #[test]
    fn identifiable_noiseless_regime() {
        let sc = Scenario::new(Setting::StdNoiseless, SupportModel::regular(4, 2).unwrap(), 0.0, 3);
        let est = estimate_error_probability(&sc, 16, 200, 2).unwrap();
        assert!(est.err_rate <= 0.01, "{}", est.err_rate);
    }

    #[test]
    fn normalised_predicate_matches_exact() {
        let sc = Scenario::new(Setting::OnebitApprox, wgm6(), 0.3, 9);
        let approx = estimate_error_probability(&sc, 2, 400, 2).unwrap();
        assert_eq!(approx.predicate_mismatches, 0);
        let exact = Scenario {
            setting: Setting::OnebitExact,
            ..sc
        };
        assert_eq!(estimate_error_probability(&exact, 2, 400, 2).unwrap().failed_trials, approx.failed_trials);
    }

    #[test]
    fn csv_layout() {
        let sc = Scenario::new(Setting::OnebitExact, wgm6(), 0.0, 5);
        let t = phase_curve(&sc, &[2, 1, 2], 100, 1).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,100,"));
        assert!(lines[2].starts_with("2,100,"));
        assert!(!csv.contains('\r'));
        for row in &t.rows {
            assert!(row.wilson_lo <= row.err_rate && row.err_rate <= row.wilson_hi);
        }
    }

    #[test]
    fn noisy_fano_column_is_composed() {
        let sc = Scenario::new(Setting::StdNoisy, SupportModel::regular(6, 2).unwrap(), 1.0, 1);
        let ens = sc.ensemble(2).unwrap();
        let (mi, fano, _) = analytic_columns(&sc, &ens, 2).unwrap();
        let plain = fano_lower_bound(mi, ens.log_len()).unwrap();
        assert_eq!(fano, plain * noise_concentration_bound(2.0, sc.eps));
    }
}
