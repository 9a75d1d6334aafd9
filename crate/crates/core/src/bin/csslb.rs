//! Command-line front end. Exit codes: 0 success, 1 failed check, 2 bad input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use csslb::bounds::{count_noiseless_outputs, mi_bound_onebit, mi_bound_std_noiseless, BoundReport, MiSetting};
use csslb::ensembles::{Ensemble, EnsembleSpec, Family, RecoveryConstants, DEFAULT_C0, DEFAULT_F1_EPS};
use csslb::graph_model::{supports_to_json, validate_requirements, ComponentRule, SupportModel, Variant, WgmParams};
use csslb::harness::{
    empirical_mi_noiseless_std, empirical_mi_onebit, phase_curve, verify_lemmas, worker_count, ExperimentConfig,
    LemmaBundle, ModelName, ModelSpec, DEFAULT_F3_EPS,
};
use csslb::Error;

#[derive(Parser)]
#[command(name = "csslb", version, about = "Sample-complexity lower bounds for structured compressed sensing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Wgm,
    Regular,
    Tree,
    Block,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    NoIsolated,
    AllowIsolated,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "wgm")]
    model: ModelArg,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    rho: Option<u64>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
}

impl ModelArgs {
    fn build(&self) -> csslb::Result<SupportModel> {
        let spec = ModelSpec {
            d: self.d,
            s: self.s,
            g: self.g,
            budget: self.budget,
            rho: self.rho,
            rows: self.rows,
            cols: self.cols,
            blocks: self.blocks,
            rule: self.rule.map(|r| match r {
                RuleArg::NoIsolated => ComponentRule::NoIsolated,
                RuleArg::AllowIsolated => ComponentRule::AllowIsolated,
            }),
        };
        let name = match self.model {
            ModelArg::Wgm => ModelName::Wgm,
            ModelArg::Regular => ModelName::Regular,
            ModelArg::Tree => ModelName::Tree,
            ModelArg::Block => ModelName::Block,
        };
        spec.build(name)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    F2,
    F3,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundSetting {
    StdNoisy,
    StdNoiseless,
    Onebit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Onebit,
    Noiseless,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the WGM construction requirements.
    Validate {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        rho: u64,
    },
    /// List the supports of a model, or the members of an ensemble over it.
    Enumerate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// F3 offset.
        #[arg(long, default_value_t = DEFAULT_F3_EPS)]
        eps: f64,
    },
    /// Closed-form MI, Fano bound and threshold for one setting.
    Bounds {
        #[arg(long, value_enum)]
        setting: BoundSetting,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = DEFAULT_C0)]
        c0: f64,
        #[arg(long, default_value_t = DEFAULT_F1_EPS)]
        eps: f64,
    },
    /// Monte Carlo error curve; writes CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the lemma checks; writes a JSON report.
    Verify {
        /// TOML file overriding the default bundle.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact or design-sampled mutual information on a tiny instance.
    Mi {
        #[arg(long, value_enum)]
        oracle: Oracle,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_F3_EPS)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        x_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

enum Outcome {
    Ok,
    CheckFailed,
}

fn run(cmd: Cmd) -> csslb::Result<Outcome> {
    match cmd {
        Cmd::Validate { d, s, g, budget, rho } => {
            let report = validate_requirements(&WgmParams::new(d, s, g, budget, rho));
            emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("serialises")));
            Ok(Outcome::Ok)
        }
        Cmd::Enumerate { model, family, eps } => {
            let model = model.build()?;
            match family {
                None => emit(&format!("{}\n", supports_to_json(model.supports()?))),
                Some(f) => {
                    let family = match f {
                        FamilyArg::F2 => Family::F2,
                        FamilyArg::F3 => Family::F3 { eps },
                    };
                    emit(&format!("{}\n", Ensemble::build(EnsembleSpec { family, model })?.to_json()));
                }
            }
            Ok(Outcome::Ok)
        }
        Cmd::Bounds {
            setting,
            model,
            n,
            c0,
            eps,
        } => {
            let model = model.build()?;
            let (mi, variant) = match setting {
                BoundSetting::StdNoisy => {
                    let rc = RecoveryConstants::new(c0, eps, 1.0, 1)?;
                    let mi = MiSetting::StdNoisy {
                        s: model.s(),
                        d: model.d(),
                        k1: rc.k1,
                        k2: rc.k2,
                    };
                    (mi, Variant::Standard)
                }
                BoundSetting::StdNoiseless => (MiSetting::StdNoiseless { s: model.s() }, Variant::Standard),
                BoundSetting::Onebit => (MiSetting::OneBit, Variant::OneBit),
            };
            let log_card = model.log_cardinality_lower_bound(variant)?.log_value;
            emit(&format!("{}\n", BoundReport::new(&mi, n, log_card)?.to_json()));
            Ok(Outcome::Ok)
        }
        Cmd::Simulate { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let sc = cfg.scenario()?;
            let table = phase_curve(&sc, &cfg.n_grid, cfg.trials(), worker_count())?;
            let csv = table.to_csv();
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => emit(&csv),
            }
            let mut ok = true;
            for row in table.violations() {
                eprintln!(
                    "n = {}: err_rate {} + slack {} below fano_bound {}",
                    row.n,
                    row.err_rate,
                    row.slack(),
                    row.fano_bound
                );
                ok = false;
            }
            if table.predicate_mismatches > 0 {
                eprintln!("{} trials where the normalised-distance predicate disagreed", table.predicate_mismatches);
                ok = false;
            }
            Ok(if ok { Outcome::Ok } else { Outcome::CheckFailed })
        }
        Cmd::Verify { config, seed } => {
            let mut bundle = match config {
                Some(path) => toml::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Config(e.to_string()))?,
                None => LemmaBundle::default(),
            };
            if let Some(seed) = seed {
                bundle.seed = seed;
            }
            let report = verify_lemmas(&bundle)?;
            emit(&format!("{}\n", report.to_json()));
            Ok(if report.passed { Outcome::Ok } else { Outcome::CheckFailed })
        }
        Cmd::Mi {
            oracle,
            model,
            n,
            sigma,
            eps,
            x_samples,
            seed,
        } => {
            let model = model.build()?;
            let s = model.s();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (family, name) = match oracle {
                Oracle::Onebit => (Family::F3 { eps }, "onebit"),
                Oracle::Noiseless => (Family::F2, "noiseless"),
            };
            let ens = Ensemble::build(EnsembleSpec { family, model })?;
            let (est, bound) = match oracle {
                Oracle::Onebit => (empirical_mi_onebit(&ens, n, sigma, x_samples, &mut rng)?, mi_bound_onebit(n as f64)),
                Oracle::Noiseless => {
                    let count_cap = n as f64 * (count_noiseless_outputs(s) as f64).ln();
                    let bound = if s >= 2 { mi_bound_std_noiseless(n as f64, s)?.min(count_cap) } else { count_cap };
                    (empirical_mi_noiseless_std(&ens, n, x_samples, &mut rng)?, bound)
                }
            };
            let out = json!({
                "oracle": name,
                "n": n,
                "value": est.value,
                "exact": est.exact,
                "designs": est.designs,
                "bound": bound,
                "log_card": ens.log_len(),
            });
            emit(&format!("{out}\n"));
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
