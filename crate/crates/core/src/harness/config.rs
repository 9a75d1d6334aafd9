//! Flat `key = value` experiment configuration.

use serde::{Deserialize, Serialize};

use super::scenario::{Scenario, Setting, DEFAULT_TRIALS};
use crate::decoders::OneBitRule;
use crate::error::{Error, Result};
use crate::graph_model::{ComponentRule, SupportModel, WgmParams};
use crate::sensing::DesignKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Wgm,
    Regular,
    Tree,
    Block,
}

/// Which support model to build and its size parameters; unused keys may be
/// left out.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<ComponentRule>,
}

fn need<T: Copy>(v: Option<T>, key: &str, model: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("model `{model}` needs `{key}`")))
}

impl ModelSpec {
    pub fn build(&self, name: ModelName) -> Result<SupportModel> {
        match name {
            ModelName::Wgm => {
                let p = WgmParams::new(
                    need(self.d, "d", "wgm")?,
                    need(self.s, "s", "wgm")?,
                    need(self.g, "g", "wgm")?,
                    need(self.budget, "budget", "wgm")?,
                    need(self.rho, "rho", "wgm")?,
                );
                Ok(SupportModel::wgm(p)?.with_rule(self.rule.unwrap_or_default()))
            }
            ModelName::Regular => SupportModel::regular(need(self.d, "d", "regular")?, need(self.s, "s", "regular")?),
            ModelName::Tree => SupportModel::tree(need(self.d, "d", "tree")?, need(self.s, "s", "tree")?),
            ModelName::Block => SupportModel::block(
                need(self.rows, "rows", "block")?,
                need(self.cols, "cols", "block")?,
                need(self.blocks, "blocks", "block")?,
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub setting: Setting,
    pub model: ModelName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<ComponentRule>,
    pub sigma: f64,
    pub seed: u64,
    pub n_grid: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoder: Option<OneBitRule>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec {
            d: self.d,
            s: self.s,
            g: self.g,
            budget: self.budget,
            rho: self.rho,
            rows: self.rows,
            cols: self.cols,
            blocks: self.blocks,
            rule: self.rule,
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let model = self.model_spec().build(self.model)?;
        let mut sc = Scenario::new(self.setting, model, self.sigma, self.seed);
        if let Some(c0) = self.c0 {
            sc.c0 = c0;
        }
        if let Some(eps) = self.eps {
            sc.eps = eps;
        }
        sc.design_override = self.design;
        if let Some(rule) = self.decoder {
            sc.onebit_rule = rule;
        }
        sc.validate()?;
        if self.n_grid.is_empty() {
            return Err(Error::Config("`n_grid` must not be empty".into()));
        }
        Ok(sc)
    }
}
