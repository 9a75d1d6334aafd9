use std::f64::consts::LN_2;
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::construction::{build_construction_graph, WgmParams};
use super::forest::{min_weight_forest, ComponentRule};
use super::graph::WeightedGraph;
use super::support::{binomial, Support};
use crate::error::{rejected, Error, Result};

/// Default cap on the number of candidate subsets an exhaustive enumeration
/// may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    /// `(G, s, g, B)` weighted graph model.
    Wgm {
        graph: WeightedGraph,
        params: WgmParams,
        rule: ComponentRule,
    },
    /// Rooted connected subtrees of the complete binary tree on `[d]`
    /// (heap labelling: the parent of `i` is `i / 2`).
    Tree { d: usize, s: usize },
    /// `rows x cols` signal, column-major labels; supports are unions of
    /// `blocks` full columns.
    Block { rows: usize, cols: usize, blocks: usize },
    /// Every size-`s` subset of `[d]`.
    Regular { d: usize, s: usize },
}

/// Which restricted ensemble a cardinality bound is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    OneBit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CardinalityBound {
    /// Natural log of the lower bound on the ensemble size.
    pub log_value: f64,
    /// Set when `rho B g / (2 (s-g)^2) < 1`, i.e. the graph factor shrinks the bound.
    pub weak: bool,
}

/// A family of admissible supports together with a lazily filled enumeration.
#[derive(Clone, Debug)]
pub struct SupportModel {
    kind: ModelKind,
    cap: u128,
    cache: OnceLock<Vec<Support>>,
}

impl SupportModel {
    fn from_kind(kind: ModelKind) -> Self {
        Self {
            kind,
            cap: DEFAULT_ENUMERATION_CAP,
            cache: OnceLock::new(),
        }
    }

    /// WGM over the banded group construction graph.
    pub fn wgm(params: WgmParams) -> Result<Self> {
        let graph = build_construction_graph(&params)?;
        Ok(Self::from_kind(ModelKind::Wgm {
            graph,
            params,
            rule: ComponentRule::default(),
        }))
    }

    /// WGM over an arbitrary graph. `params.rho` is informational here.
    pub fn wgm_on(graph: WeightedGraph, params: WgmParams, rule: ComponentRule) -> Result<Self> {
        if graph.d() != params.d {
            return Err(rejected(format!("graph has d = {}, params say {}", graph.d(), params.d)));
        }
        if !(0 < params.g && params.g <= params.s && params.s <= params.d) {
            return Err(rejected("need 0 < g <= s <= d"));
        }
        Ok(Self::from_kind(ModelKind::Wgm { graph, params, rule }))
    }

    pub fn tree(d: usize, s: usize) -> Result<Self> {
        if !(1 <= s && s <= d) {
            return Err(rejected(format!("tree model needs 1 <= s <= d (s={s}, d={d})")));
        }
        Ok(Self::from_kind(ModelKind::Tree { d, s }))
    }

    pub fn block(rows: usize, cols: usize, blocks: usize) -> Result<Self> {
        if rows == 0 || !(1 <= blocks && blocks <= cols) {
            return Err(rejected(format!(
                "block model needs J >= 1 and 1 <= K <= N (J={rows}, N={cols}, K={blocks})"
            )));
        }
        Ok(Self::from_kind(ModelKind::Block { rows, cols, blocks }))
    }

    pub fn regular(d: usize, s: usize) -> Result<Self> {
        if !(1 <= s && s <= d) {
            return Err(rejected(format!("regular model needs 1 <= s <= d (s={s}, d={d})")));
        }
        Ok(Self::from_kind(ModelKind::Regular { d, s }))
    }

    /// Switches the forest component rule of a WGM; no-op for other kinds.
    pub fn with_rule(mut self, new_rule: ComponentRule) -> Self {
        if let ModelKind::Wgm { rule, .. } = &mut self.kind {
            *rule = new_rule;
            self.cache = OnceLock::new();
        }
        self
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn d(&self) -> usize {
        match &self.kind {
            ModelKind::Wgm { params, .. } => params.d,
            ModelKind::Tree { d, .. } | ModelKind::Regular { d, .. } => *d,
            ModelKind::Block { rows, cols, .. } => rows * cols,
        }
    }

    pub fn s(&self) -> usize {
        match &self.kind {
            ModelKind::Wgm { params, .. } => params.s,
            ModelKind::Tree { s, .. } | ModelKind::Regular { s, .. } => *s,
            ModelKind::Block { rows, blocks, .. } => rows * blocks,
        }
    }

    /// Membership predicate of the model.
    pub fn contains(&self, support: &Support) -> bool {
        if support.len() != self.s() || support.indices().last().is_some_and(|&i| i > self.d()) {
            return false;
        }
        match &self.kind {
            ModelKind::Wgm { graph, params, rule } => {
                min_weight_forest(graph, support, params.g, *rule).is_some_and(|(_, w)| w <= params.budget)
            }
            ModelKind::Tree { .. } => {
                support.contains(1) && support.indices().iter().all(|&i| i == 1 || support.contains(i / 2))
            }
            ModelKind::Block { rows, blocks, .. } => {
                let columns: Vec<usize> = support.indices().iter().map(|&i| (i - 1) / rows).dedup().collect();
                columns.len() == *blocks
                    && columns
                        .iter()
                        .all(|c| (1..=*rows).all(|r| support.contains(c * rows + r)))
            }
            ModelKind::Regular { .. } => true,
        }
    }

    /// Number of candidate subsets exhaustive enumeration would visit.
    pub fn candidate_count(&self) -> u128 {
        match &self.kind {
            ModelKind::Block { cols, blocks, .. } => binomial(*cols as u64, *blocks as u64),
            _ => binomial(self.d() as u64, self.s() as u64),
        }
    }

    /// Every admissible support, in lexicographic order.
    pub fn enumerate(&self) -> Result<Vec<Support>> {
        let count = self.candidate_count();
        if count > self.cap {
            return Err(Error::TooLarge {
                what: "support model",
                count,
                cap: self.cap,
            });
        }
        let out = match &self.kind {
            ModelKind::Block { rows, cols, blocks } => (0..*cols)
                .combinations(*blocks)
                .map(|chosen| {
                    Support::from_sorted(
                        chosen
                            .iter()
                            .flat_map(|c| (1..=*rows).map(move |r| c * rows + r))
                            .collect(),
                    )
                })
                .collect(),
            ModelKind::Regular { d, s } => (1..=*d).combinations(*s).map(Support::from_sorted).collect(),
            _ => (1..=self.d())
                .combinations(self.s())
                .map(Support::from_sorted)
                .filter(|s| self.contains(s))
                .collect(),
        };
        Ok(out)
    }

    /// Cached enumeration.
    pub fn supports(&self) -> Result<&[Support]> {
        if let Some(v) = self.cache.get() {
            return Ok(v);
        }
        let v = self.enumerate()?;
        Ok(self.cache.get_or_init(|| v))
    }

    /// Natural-log lower bound on the size of the restricted ensemble built on
    /// this model (support count times value patterns).
    pub fn log_cardinality_lower_bound(&self, variant: Variant) -> Result<CardinalityBound> {
        let s = self.s();
        if variant == Variant::OneBit && s % 2 != 0 {
            return Err(rejected(format!("one-bit ensemble needs even s, got {s}")));
        }
        let patterns = match variant {
            Variant::Standard => s as f64 * LN_2,
            Variant::OneBit => s as f64 / 2.0 * LN_2,
        };
        let bound = match &self.kind {
            ModelKind::Wgm { params, .. } => {
                let (d, g) = (params.d as f64, params.g as f64);
                let gap = (params.s - params.g) as f64;
                let ratio = params.rho as f64 * params.budget as f64 * g / (2.0 * gap * gap);
                CardinalityBound {
                    log_value: patterns + g * (d / g).ln() + gap * ratio.ln(),
                    weak: ratio < 1.0,
                }
            }
            ModelKind::Tree { .. } => CardinalityBound {
                log_value: patterns,
                weak: false,
            },
            ModelKind::Block { rows, cols, blocks } => {
                let (j, n, k) = (*rows as f64, *cols as f64, *blocks as f64);
                CardinalityBound {
                    log_value: k * j / 2.0 * LN_2 + k * (n / k).ln(),
                    weak: false,
                }
            }
            ModelKind::Regular { d, .. } => {
                let (d, s) = (*d as f64, s as f64);
                CardinalityBound {
                    log_value: s / 2.0 * LN_2 + s * (d / s).ln(),
                    weak: false,
                }
            }
        };
        Ok(bound)
    }
}
