//! The banded group construction and its parameter requirements.
//!
//! `d` vertices are split into `g` groups of `d/g` consecutive labels. Inside a
//! group, node `i` is joined to the next `rho/2` nodes (circularly) with weight
//! 1, the `rho/2` after those with weight 2, and so on up to weight
//! `B/(s-g)`. No edges cross groups.

use serde::{Deserialize, Serialize};

use super::graph::WeightedGraph;
use crate::error::{rejected, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WgmParams {
    pub d: usize,
    pub s: usize,
    pub g: usize,
    pub budget: u64,
    pub rho: u64,
}

impl WgmParams {
    pub fn new(d: usize, s: usize, g: usize, budget: u64, rho: u64) -> Self {
        Self { d, s, g, budget, rho }
    }

    pub fn group_size(&self) -> usize {
        self.d / self.g
    }

    /// `B / (s - g)`, the number of weight bands.
    pub fn bands(&self) -> u64 {
        self.budget / (self.s - self.g) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    /// Integrality and ordering conditions the construction relies on.
    pub structural: bool,
    pub feasible: bool,
    pub reasons: Vec<String>,
}

/// Checks R1 `d/g >= rho*B/(s-g) + 1`, R2 `rho*B/(2(s-g)) >= s/g - 1`,
/// R3 `B >= s-g` plus the structural conditions, in exact integer arithmetic.
pub fn validate_requirements(p: &WgmParams) -> ValidationReport {
    let mut reasons = Vec::new();
    let mut structural = true;
    if !(0 < p.g && p.g < p.s && p.s < p.d) {
        structural = false;
        reasons.push(format!("need 0 < g < s < d (d={}, s={}, g={})", p.d, p.s, p.g));
    }
    if p.rho < 2 || p.rho % 2 != 0 {
        structural = false;
        reasons.push(format!("rho = {} must be an even integer >= 2", p.rho));
    }
    if p.budget < 1 {
        structural = false;
        reasons.push("budget B must be >= 1".into());
    }
    if p.g > 0 && p.d % p.g != 0 {
        structural = false;
        reasons.push(format!("g = {} does not divide d = {}", p.g, p.d));
    }

    let (r1, r2, r3) = if p.g > 0 && p.g < p.s {
        let (d, s, g) = (p.d as u128, p.s as u128, p.g as u128);
        let (b, rho) = (u128::from(p.budget), u128::from(p.rho));
        let gap = s - g;
        if b % gap != 0 {
            structural = false;
            reasons.push(format!("s - g = {gap} does not divide B = {b}"));
        }
        // d/g >= rho B/(s-g) + 1  <=>  d (s-g) >= g (rho B + s - g)
        let r1 = d * gap >= g * (rho * b + gap);
        // rho B/(2(s-g)) >= s/g - 1  <=>  rho B g >= 2 (s-g)^2
        let r2 = rho * b * g >= 2 * gap * gap;
        let r3 = b >= gap;
        if !r1 {
            reasons.push(format!("R1 fails: d/g = {} < rho*B/(s-g) + 1 = {}", d as f64 / g as f64, (rho * b) as f64 / gap as f64 + 1.0));
        }
        if !r2 {
            reasons.push(format!("R2 fails: rho*B/(2(s-g)) = {} < s/g - 1 = {}", (rho * b) as f64 / (2 * gap) as f64, s as f64 / g as f64 - 1.0));
        }
        if !r3 {
            reasons.push(format!("R3 fails: B = {b} < s - g = {gap}"));
        }
        (r1, r2, r3)
    } else {
        reasons.push("R1-R3 undefined unless g < s".into());
        (false, false, false)
    };

    ValidationReport {
        r1,
        r2,
        r3,
        structural,
        feasible: structural && r1 && r2 && r3,
        reasons,
    }
}

/// Builds the banded group graph. Rejects parameters that fail validation,
/// naming the failed requirement.
pub fn build_construction_graph(p: &WgmParams) -> Result<WeightedGraph> {
    let report = validate_requirements(p);
    if !report.feasible {
        return Err(rejected(report.reasons.join("; ")));
    }
    let m = p.group_size();
    let half = (p.rho / 2) as usize;
    let mut edges = Vec::new();
    for group in 0..p.g {
        let base = group * m;
        for i in 1..=m {
            for band in 1..=p.bands() as usize {
                for offset in (band - 1) * half + 1..=band * half {
                    let j = (i + offset - 1) % m + 1;
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    edges.push((base + a, base + b, band as u32));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    WeightedGraph::new(p.d, edges)?.with_group_size(m)
}

/// `(d, rho)` pairs with `d <= max_d`, `rho <= max_rho` for which the
/// construction is admissible at fixed `(s, g, B)`.
pub fn feasible_designs(s: usize, g: usize, budget: u64, max_d: usize, max_rho: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::new();
    for rho in (2..=max_rho).step_by(2) {
        for d in (s + 1..=max_d).filter(|d| g > 0 && d % g == 0) {
            if validate_requirements(&WgmParams::new(d, s, g, budget, rho)).feasible {
                out.push((d, rho));
            }
        }
    }
    out
}
