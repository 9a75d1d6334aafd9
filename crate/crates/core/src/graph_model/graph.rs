use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::error::{rejected, Result};

/// Vertex label in `1..=d`.
pub type Vertex = usize;

/// Undirected weighted edge, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub weight: u32,
}

/// Graph over the vertex set `[d]` with positive integer edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    d: usize,
    edges: Vec<Edge>,
    group_size: Option<usize>,
}

impl WeightedGraph {
    /// Builds a graph from `(u, v, w)` triples. Endpoints are normalised so that
    /// `u < v` and edges are kept in canonical sorted order.
    pub fn new<I>(d: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex, u32)>,
    {
        let mut set = BTreeSet::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(rejected(format!("self-loop at vertex {a}")));
            }
            if a == 0 || b == 0 || a > d || b > d {
                return Err(rejected(format!("edge ({a},{b}) outside [1, {d}]")));
            }
            if w == 0 {
                return Err(rejected(format!("edge ({a},{b}) has weight 0")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !set.insert(Edge { u, v, weight: w }) {
                return Err(rejected(format!("duplicate edge ({u},{v},{w})")));
            }
        }
        Ok(Self {
            d,
            edges: set.into_iter().collect(),
            group_size: None,
        })
    }

    pub(crate) fn with_group_size(mut self, group_size: usize) -> Result<Self> {
        if group_size == 0 || self.d % group_size != 0 {
            return Err(rejected(format!(
                "group size {group_size} does not divide d = {}",
                self.d
            )));
        }
        self.group_size = Some(group_size);
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn group_size(&self) -> Option<usize> {
        self.group_size
    }

    /// Largest number of neighbours any vertex reaches through edges of one
    /// weight class. Zero for an edgeless graph.
    pub fn weight_degree(&self) -> usize {
        let mut counts: BTreeMap<(Vertex, u32), usize> = BTreeMap::new();
        for e in &self.edges {
            *counts.entry((e.u, e.weight)).or_default() += 1;
            *counts.entry((e.v, e.weight)).or_default() += 1;
        }
        counts.into_values().max().unwrap_or(0)
    }

    /// Edges with both endpoints in `vertices` (which must be sorted).
    pub fn induced_edges(&self, vertices: &[Vertex]) -> Vec<Edge> {
        self.edges
            .iter()
            .filter(|e| vertices.binary_search(&e.u).is_ok() && vertices.binary_search(&e.v).is_ok())
            .copied()
            .collect()
    }

    /// `{"d":..,"edges":[[u,v,w],..]}` with sorted keys and canonical edge order.
    pub fn to_json(&self) -> String {
        let edges: Vec<[u64; 3]> = self
            .edges
            .iter()
            .map(|e| [e.u as u64, e.v as u64, u64::from(e.weight)])
            .collect();
        json!({ "d": self.d, "edges": edges }).to_string()
    }
}
