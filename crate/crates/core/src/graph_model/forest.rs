//! Minimum-weight certifying forests for weighted graph model membership.

use serde::{Deserialize, Serialize};

use super::graph::{Edge, Vertex, WeightedGraph};
use super::support::Support;

/// How isolated vertices of a certifying forest are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentRule {
    /// Every component carries at least one edge, so each connected piece of
    /// the support has two or more vertices.
    #[default]
    NoIsolated,
    /// Isolated vertices count as single-vertex components.
    AllowIsolated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl Forest {
    pub fn components(&self) -> usize {
        self.vertices.len() - self.edges.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| u64::from(e.weight)).sum()
    }
}

#[derive(Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Minimum-weight forest `F ⊆ G[S]` with vertex set `S` and exactly `g`
/// components, or `None` when no such forest exists.
pub fn min_weight_forest(
    graph: &WeightedGraph,
    support: &Support,
    g: usize,
    rule: ComponentRule,
) -> Option<(Forest, u64)> {
    let vertices = support.indices();
    if g > vertices.len() || (g == 0 && !vertices.is_empty()) {
        return None;
    }
    let mut edges = graph.induced_edges(vertices);
    edges.sort_by_key(|e| (e.weight, e.u, e.v));
    let local = |v: Vertex| vertices.binary_search(&v).expect("induced edge endpoint");

    let mut uf = UnionFind::new(vertices.len());
    let msf: Vec<Edge> = edges
        .iter()
        .filter(|e| uf.union(local(e.u), local(e.v)))
        .copied()
        .collect();
    let induced_components = vertices.len() - msf.len();
    if induced_components > g {
        return None;
    }

    let chosen = match rule {
        // Kruskal order is non-decreasing, so dropping the g - c heaviest
        // edges of the spanning forest is the same as stopping early.
        ComponentRule::AllowIsolated => msf[..vertices.len() - g].to_vec(),
        ComponentRule::NoIsolated => {
            let mut sizes = vec![0usize; vertices.len()];
            for v in 0..vertices.len() {
                sizes[uf.find(v)] += 1;
            }
            if sizes.contains(&1) {
                return None;
            }
            NoIsolatedSearch::new(&edges, vertices.len(), vertices.len() - g, &local).run()?
        }
    };
    let mut chosen = chosen;
    chosen.sort();
    let forest = Forest {
        vertices: vertices.to_vec(),
        edges: chosen,
    };
    let w = forest.total_weight();
    Some((forest, w))
}

/// Branch and bound over weight-sorted edges: pick `need` edges forming a
/// forest that touches every vertex.
struct NoIsolatedSearch {
    edges: Vec<(usize, usize, u64)>,
    prefix: Vec<u64>,
    n: usize,
    need: usize,
    best: Option<(u64, Vec<usize>)>,
}

impl NoIsolatedSearch {
    fn new(edges: &[Edge], n: usize, need: usize, local: &dyn Fn(Vertex) -> usize) -> Self {
        let edges: Vec<_> = edges
            .iter()
            .map(|e| (local(e.u), local(e.v), u64::from(e.weight)))
            .collect();
        let mut prefix = vec![0];
        for e in &edges {
            prefix.push(prefix.last().unwrap() + e.2);
        }
        Self { edges, prefix, n, need, best: None }
    }

    fn run(mut self) -> Option<Vec<Edge>> {
        if self.need == 0 {
            return None;
        }
        let mut degree = vec![0usize; self.n];
        let mut picked = Vec::with_capacity(self.need);
        self.dfs(0, &mut picked, UnionFind::new(self.n), 0, &mut degree);
        let (_, idx) = self.best.take()?;
        Some(idx.into_iter().map(|i| self.edge(i)).collect())
    }

    fn edge(&self, i: usize) -> Edge {
        let (u, v, w) = self.edges[i];
        Edge { u, v, weight: w as u32 }
    }

    fn dfs(&mut self, idx: usize, picked: &mut Vec<usize>, uf: UnionFind, weight: u64, degree: &mut [usize]) {
        let remaining = self.need - picked.len();
        if remaining == 0 {
            if degree.iter().all(|&d| d > 0) && self.best.as_ref().is_none_or(|(b, _)| weight < *b) {
                self.best = Some((weight, picked.clone()));
            }
            return;
        }
        if self.edges.len() - idx < remaining {
            return;
        }
        let lower = weight + self.prefix[idx + remaining] - self.prefix[idx];
        if self.best.as_ref().is_some_and(|(b, _)| lower >= *b) {
            return;
        }
        let uncovered = degree.iter().filter(|&&d| d == 0).count();
        if uncovered > 2 * remaining {
            return;
        }

        let (a, b, w) = self.edges[idx];
        let mut with = uf.clone();
        if with.union(a, b) {
            picked.push(idx);
            degree[a] += 1;
            degree[b] += 1;
            self.dfs(idx + 1, picked, with, weight + w, degree);
            degree[a] -= 1;
            degree[b] -= 1;
            picked.pop();
        }
        self.dfs(idx + 1, picked, uf, weight, degree);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::{build_construction_graph, WgmParams};

    fn two_triangles() -> WeightedGraph {
        build_construction_graph(&WgmParams::new(6, 4, 2, 2, 2)).unwrap()
    }

    fn support(v: &[usize], d: usize) -> Support {
        Support::new(v.to_vec(), d).unwrap()
    }

    #[test]
    fn one_triangle_single_component() {
        let g = two_triangles();
        for rule in [ComponentRule::NoIsolated, ComponentRule::AllowIsolated] {
            let (f, w) = min_weight_forest(&g, &support(&[1, 2, 3], 6), 1, rule).unwrap();
            assert_eq!(w, 2);
            assert_eq!(f.components(), 1);
        }
    }

    #[test]
    fn pairs_across_triangles() {
        let g = two_triangles();
        let (f, w) = min_weight_forest(&g, &support(&[1, 2, 4, 5], 6), 2, ComponentRule::NoIsolated).unwrap();
        assert_eq!(w, 2);
        assert_eq!(f.components(), 2);
    }

    #[test]
    fn too_many_induced_components() {
        let g = two_triangles();
        assert!(min_weight_forest(&g, &support(&[1, 2, 4], 6), 1, ComponentRule::AllowIsolated).is_none());
        assert!(min_weight_forest(&g, &support(&[1, 2, 4], 6), 1, ComponentRule::NoIsolated).is_none());
    }

    #[test]
    fn isolated_vertex_rule_difference() {
        let g = two_triangles();
        let s = support(&[1, 2, 3, 4], 6);
        assert!(min_weight_forest(&g, &s, 2, ComponentRule::NoIsolated).is_none());
        let (f, w) = min_weight_forest(&g, &s, 2, ComponentRule::AllowIsolated).unwrap();
        assert_eq!((w, f.components()), (2, 2));
    }

    #[test]
    fn trims_heaviest_edges() {
        // path 1-2-3-4 with weights 1, 5, 2; two components drop the weight-5 edge
        let g = WeightedGraph::new(4, [(1, 2, 1), (2, 3, 5), (3, 4, 2)]).unwrap();
        let s = support(&[1, 2, 3, 4], 4);
        for rule in [ComponentRule::NoIsolated, ComponentRule::AllowIsolated] {
            let (_, w) = min_weight_forest(&g, &s, 2, rule).unwrap();
            assert_eq!(w, 3);
        }
        // with isolated vertices allowed three components keep only the weight-1 edge
        let (_, w) = min_weight_forest(&g, &s, 3, ComponentRule::AllowIsolated).unwrap();
        assert_eq!(w, 1);
        assert!(min_weight_forest(&g, &s, 3, ComponentRule::NoIsolated).is_none());
    }

    #[test]
    fn no_isolated_can_need_a_non_msf_edge() {
        // star centre 1 with cheap edges to 2, 3; expensive edge 3-4 is forced
        let g = WeightedGraph::new(4, [(1, 2, 1), (1, 3, 1), (3, 4, 9), (2, 4, 10)]).unwrap();
        let s = support(&[1, 2, 3, 4], 4);
        let (f, w) = min_weight_forest(&g, &s, 2, ComponentRule::NoIsolated).unwrap();
        assert_eq!(w, 10);
        assert_eq!(f.components(), 2);
    }
}
