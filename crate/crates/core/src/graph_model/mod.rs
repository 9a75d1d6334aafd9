//! Weighted graph sparsity models and the other support families.

mod construction;
mod forest;
mod graph;
mod model;
mod support;

pub use construction::{build_construction_graph, feasible_designs, validate_requirements, ValidationReport, WgmParams};
pub use forest::{min_weight_forest, ComponentRule, Forest};
pub use graph::{Edge, Vertex, WeightedGraph};
pub use model::{CardinalityBound, ModelKind, SupportModel, Variant, DEFAULT_ENUMERATION_CAP};
pub use support::{binomial, supports_to_json, Support};
