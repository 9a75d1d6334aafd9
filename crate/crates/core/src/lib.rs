//! Constructive machinery behind information-theoretic sample-complexity
//! lower bounds for structured (weighted graph model) compressed sensing.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph_model`] – weighted graphs, the banded group construction, support
//!   feasibility and enumeration, cardinality bounds for WGM / tree / block /
//!   regular sparsity.
//! * [`ensembles`] – the three restricted signal families used by the bounds.
//! * [`sensing`] – Gaussian / Bernoulli designs, linear and one-bit channels.
//! * [`bounds`] – closed-form mutual-information bounds, Fano, thresholds.
//! * [`decoders`] – exhaustive ML decoders and a model-projected IHT baseline.
//! * [`harness`] – Monte Carlo error curves, exact MI oracles, lemma checks.

pub mod bounds;
pub mod decoders;
pub mod ensembles;
pub mod error;
pub mod graph_model;
pub mod harness;
pub mod sensing;
pub mod stats;

pub use error::{Error, Result};
