//! Intellectual capital accounting over contributor share graphs.
//!
//! A validated [`corpus::Corpus`] of manuscripts, contributors and share
//! assignments is turned into a shares graph, a weighted references matrix
//! and from those into capital, portfolio, market and health metrics.

pub mod analysis;
pub mod capital;
pub mod citation_weighting;
pub mod corpus;
pub mod error;
pub mod distribution;
pub mod graph_spectral;
pub mod health;
pub mod market;
pub mod measure;
pub mod portfolio;
pub mod references_graph;
pub mod shares_graph;
pub mod sparse;
pub mod stats;
pub mod synth;
pub mod taxonomy_relevancy;
pub mod time;

pub use analysis::Analysis;
pub use error::{Error, Result};
pub use measure::Measure;
