//! Coverage probabilities of metric graphs by random ball covers, computed
//! from the distribution of the Euler characteristic of the random nerve.

pub mod acceptance;
pub mod coeffs;
pub mod coverage;
pub mod error;
pub mod metric_graph;
pub mod nerve;
pub mod moments;
pub mod simplicial;
pub mod stevens;

pub use error::{Error, Result};
