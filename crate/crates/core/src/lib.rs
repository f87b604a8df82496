//! Dataset effectiveness measurement for graph-classification benchmarks and
//! synthesis of benchmark datasets whose property/label correlation is set by
//! construction.

pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod regression;
pub mod sampler;
pub mod seed;
pub mod synth;

pub use error::{Error, ErrorClass, Result};
pub use graph::{Graph, PropertyName, PropertySequence, PropertyVector};
