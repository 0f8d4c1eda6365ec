//! Reading policies for a two-source equijoin under a uniform record-pair
//! model: simulation, exact expectations and limiting distributions.

pub mod batch;
pub mod engine;
pub mod error;
pub mod exact;
pub mod model;
pub mod rational;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use model::{Source, SourcePair};
