//! Simulation of continuous-variable graph-state networks: generators,
//! squeezing cost, homodyne measurements, entanglement and routing.

pub mod cost;
pub mod entangle;
pub mod error;
pub mod gaussian;
pub mod measure;
pub mod netgen;
pub mod rng;
pub mod routing;

pub use error::{CvnetError, Result};
