//! Simulation and verification of entanglement-assisted Deutsch-Jozsa style
//! algorithms: the classic single-function test, the multi-function variant
//! with an entangled answer register, a two-function extension on n-bit
//! inputs, and a noisy reproduction of a three-qubit hardware experiment.

pub mod algorithms;
pub mod analysis;
pub mod cli;
pub mod error;
pub mod noise;
pub mod oracles;
pub mod sim;

pub use error::{Error, Result};
