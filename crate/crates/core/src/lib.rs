//! Simulation and analysis of the triangle-free random graph process.

pub mod analysis;
pub mod bits;
pub mod harness;
pub mod process;
pub mod rng;
pub mod structures;
pub mod trajectory;
pub mod ygraph;
