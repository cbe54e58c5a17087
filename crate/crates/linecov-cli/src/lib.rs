//! Benchmark harness and CLI around the `linecov` library: timed method
//! comparisons against the adaptive reference integrator, CSV reporting,
//! and dataset-driven GP prediction.

mod cli;
pub mod dataset;
pub mod harness;

pub use cli::run;
