//! Simulation harness: code files, decoder selection, Monte Carlo sweeps and
//! result emission. The `polarflip` binary is a thin clap front end over
//! this library; the acceptance tests drive it directly.

pub mod codefile;
pub mod decoder;
mod error;
pub mod output;
pub mod params;
pub mod sim;

pub use codefile::CodeFile;
pub use decoder::DecoderSpec;
pub use error::{HarnessError, Result};
pub use output::{emit_results, write_results, Format, ResultRow};
pub use params::{ParamsFile, ParamsSource};
pub use sim::{
    run_accuracy, run_bler, wilson_interval, CodeSource, Precision, SweepConfig, TrialRecord,
};
