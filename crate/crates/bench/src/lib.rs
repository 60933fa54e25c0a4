//! Benchmark harness for the `ridgelab` de-noisers: synthetic ridge
//! fixtures, bench configs, CSV/JSON reports and the command-line front end.

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod synth;

pub use config::{BenchConfig, InputSource};
pub use error::BenchError;
pub use report::{BenchReport, BenchRow};
pub use runner::{run_bench, RunOptions};
pub use synth::SynthSpec;
