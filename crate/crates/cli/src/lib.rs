//! Command-line front end: config loading, exit codes and one function per
//! subcommand. `main.rs` only parses arguments and dispatches.

pub mod commands;
pub mod config;
mod error;

pub use commands::{
    bench_runs, cmd_augment, cmd_baseline, cmd_bench, cmd_ingest, cmd_render, cmd_stats,
    cmd_verify, load_manifest, BenchRun, Outcome,
};
pub use config::{RunConfig, CONFIG_ENV, CONFIG_VERSION};
pub use error::{CliError, ExitCode};
