//! Configuration, experiment orchestration and tab-separated output for the
//! `ffdyn` library.

pub mod config;
pub mod exec;
pub mod experiments;
pub mod selftest;
pub mod table;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use experiments::{run_experiment, Hooks, RunError, EXPERIMENTS};
pub use table::{emit_table, render_table, Num, ResultRow};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Trailing comment line of a table: tool version, experiment and config echo.
pub fn provenance(experiment: &str, cfg: &ExperimentConfig) -> String {
    format!("ffdyn {} experiment={} config={}", VERSION, experiment, cfg.echo())
}
