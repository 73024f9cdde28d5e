//! Configuration, orchestration and output for the `micropolar` binary.

pub mod config;
pub mod run;

pub use config::{apply_override, parse_config, parse_config_with, ConfigError, Experiment, RunConfig};
pub use run::{run, Outcome};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "MICROPOLAR_THREADS";

/// Reads [`THREADS_ENV`]; `None` when unset, an error when not a positive integer.
pub fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        },
    }
}
