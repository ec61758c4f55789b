//! Config-driven experiment runner on top of `ssb-core`.
//!
//! A run takes an [`config::ExperimentConfig`], executes its sweep on a
//! bounded rayon pool and writes CSV tables, a JSON summary, optional SVG
//! plots and a manifest into the output directory.

pub mod config;
pub mod experiments;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{load_config, validate_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use run::{run, RunError, RunManifest, RunOptions, RunOutcome};

use ssb_core::eigensolve::DEFAULT_SEED;

/// Environment variable overriding the solver seed.
pub const SEED_ENV: &str = "SSB_LAB_SEED";

/// Parses a seed written in decimal or as `0x`-prefixed hexadecimal.
pub fn parse_seed(raw: &str) -> Option<u64> {
    let s = raw.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

/// The seed from [`SEED_ENV`], or the default when unset.
pub fn seed_from_env() -> Result<u64, ConfigError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => parse_seed(&v).ok_or_else(|| ConfigError::Semantic {
            field: SEED_ENV.into(),
            message: format!("`{v}` is not a decimal or 0x-prefixed hexadecimal integer"),
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}
