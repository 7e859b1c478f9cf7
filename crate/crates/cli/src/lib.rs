//! Batch front end for the `rbfw` library: parse a TOML run configuration,
//! dispatch to the library and write plot-ready CSV tables.
#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail validation


pub mod config;
pub mod run;
pub mod table;

pub use config::{parse_config, parse_config_with, Command, ConfigError, Overrides, RunConfig};
pub use run::{dispatch, RunError, RunOutcome};
