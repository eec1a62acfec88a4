//! Configuration parsing, output formats and subcommands of the `thinvisc` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{CommandError, Status};
pub use config::{parse_config, read_config, CliConfig, ConfigError, Overrides};
