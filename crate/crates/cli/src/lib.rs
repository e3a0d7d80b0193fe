//! Library side of the `omega` binary: config parsing, presets, commands
//! and the SVG plot emitter.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod presets;

pub use config::{parse_config, parse_game_spec, serialize_config, ConfigError, Override};
pub use error::{exit, CliError};
