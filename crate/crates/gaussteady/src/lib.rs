// SPDX-License-Identifier: Apache-2.0

//! Standard-library companion to `gaussteady-core`: JSON model documents,
//! deterministic JSON/CSV output, parallel parameter sweeps and the CLI.

pub mod cli;
pub mod commands;
pub mod document;
mod error;
pub mod output;
pub mod sweep;

pub use error::{CliError, EXIT_ENGINEERING, EXIT_INPUT, EXIT_OK, EXIT_STABILITY};
