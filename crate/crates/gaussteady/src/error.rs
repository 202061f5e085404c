// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use gaussteady_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_STABILITY: u8 = 2;
pub const EXIT_ENGINEERING: u8 = 3;

/// A message plus the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn input(e: impl fmt::Display) -> Self {
        Self::new(EXIT_INPUT, e.to_string())
    }

    pub fn engineering(e: impl fmt::Display) -> Self {
        Self::new(EXIT_ENGINEERING, e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotAsymptoticallyStable { .. } | Error::MarginallyStable { .. } => EXIT_STABILITY,
            _ => EXIT_INPUT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(format!("i/o: {e}"))
    }
}
