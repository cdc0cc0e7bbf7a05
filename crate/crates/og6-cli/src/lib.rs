//! Library side of the command-line tool: the `verify-claims` battery is
//! exposed here so integration tests can run the full acceptance criteria
//! in-process.

pub mod claims;

use clap::ValueEnum;

/// Size of the randomized batteries: `Smoke` for quick checks, `Full` for
/// the complete acceptance-scale runs.
#[derive(Clone, Copy, ValueEnum)]
pub enum Scale {
    Smoke,
    Full,
}
