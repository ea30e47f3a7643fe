//! Library half of the `ecs-qfi` command-line tool: figure-data generation
//! and validation sweeps, kept separate from argument parsing so the CSV
//! output can be tested directly.

pub mod figures;
pub mod format;
pub mod validate;

/// Exit-status contract of the binary.
pub mod exit_code {
    /// Success, or a validation run in which every case passed.
    pub const OK: u8 = 0;
    /// Malformed invocation: bad flags, inconsistent parameters, empty grids.
    pub const USAGE: u8 = 1;
    /// A validation sweep ran to completion and at least one case exceeded
    /// its threshold.
    pub const VALIDATION: u8 = 2;
    /// A numerical failure: oracle cutoff rejected, non-convergence, or a
    /// solver error.
    pub const NUMERICAL: u8 = 3;
}
