//! Command-line surface of the TD-LHF kernel code: electron-gas sweeps,
//! the shear-modulus table, one-dimensional runs and the self-test.

// Guards such as `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod output;
pub mod selftest;
pub mod sweep;
pub mod tdlhf;

pub use error::{CliError, CliResult};
