//! Command-line front end: configuration parsing, fixed-format CSV and
//! key-value output, and the reproduction harness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod reproduce;

pub use error::{CliError, CliResult};
