//! Library half of the `abel-sonin` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod expr;
pub mod run;

pub use error::CliError;
