//! Spectral solution of Abel–Sonin integral equations ∫ₐˣ ϱ(x−t)φ(t)dt = f(x)
//! in weighted Lebesgue spaces, with solvability diagnostics.
//!
//! The guide in `book/` walks through the modules with runnable examples.

// NaN must fail range checks, hence `!(x > lo)` rather than `x <= lo`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod integrand;
pub mod jacobi;
pub mod kernels;
pub mod operators;
pub mod solver;

pub use error::{Error, Result};
pub use integrand::Integrand;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/jacobi.md")]
    pub mod jacobi {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    pub mod kernels {}
    #[doc = include_str!("../../../book/src/operators.md")]
    pub mod operators {}
    #[doc = include_str!("../../../book/src/solver.md")]
    pub mod solver {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    pub mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
