//! Orthonormal Jacobi polynomials on an interval (a,b) with weight
//! (x−a)^β (b−x)^γ, Gauss–Jacobi quadrature, and the special functions
//! behind their normalization.

mod basis;
mod quadrature;
mod recurrence;
pub mod special;

pub use basis::{
    c_m, delta_n, delta_prime_n, lp_norm_weighted, lp_norm_weighted_with_order, CoefficientSeries,
    Interval, JacobiBasis, WeightParams, DEFAULT_MAX_DEGREE, DEFAULT_NORM_ORDER,
    EXPANSION_ORDER_MARGIN,
};
pub use quadrature::{gauss_jacobi_rule, QuadratureRule, RuleCache};
pub use special::{beta_ln, gamma, gamma_ln};
