//! Log-gamma and log-beta.

use crate::error::{Error, Result};
use std::f64::consts::{E, PI};

// Lanczos approximation with g = 10.900511 and 11 terms (Godfrey's
// coefficients). Relative error is below 1e-15 over the positive axis
// away from the zeros of ln Γ at 1 and 2.
const LANCZOS_G: f64 = 10.900511;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
// ln(2 sqrt(e / pi))
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452223455184457816472122518527279025978;

fn lanczos_sum(shift: f64) -> f64 {
    LANCZOS_COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEFFS[0], |s, (i, &c)| s + c / (shift + i as f64))
}

/// Natural logarithm of Γ(x) for x > 0.
pub fn gamma_ln(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            name: "x",
            value: x,
            range: "(0, inf)",
        });
    }
    Ok(ln_gamma_positive(x))
}

pub(crate) fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let s = lanczos_sum(-x);
        PI.ln()
            - (PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + LANCZOS_G) / E).ln()
    } else {
        let s = lanczos_sum(x - 1.0);
        s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_G) / E).ln()
    }
}

/// Γ(x) for x > 0, through `gamma_ln`.
pub fn gamma(x: f64) -> Result<f64> {
    gamma_ln(x).map(f64::exp)
}

/// ln B(x, y) for x, y > 0.
pub fn beta_ln(x: f64, y: f64) -> Result<f64> {
    Ok(gamma_ln(x)? + gamma_ln(y)? - gamma_ln(x + y)?)
}
