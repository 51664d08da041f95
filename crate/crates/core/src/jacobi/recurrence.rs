//! Three-term recurrence for polynomials orthonormal on (0,1) with respect
//! to u^left (1-u)^right.

use super::special::beta_ln;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Recurrence {
    /// α_n, n = 0..len
    alpha: Vec<f64>,
    /// √β_n, n = 0..=len; entry 0 unused
    sqrt_beta: Vec<f64>,
    /// q_0 = 1/√(∫ weight)
    q0: f64,
}

impl Recurrence {
    /// Coefficients sufficient to evaluate q_0..=q_`degree`.
    pub(crate) fn new(left: f64, right: f64, degree: usize) -> Result<Self> {
        check_exponent("left exponent", left)?;
        check_exponent("right exponent", right)?;
        // Reference-interval Jacobi weight (1-y)^ra (1+y)^rb with y = 2u - 1:
        // the (1+y) factor sits at u = 0, so it carries the left exponent.
        let (ra, rb) = (right, left);
        let s = ra + rb;
        let mut alpha = Vec::with_capacity(degree + 1);
        let mut sqrt_beta = Vec::with_capacity(degree + 2);
        sqrt_beta.push(0.0);
        for n in 0..=degree {
            let k = n as f64;
            let a = if n == 0 {
                (rb - ra) / (s + 2.0)
            } else {
                (rb * rb - ra * ra) / ((2.0 * k + s) * (2.0 * k + s + 2.0))
            };
            alpha.push(0.5 * (1.0 + a));

            let m = k + 1.0;
            let b = if n == 0 {
                // (n + s) cancels against (2n + s - 1) at n = 1
                4.0 * (1.0 + ra) * (1.0 + rb) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                4.0 * m * (m + ra) * (m + rb) * (m + s)
                    / ((2.0 * m + s).powi(2) * (2.0 * m + s + 1.0) * (2.0 * m + s - 1.0))
            };
            sqrt_beta.push(0.5 * b.sqrt());
        }
        let q0 = (-0.5 * beta_ln(left + 1.0, right + 1.0)?).exp();
        Ok(Recurrence {
            alpha,
            sqrt_beta,
            q0,
        })
    }

    pub(crate) fn diagonal(&self, n: usize) -> &[f64] {
        &self.alpha[..n]
    }

    pub(crate) fn off_diagonal(&self, n: usize) -> &[f64] {
        &self.sqrt_beta[1..n]
    }

    /// q_0(u)..=q_n(u) appended into `out`.
    pub(crate) fn values_into(&self, u: f64, n: usize, out: &mut Vec<f64>) {
        out.clear();
        let mut prev = 0.0;
        let mut cur = self.q0;
        out.push(cur);
        for k in 0..n {
            let next = ((u - self.alpha[k]) * cur - self.sqrt_beta[k] * prev) / self.sqrt_beta[k + 1];
            prev = cur;
            cur = next;
            out.push(cur);
        }
    }

    /// (q_n(u), q_n'(u)).
    pub(crate) fn value_and_derivative(&self, u: f64, n: usize) -> (f64, f64) {
        let (mut p_prev, mut p) = (0.0, self.q0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        for k in 0..n {
            let sb = self.sqrt_beta[k];
            let inv = 1.0 / self.sqrt_beta[k + 1];
            let p_next = ((u - self.alpha[k]) * p - sb * p_prev) * inv;
            let d_next = (p + (u - self.alpha[k]) * d - sb * d_prev) * inv;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
        (p, d)
    }
}

fn check_exponent(name: &'static str, value: f64) -> Result<()> {
    if value > -1.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "(-1, inf)",
        })
    }
}
