use super::quadrature::gauss_jacobi_rule;
use super::recurrence::Recurrence;
use super::special::ln_gamma_positive;
use crate::error::{Error, Result};
use crate::integrand::Integrand;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default highest degree of a basis.
pub const DEFAULT_MAX_DEGREE: usize = 64;
/// Quadrature points added on top of 2N when expanding N+1 coefficients.
pub const EXPANSION_ORDER_MARGIN: usize = 16;
/// Quadrature order for weighted L_p norms unless overridden.
pub const DEFAULT_NORM_ORDER: usize = 96;

// |β+γ+1| below this selects the closed-form δ₀ for β+γ+1 = 0.
const DELTA0_SPECIAL_TOL: f64 = 1e-14;

/// The open interval (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::Argument(format!(
                "interval needs finite a < b, got ({a}, {b})"
            )));
        }
        Ok(Interval { a, b })
    }

    pub fn unit() -> Self {
        Interval { a: 0.0, b: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.a) / self.length()
    }

    pub fn from_unit(&self, u: f64) -> f64 {
        self.a + self.length() * u
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}

/// Exponents of the weight ω^{β,γ}(x) = (x−a)^β (b−x)^γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub beta: f64,
    pub gamma: f64,
}

impl WeightParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("gamma", gamma)] {
            if !(v > -1.0 && v.is_finite()) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    range: "(-1, inf)",
                });
            }
        }
        Ok(WeightParams { beta, gamma })
    }

    /// (β−1, γ−1).
    pub fn shifted(&self) -> Result<Self> {
        WeightParams::new(self.beta - 1.0, self.gamma - 1.0)
    }

    pub fn max(&self) -> f64 {
        self.beta.max(self.gamma)
    }

    fn sum(&self) -> f64 {
        self.beta + self.gamma
    }
}

// 0.5·ln[(2n+β+γ+1) Γ(n+β+γ+1) / (n! Γ(n+β+1) Γ(n+γ+1))], i.e. ln δ′_n.
fn ln_unscaled_norm(params: WeightParams, n: usize) -> Result<f64> {
    let k = n as f64;
    let s = params.sum();
    let head = if n == 0 {
        if (s + 1.0).abs() < DELTA0_SPECIAL_TOL {
            // (β+γ+1)Γ(β+γ+1) → 1
            0.0
        } else {
            // (β+γ+1)Γ(β+γ+1) = Γ(β+γ+2), finite for every admissible pair
            ln_gamma_positive(s + 2.0)
        }
    } else {
        if k + s + 1.0 <= 0.0 {
            return Err(Error::Domain {
                name: "beta + gamma + n + 1",
                value: k + s + 1.0,
                range: "(0, inf)",
            });
        }
        (2.0 * k + s + 1.0).ln() + ln_gamma_positive(k + s + 1.0)
    };
    Ok(0.5
        * (head
            - ln_gamma_positive(k + 1.0)
            - ln_gamma_positive(k + params.beta + 1.0)
            - ln_gamma_positive(k + params.gamma + 1.0)))
}

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// The Rodrigues normalization δ_n(β,γ) on `interval`, sign (−1)ⁿ included.
pub fn delta_n(params: WeightParams, interval: Interval, n: usize) -> Result<f64> {
    let power = n as f64 + 0.5 * (params.sum() + 1.0);
    Ok(sign(n) * (ln_unscaled_norm(params, n)? - power * interval.length().ln()).exp())
}

/// δ′_n(β,γ): the interval-free, unsigned part of δ_n.
///
/// δ_n = (−1)ⁿ δ′_n / (b−a)^{n+(β+γ+1)/2}.
pub fn delta_prime_n(params: WeightParams, n: usize) -> Result<f64> {
    Ok(ln_unscaled_norm(params, n)?.exp())
}

/// C_m(β,γ) = √((m+1)(β+γ+m)), the factor in d/dx p_{m+1}^{β−1,γ−1} = C_m p_m^{β,γ}.
pub fn c_m(params: WeightParams, m: usize) -> Result<f64> {
    let k = m as f64;
    let inner = params.sum() + k;
    if inner < 0.0 {
        return Err(Error::Domain {
            name: "beta + gamma + m",
            value: inner,
            range: "[0, inf)",
        });
    }
    Ok(((k + 1.0) * inner).sqrt())
}

/// Orthonormal Jacobi system {p_n^{β,γ}} on (a,b), n = 0..=max_degree.
///
/// Values come from the three-term recurrence on the unit interval; the
/// resulting polynomials have positive leading coefficient, which is the
/// sign fixed by (−1)ⁿ in δ_n.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiBasis {
    interval: Interval,
    params: WeightParams,
    max_degree: usize,
    norm_consts: Vec<f64>,
    recurrence: Recurrence,
    // maps unit-interval orthonormal values to (a,b): L^{-(β+γ+1)/2}
    scale: f64,
}

impl JacobiBasis {
    pub fn new(interval: Interval, params: WeightParams, max_degree: usize) -> Result<Self> {
        let recurrence = Recurrence::new(params.beta, params.gamma, max_degree)?;
        let norm_consts = (0..=max_degree)
            .map(|n| delta_n(params, interval, n))
            .collect::<Result<Vec<_>>>()?;
        let scale = interval.length().powf(-0.5 * (params.sum() + 1.0));
        Ok(JacobiBasis {
            interval,
            params,
            max_degree,
            norm_consts,
            recurrence,
            scale,
        })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn params(&self) -> WeightParams {
        self.params
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// δ_n for n = 0..=max_degree.
    pub fn norm_consts(&self) -> &[f64] {
        &self.norm_consts
    }

    fn check(&self, n: usize, x: f64) -> Result<()> {
        if n > self.max_degree {
            return Err(Error::Argument(format!(
                "degree {n} exceeds basis max_degree {}",
                self.max_degree
            )));
        }
        if !self.interval.contains(x) {
            return Err(Error::Domain {
                name: "x",
                value: x,
                range: "[a, b]",
            });
        }
        Ok(())
    }

    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        self.check(n, x)?;
        Ok(self.eval_unchecked(n, x))
    }

    pub(crate) fn eval_unchecked(&self, n: usize, x: f64) -> f64 {
        let (q, _) = self
            .recurrence
            .value_and_derivative(self.interval.to_unit(x), n);
        self.scale * q
    }

    /// p_0(x)..=p_n(x).
    pub fn eval_all(&self, n: usize, x: f64) -> Result<Vec<f64>> {
        self.check(n, x)?;
        let mut out = Vec::with_capacity(n + 1);
        self.eval_all_into(n, x, &mut out);
        Ok(out)
    }

    pub(crate) fn eval_all_into(&self, n: usize, x: f64, out: &mut Vec<f64>) {
        self.recurrence
            .values_into(self.interval.to_unit(x), n, out);
        for v in out.iter_mut() {
            *v *= self.scale;
        }
    }

    /// p_n′(x) from the differentiated recurrence.
    pub fn eval_deriv(&self, n: usize, x: f64) -> Result<f64> {
        self.check(n, x)?;
        Ok(self.eval_deriv_unchecked(n, x))
    }

    pub(crate) fn eval_deriv_unchecked(&self, n: usize, x: f64) -> f64 {
        let (_, dq) = self
            .recurrence
            .value_and_derivative(self.interval.to_unit(x), n);
        self.scale * dq / self.interval.length()
    }

    /// p_n(a), from the closed form
    /// (−1)ⁿ L^{−(β+γ+1)/2} / Γ(β+1) · √((2n+β+γ+1) Γ(n+β+1) Γ(n+β+γ+1) / (n! Γ(n+γ+1))),
    /// which is δ′_n (β+1)_n in terms of the normalization.
    /// The recurrence is not used at the endpoint.
    pub fn endpoint_value(&self, n: usize) -> Result<f64> {
        if n > self.max_degree {
            return Err(Error::Argument(format!(
                "degree {n} exceeds basis max_degree {}",
                self.max_degree
            )));
        }
        let k = n as f64;
        let b = self.params.beta;
        let ln_rising = ln_gamma_positive(k + b + 1.0) - ln_gamma_positive(b + 1.0);
        Ok(sign(n) * self.scale * (ln_unscaled_norm(self.params, n)? + ln_rising).exp())
    }

    /// Coefficients c_0..=c_n of f with the default quadrature order 2n+16.
    pub fn expand(&self, f: &Integrand, n: usize) -> Result<CoefficientSeries> {
        self.expand_with_order(f, n, 2 * n + EXPANSION_ORDER_MARGIN)
    }

    /// c_k = ∫ f p_k ω dx, k = 0..=n, by an `order`-point Gauss–Jacobi rule
    /// whose left exponent absorbs f's declared power at a.
    pub fn expand_with_order(
        &self,
        f: &Integrand,
        n: usize,
        order: usize,
    ) -> Result<CoefficientSeries> {
        if n > self.max_degree {
            return Err(Error::Argument(format!(
                "{} coefficients requested from a basis of max_degree {}",
                n + 1,
                self.max_degree
            )));
        }
        let a = self.interval.a;
        let mu = f.exponent_at(a);
        let rule = gauss_jacobi_rule(self.params.beta + mu, self.params.gamma, order)?;
        let length = self.interval.length();
        let prefactor = length.powf(self.params.sum() + 1.0 + mu);

        let xs: Vec<f64> = rule.nodes().iter().map(|&u| self.interval.from_unit(u)).collect();
        let samples: Vec<f64> = xs.par_iter().map(|&x| f.reduced_at(a, x)).collect();
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                at: xs[i],
                context: "expansion integrand".into(),
            });
        }

        let mut coeffs = vec![0.0; n + 1];
        let mut values = Vec::with_capacity(n + 1);
        for ((&x, &w), &h) in xs.iter().zip(rule.weights()).zip(&samples) {
            self.eval_all_into(n, x, &mut values);
            let wh = w * h;
            for (c, p) in coeffs.iter_mut().zip(&values) {
                *c += wh * p;
            }
        }
        for c in coeffs.iter_mut() {
            *c *= prefactor;
        }
        CoefficientSeries::new(self.params, self.interval, coeffs)
    }

    /// Σ c_k p_k(x).
    pub fn synthesize(&self, series: &CoefficientSeries, x: f64) -> Result<f64> {
        self.check_compatible(series)?;
        if series.coeffs.is_empty() {
            return Ok(0.0);
        }
        let values = self.eval_all(series.coeffs.len() - 1, x)?;
        Ok(series.coeffs.iter().zip(&values).map(|(c, p)| c * p).sum())
    }

    pub(crate) fn synthesize_unchecked(&self, coeffs: &[f64], x: f64, buf: &mut Vec<f64>) -> f64 {
        if coeffs.is_empty() {
            return 0.0;
        }
        self.eval_all_into(coeffs.len() - 1, x, buf);
        coeffs.iter().zip(buf.iter()).map(|(c, p)| c * p).sum()
    }

    /// Σ c_k p_k′(x).
    pub fn synthesize_deriv(&self, series: &CoefficientSeries, x: f64) -> Result<f64> {
        self.check_compatible(series)?;
        let mut acc = 0.0;
        for (k, c) in series.coeffs.iter().enumerate() {
            acc += c * self.eval_deriv(k, x)?;
        }
        Ok(acc)
    }

    fn check_compatible(&self, series: &CoefficientSeries) -> Result<()> {
        if series.params != self.params || series.interval != self.interval {
            return Err(Error::Mismatch(format!(
                "series at (β,γ)=({}, {}) on ({}, {}) used with basis at ({}, {}) on ({}, {})",
                series.params.beta,
                series.params.gamma,
                series.interval.a,
                series.interval.b,
                self.params.beta,
                self.params.gamma,
                self.interval.a,
                self.interval.b
            )));
        }
        if series.coeffs.len() > self.max_degree + 1 {
            return Err(Error::Argument(format!(
                "series of length {} exceeds basis max_degree {}",
                series.coeffs.len(),
                self.max_degree
            )));
        }
        Ok(())
    }
}

/// Jacobi coefficients tagged with the basis they belong to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeries {
    pub params: WeightParams,
    pub interval: Interval,
    pub coeffs: Vec<f64>,
}

impl CoefficientSeries {
    pub fn new(params: WeightParams, interval: Interval, coeffs: Vec<f64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Argument(format!("coefficient {i} is not finite")));
        }
        Ok(CoefficientSeries {
            params,
            interval,
            coeffs,
        })
    }

    pub fn zeros(params: WeightParams, interval: Interval, len: usize) -> Self {
        CoefficientSeries {
            params,
            interval,
            coeffs: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Euclidean norm of the coefficients, equal to the weighted L₂ norm
    /// of the synthesized function.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// The partial sum as a function on the interval.
    pub fn to_integrand(&self) -> Result<Integrand> {
        let basis = JacobiBasis::new(
            self.interval,
            self.params,
            self.coeffs.len().saturating_sub(1),
        )?;
        let coeffs = self.coeffs.clone();
        Ok(Integrand::new(move |x| {
            let mut buf = Vec::with_capacity(coeffs.len());
            basis.synthesize_unchecked(&coeffs, x, &mut buf)
        }))
    }
}

/// (∫ |f|^p ω^{β,γ} dx)^{1/p} with the default order.
pub fn lp_norm_weighted(
    f: &Integrand,
    params: WeightParams,
    interval: Interval,
    p: f64,
) -> Result<f64> {
    lp_norm_weighted_with_order(f, params, interval, p, DEFAULT_NORM_ORDER)
}

pub fn lp_norm_weighted_with_order(
    f: &Integrand,
    params: WeightParams,
    interval: Interval,
    p: f64,
    order: usize,
) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain {
            name: "p",
            value: p,
            range: "[1, inf)",
        });
    }
    let a = interval.a;
    let mu = f.exponent_at(a);
    let left = params.beta + p * mu;
    if left <= -1.0 {
        return Err(Error::Argument(format!(
            "|f|^p ω is not integrable at a: exponent β + pμ = {left}"
        )));
    }
    let rule = gauss_jacobi_rule(left, params.gamma, order)?;
    let length = interval.length();
    let xs: Vec<f64> = rule.nodes().iter().map(|&u| interval.from_unit(u)).collect();
    let samples: Vec<f64> = xs.par_iter().map(|&x| f.reduced_at(a, x)).collect();
    let mut acc = 0.0;
    for ((&x, &w), &h) in xs.iter().zip(rule.weights()).zip(&samples) {
        if !h.is_finite() {
            return Err(Error::Evaluation {
                at: x,
                context: "L_p norm integrand".into(),
            });
        }
        acc += w * h.abs().powf(p);
    }
    let integral = length.powf(params.beta + params.gamma + 1.0 + p * mu) * acc;
    Ok(integral.powf(1.0 / p))
}
