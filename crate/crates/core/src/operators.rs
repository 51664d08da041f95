//! The Sonin integral I^ϱ f(x) = ∫ₐˣ ϱ(x−t) f(t) dt and the Sonin
//! derivative D^ϑ on polynomials.
//!
//! With t = x − (x−a)u the kernel singularity moves to u = 0 and a declared
//! power (t−a)^μ of the integrand to u = 1:
//!
//! I f(x) = (x−a)^{ν+μ} ∫₀¹ u^{ν−1}(1−u)^μ r((x−a)u) h(x−(x−a)u) du,
//!
//! so the result again has the form (x−a)^{ν+μ}·smooth, which is how
//! `sonin_integral_of` returns it.

use crate::error::{Error, Result};
use crate::integrand::Integrand;
use crate::jacobi::{
    c_m, lp_norm_weighted_with_order, CoefficientSeries, Interval, JacobiBasis, QuadratureRule,
    RuleCache, WeightParams,
};
use crate::kernels::{KernelRole, SoninKernel, SoninPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub const MIN_QUAD_ORDER: usize = 16;
pub const DEFAULT_QUAD_ORDER: usize = 64;

#[derive(Debug)]
struct ContextInner {
    pair: SoninPair,
    interval: Interval,
    quad_order: usize,
    rules: RuleCache,
}

/// A verified pair on an interval plus the inner quadrature order.
/// Cheap to clone; quadrature rules are cached and shared.
#[derive(Debug, Clone)]
pub struct OperatorContext {
    inner: Arc<ContextInner>,
}

impl OperatorContext {
    pub fn new(pair: SoninPair, interval: Interval, quad_order: usize) -> Result<Self> {
        if quad_order < MIN_QUAD_ORDER {
            return Err(Error::Argument(format!(
                "quad_order {quad_order} is below the minimum {MIN_QUAD_ORDER}"
            )));
        }
        if !pair.is_verified() {
            return Err(Error::Unverified {
                max_residual: pair.max_residual(),
                tolerance: f64::NAN,
            });
        }
        if pair.verified_length() < interval.length() * (1.0 - 1e-12) {
            return Err(Error::Argument(format!(
                "pair verified on (0, {}) but the interval has length {}",
                pair.verified_length(),
                interval.length()
            )));
        }
        Ok(OperatorContext {
            inner: Arc::new(ContextInner {
                pair,
                interval,
                quad_order,
                rules: RuleCache::new(),
            }),
        })
    }

    pub fn pair(&self) -> &SoninPair {
        &self.inner.pair
    }

    pub fn interval(&self) -> Interval {
        self.inner.interval
    }

    pub fn quad_order(&self) -> usize {
        self.inner.quad_order
    }

    pub fn kernel(&self, role: KernelRole) -> &SoninKernel {
        self.inner.pair.kernel(role)
    }

    pub fn rule(&self, left: f64, right: f64, order: usize) -> Result<Arc<QuadratureRule>> {
        self.inner.rules.get(left, right, order)
    }

    fn check_basis(&self, basis: &JacobiBasis) -> Result<()> {
        if basis.interval() != self.interval() {
            return Err(Error::Mismatch(format!(
                "basis on ({}, {}) used with operators on ({}, {})",
                basis.interval().a,
                basis.interval().b,
                self.interval().a,
                self.interval().b
            )));
        }
        Ok(())
    }

    fn check_point(&self, x: f64) -> Result<()> {
        let iv = self.interval();
        if !(x > iv.a && x <= iv.b) {
            return Err(Error::Domain {
                name: "x",
                value: x,
                range: "(a, b]",
            });
        }
        Ok(())
    }
}

// Σ wᵢ r((x−a)uᵢ) h(x − (x−a)uᵢ)
fn convolution_sum(
    rule: &QuadratureRule,
    kernel: &SoninKernel,
    f: &Integrand,
    a: f64,
    x: f64,
) -> f64 {
    let d = x - a;
    rule.integrate(|u| kernel.regular(d * u) * f.reduced_at(a, x - d * u))
}

/// I f(x) with the kernel selected by `which`.
pub fn apply_sonin_integral(
    ctx: &OperatorContext,
    f: &Integrand,
    x: f64,
    which: KernelRole,
) -> Result<f64> {
    ctx.check_point(x)?;
    let a = ctx.interval().a;
    let kernel = ctx.kernel(which);
    let mu = f.exponent_at(a);
    let rule = ctx.rule(kernel.nu() - 1.0, mu, ctx.quad_order())?;
    let d = x - a;
    let mut failed = None;
    let sum = rule.integrate(|u| {
        let t = x - d * u;
        let v = kernel.regular(d * u) * f.reduced_at(a, t);
        if !v.is_finite() && failed.is_none() {
            failed = Some(t);
        }
        v
    });
    if let Some(t) = failed {
        return Err(Error::Evaluation {
            at: t,
            context: format!("Sonin integral with {} at x = {x}", kernel.name()),
        });
    }
    Ok(d.powf(kernel.nu() + mu) * sum)
}

/// I f as a function: anchored at a with power ν+μ. The smooth part is the
/// quadrature sum, evaluated lazily; failures surface as NaN.
pub fn sonin_integral_of(ctx: &OperatorContext, f: &Integrand, which: KernelRole) -> Result<Integrand> {
    let a = ctx.interval().a;
    let kernel = ctx.kernel(which).clone();
    let mu = f.exponent_at(a);
    let rule = ctx.rule(kernel.nu() - 1.0, mu, ctx.quad_order())?;
    let f = f.clone();
    Ok(Integrand::with_left_power(a, kernel.nu() + mu, move |x| {
        convolution_sum(&rule, &kernel, &f, a, x)
    }))
}

/// I applied to a Jacobi partial sum.
pub fn sonin_integral_of_series(
    ctx: &OperatorContext,
    series: &CoefficientSeries,
    which: KernelRole,
) -> Result<Integrand> {
    if series.interval != ctx.interval() {
        return Err(Error::Mismatch("series interval differs from operator interval".into()));
    }
    sonin_integral_of(ctx, &series.to_integrand()?, which)
}

fn basis_element(basis: &JacobiBasis, n: usize) -> Integrand {
    let b = basis.clone();
    Integrand::new(move |x| b.eval_unchecked(n, x))
}

fn basis_derivative(basis: &JacobiBasis, n: usize) -> Integrand {
    let b = basis.clone();
    Integrand::new(move |x| b.eval_deriv_unchecked(n, x))
}

/// D^ϑ p_n(x) = p_n(a) ϑ(x−a) + ∫ₐˣ ϑ(x−t) p_n′(t) dt.
pub fn apply_sonin_derivative_poly(
    ctx: &OperatorContext,
    basis: &JacobiBasis,
    n: usize,
    x: f64,
) -> Result<f64> {
    ctx.check_basis(basis)?;
    ctx.check_point(x)?;
    let theta = ctx.kernel(KernelRole::Theta);
    let pa = basis.endpoint_value(n)?;
    let tail = apply_sonin_integral(ctx, &basis_derivative(basis, n), x, KernelRole::Theta)?;
    Ok(pa * theta.eval(x - ctx.interval().a) + tail)
}

/// D^ϑ p_n as a function with power ν_ϑ − 1 at a:
/// smooth part p_n(a) r_ϑ(x−a) + (x−a)·J(x), J from the convolution with p_n′.
pub fn sonin_derivative_poly_of(
    ctx: &OperatorContext,
    basis: &JacobiBasis,
    n: usize,
) -> Result<Integrand> {
    ctx.check_basis(basis)?;
    if n > basis.max_degree() {
        return Err(Error::Argument(format!("degree {n} exceeds basis max_degree")));
    }
    let a = ctx.interval().a;
    let theta = ctx.kernel(KernelRole::Theta).clone();
    let pa = basis.endpoint_value(n)?;
    let deriv = basis_derivative(basis, n);
    let rule = ctx.rule(theta.nu() - 1.0, 0.0, ctx.quad_order())?;
    Ok(Integrand::with_left_power(a, theta.nu() - 1.0, move |x| {
        let d = x - a;
        pa * theta.regular(d) + d * convolution_sum(&rule, &theta, &deriv, a, x)
    }))
}

/// D^ϑ(I^ϱ p_n)(x), evaluated as p_n(a)·I^ϑ[ϱ(·−a)](x) + I^ϑ I^ϱ p_n′(x).
/// F = I^ϱ p_n vanishes at a and F′ = p_n(a)ϱ(·−a) + I^ϱ p_n′, so this is
/// F(a)ϑ(x−a) + I^ϑ F′. The Sonin identity is not used.
pub fn sonin_round_trip_poly(
    ctx: &OperatorContext,
    basis: &JacobiBasis,
    n: usize,
    x: f64,
) -> Result<f64> {
    ctx.check_basis(basis)?;
    ctx.check_point(x)?;
    let a = ctx.interval().a;
    let rho = ctx.kernel(KernelRole::Rho).clone();
    let shifted_rho = Integrand::with_left_power(a, rho.nu() - 1.0, move |t| rho.regular(t - a));
    let head = apply_sonin_integral(ctx, &shifted_rho, x, KernelRole::Theta)?;
    let inner = sonin_integral_of(ctx, &basis_derivative(basis, n), KernelRole::Rho)?;
    let tail = apply_sonin_integral(ctx, &inner, x, KernelRole::Theta)?;
    Ok(basis.endpoint_value(n)? * head + tail)
}

fn require_positive_weight(params: WeightParams) -> Result<()> {
    for (name, v) in [("beta", params.beta), ("gamma", params.gamma)] {
        if !(v > 0.0) {
            return Err(Error::Domain {
                name,
                value: v,
                range: "(0, inf)",
            });
        }
    }
    Ok(())
}

fn gram_order(ctx: &OperatorContext, size: usize) -> usize {
    ctx.quad_order().max(size + 8)
}

/// ∫ₐᵇ p_m (D^ϑ p_n) ω^{β,γ} dx.
pub fn dtheta_gram(ctx: &OperatorContext, basis: &JacobiBasis, m: usize, n: usize) -> Result<f64> {
    require_positive_weight(basis.params())?;
    let d = sonin_derivative_poly_of(ctx, basis, n)?;
    let column = basis.expand_with_order(&d, m, gram_order(ctx, m + n))?;
    Ok(column.coeffs[m])
}

/// The same entry through integration by parts:
/// C_m ∫ₐᵇ p_{m+1}^{β−1,γ−1} (I^ϑ p_n) ω^{β−1,γ−1} dx.
pub fn dtheta_gram_by_parts(
    ctx: &OperatorContext,
    basis: &JacobiBasis,
    m: usize,
    n: usize,
) -> Result<f64> {
    require_positive_weight(basis.params())?;
    ctx.check_basis(basis)?;
    let params = basis.params();
    let shifted = JacobiBasis::new(basis.interval(), params.shifted()?, m + 1)?;
    let g = sonin_integral_of(ctx, &basis_element(basis, n), KernelRole::Theta)?;
    let column = shifted.expand_with_order(&g, m + 1, gram_order(ctx, m + n + 1))?;
    Ok(c_m(params, m)? * column.coeffs[m + 1])
}

/// (A_{mn}) for m, n < size, one expansion per column.
pub fn dtheta_gram_matrix(
    ctx: &OperatorContext,
    basis: &JacobiBasis,
    size: usize,
) -> Result<Vec<Vec<f64>>> {
    require_positive_weight(basis.params())?;
    if size == 0 {
        return Ok(Vec::new());
    }
    let mut rows = vec![vec![0.0; size]; size];
    for n in 0..size {
        let d = sonin_derivative_poly_of(ctx, basis, n)?;
        let column = basis.expand_with_order(&d, size - 1, gram_order(ctx, 2 * size))?;
        for m in 0..size {
            rows[m][n] = column.coeffs[m];
        }
    }
    Ok(rows)
}

/// Right-hand side of the integration-by-parts identity for the same grid.
pub fn dtheta_gram_by_parts_matrix(
    ctx: &OperatorContext,
    basis: &JacobiBasis,
    size: usize,
) -> Result<Vec<Vec<f64>>> {
    require_positive_weight(basis.params())?;
    ctx.check_basis(basis)?;
    if size == 0 {
        return Ok(Vec::new());
    }
    let params = basis.params();
    let shifted = JacobiBasis::new(basis.interval(), params.shifted()?, size)?;
    let mut rows = vec![vec![0.0; size]; size];
    for n in 0..size {
        let g = sonin_integral_of(ctx, &basis_element(basis, n), KernelRole::Theta)?;
        let column = shifted.expand_with_order(&g, size, gram_order(ctx, 2 * size + 1))?;
        for m in 0..size {
            rows[m][n] = c_m(params, m)? * column.coeffs[m + 1];
        }
    }
    Ok(rows)
}

fn random_series(
    rng: &mut ChaCha8Rng,
    params: WeightParams,
    interval: Interval,
    degree: usize,
) -> Result<CoefficientSeries> {
    loop {
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if coeffs.iter().any(|&c| c != 0.0) {
            return CoefficientSeries::new(params, interval, coeffs);
        }
    }
}

/// max over `trials` random polynomials f of degree ≤ `degree` of
/// ‖I^ϑ f‖ / ‖f‖ in L₂(I,β,γ): a lower bound for the operator norm.
pub fn empirical_operator_bound(
    ctx: &OperatorContext,
    params: WeightParams,
    trials: usize,
    degree: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = 2 * degree + 32;
    let mut best = 0.0f64;
    for _ in 0..trials {
        let series = random_series(&mut rng, params, ctx.interval(), degree)?;
        let f = series.to_integrand()?;
        let image = sonin_integral_of(ctx, &f, KernelRole::Theta)?;
        let num = lp_norm_weighted_with_order(&image, params, ctx.interval(), 2.0, order)?;
        let den = lp_norm_weighted_with_order(&f, params, ctx.interval(), 2.0, order)?;
        best = best.max(num / den);
    }
    Ok(best)
}

/// max over random f and m ≤ `max_m` of
/// |∫ p_m^{β−1,γ−1} (I^ϑ f) ω^{β−1,γ−1} dx| / ‖f‖_{L₂(I,β,γ)}.
pub fn empirical_projection_bound(
    ctx: &OperatorContext,
    params: WeightParams,
    trials: usize,
    degree: usize,
    max_m: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let shifted = JacobiBasis::new(ctx.interval(), params.shifted()?, max_m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = 2 * (degree + max_m) + 32;
    let mut best = 0.0f64;
    for _ in 0..trials {
        let series = random_series(&mut rng, params, ctx.interval(), degree)?;
        let f = series.to_integrand()?;
        let image = sonin_integral_of(ctx, &f, KernelRole::Theta)?;
        let proj = shifted.expand_with_order(&image, max_m, order)?;
        let den = series.l2_norm();
        let peak = proj.coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        best = best.max(peak / den);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::gamma;
    use crate::kernels::{cosine_pair, riemann_liouville_pair};

    fn rl_ctx(alpha: f64) -> OperatorContext {
        OperatorContext::new(riemann_liouville_pair(alpha).unwrap(), Interval::unit(), 64).unwrap()
    }

    // I^α (t−a)^k = Γ(k+1)/Γ(k+1+α) (x−a)^{k+α}
    fn rl_power_oracle(alpha: f64, k: f64, x: f64) -> f64 {
        gamma(k + 1.0).unwrap() / gamma(k + 1.0 + alpha).unwrap() * x.powf(k + alpha)
    }

    #[test]
    fn integral_examples() {
        let ctx = rl_ctx(0.5);
        let one = apply_sonin_integral(&ctx, &Integrand::new(|_| 1.0), 1.0, KernelRole::Rho).unwrap();
        assert!((one - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
        assert!((one - rl_power_oracle(0.5, 0.0, 1.0)).abs() < 1e-14);
        let lin = apply_sonin_integral(&ctx, &Integrand::new(|t| t), 1.0, KernelRole::Rho).unwrap();
        assert!((lin - 0.7522527781).abs() < 1e-10);
        let zero = apply_sonin_integral(&ctx, &Integrand::zero(), 0.4, KernelRole::Rho).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn integral_of_declared_power_matches_oracle() {
        let ctx = rl_ctx(0.3);
        let f = Integrand::with_left_power(0.0, 0.2, |_| 1.0);
        for &x in &[0.1, 0.5, 0.93] {
            let got = apply_sonin_integral(&ctx, &f, x, KernelRole::Rho).unwrap();
            assert!((got - rl_power_oracle(0.3, 0.2, x)).abs() < 1e-13);
            let lazy = sonin_integral_of(&ctx, &f, KernelRole::Rho).unwrap();
            assert!((lazy.eval(x) - got).abs() < 1e-15);
            assert!((lazy.left_exponent() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn integral_domain_and_evaluation_errors() {
        let ctx = rl_ctx(0.5);
        let one = Integrand::new(|_| 1.0);
        assert!(matches!(apply_sonin_integral(&ctx, &one, 0.0, KernelRole::Rho), Err(Error::Domain { .. })));
        let bad = Integrand::new(|t| if t < 0.5 { f64::NAN } else { 1.0 });
        assert!(matches!(
            apply_sonin_integral(&ctx, &bad, 0.9, KernelRole::Rho),
            Err(Error::Evaluation { .. })
        ));
    }

    #[test]
    fn context_rejects_unverified_pair_and_low_order() {
        use crate::kernels::{SoninKernel, DEFAULT_SONIN_TOL};
        let k = SoninKernel::new("one", 0.5, |_| 1.0).unwrap();
        let pair = SoninPair::verify(k.clone(), k, 1.0, DEFAULT_SONIN_TOL).unwrap();
        assert!(matches!(
            OperatorContext::new(pair, Interval::unit(), 64),
            Err(Error::Unverified { .. })
        ));
        assert!(OperatorContext::new(riemann_liouville_pair(0.5).unwrap(), Interval::unit(), 8).is_err());
        let short = cosine_pair(1.0, 0.5).unwrap();
        assert!(OperatorContext::new(short, Interval::unit(), 64).is_err());
    }

    #[test]
    fn linearity() {
        let ctx = rl_ctx(0.4);
        let f = Integrand::new(|t: f64| (3.0 * t).sin());
        let g = Integrand::new(|t: f64| t.exp());
        let combo = Integrand::linear_combination(&[(2.5, f.clone()), (-0.7, g.clone())]);
        let x = 0.77;
        let lhs = apply_sonin_integral(&ctx, &combo, x, KernelRole::Rho).unwrap();
        let rhs = 2.5 * apply_sonin_integral(&ctx, &f, x, KernelRole::Rho).unwrap()
            - 0.7 * apply_sonin_integral(&ctx, &g, x, KernelRole::Rho).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn quadrature_converges_on_smooth_integrands() {
        let f = Integrand::new(|t: f64| (2.0 * t).cos() + t * t);
        for &alpha in &[0.3, 0.7] {
            let lo = OperatorContext::new(riemann_liouville_pair(alpha).unwrap(), Interval::unit(), 32).unwrap();
            let hi = OperatorContext::new(riemann_liouville_pair(alpha).unwrap(), Interval::unit(), 64).unwrap();
            for &x in &[0.2, 0.6, 1.0] {
                let a = apply_sonin_integral(&lo, &f, x, KernelRole::Theta).unwrap();
                let b = apply_sonin_integral(&hi, &f, x, KernelRole::Theta).unwrap();
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn derivative_of_constant_is_theta() {
        let ctx = rl_ctx(0.3);
        let basis = JacobiBasis::new(Interval::unit(), WeightParams::new(0.0, 0.0).unwrap(), 3).unwrap();
        for &x in &[0.05, 0.4, 0.99] {
            let d = apply_sonin_derivative_poly(&ctx, &basis, 0, x).unwrap();
            let want = x.powf(-0.3) / gamma(0.7).unwrap();
            assert!((d - want).abs() < 1e-13 * want);
        }
    }

    #[test]
    fn derivative_blows_up_at_left_end() {
        let ctx = rl_ctx(0.5);
        let basis = JacobiBasis::new(Interval::unit(), WeightParams::new(0.5, 0.5).unwrap(), 3).unwrap();
        let pa = basis.endpoint_value(2).unwrap();
        let (x1, x2) = (1e-6, 1e-8);
        let r = apply_sonin_derivative_poly(&ctx, &basis, 2, x2).unwrap()
            / apply_sonin_derivative_poly(&ctx, &basis, 2, x1).unwrap();
        // first term dominates: ratio → (x2/x1)^{-1/2}
        assert!(pa != 0.0);
        assert!((r / 10.0 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn lazy_derivative_matches_pointwise() {
        let ctx = rl_ctx(0.5);
        let basis = JacobiBasis::new(Interval::unit(), WeightParams::new(0.5, 0.5).unwrap(), 6).unwrap();
        let lazy = sonin_derivative_poly_of(&ctx, &basis, 5).unwrap();
        for &x in &[0.1, 0.5, 0.9] {
            let direct = apply_sonin_derivative_poly(&ctx, &basis, 5, x).unwrap();
            assert!((lazy.eval(x) - direct).abs() < 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn round_trip_recovers_polynomial() {
        let ctx = rl_ctx(0.5);
        let basis = JacobiBasis::new(Interval::unit(), WeightParams::new(0.5, 0.5).unwrap(), 10).unwrap();
        for n in [0usize, 3, 10] {
            for &x in &[0.07, 0.45, 0.96] {
                let got = sonin_round_trip_poly(&ctx, &basis, n, x).unwrap();
                let want = basis.eval(n, x).unwrap();
                assert!((got - want).abs() < 1e-6, "n {n} x {x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn integral_inverts_derivative_on_polynomials() {
        // I^ϱ D^ϑ p_n = p_n, the commuted round trip
        let ctx = rl_ctx(0.5);
        let basis = JacobiBasis::new(Interval::unit(), WeightParams::new(0.5, 0.5).unwrap(), 8).unwrap();
        for n in [1usize, 4, 8] {
            let d = sonin_derivative_poly_of(&ctx, &basis, n).unwrap();
            for &x in &[0.2, 0.7] {
                let got = apply_sonin_integral(&ctx, &d, x, KernelRole::Rho).unwrap();
                assert!((got - basis.eval(n, x).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gram_identity_single_entries() {
        let ctx = rl_ctx(0.5);
        let basis = JacobiBasis::new(Interval::unit(), WeightParams::new(0.5, 0.5).unwrap(), 6).unwrap();
        for m in 0..=5 {
            for n in 0..=5 {
                let lhs = dtheta_gram(&ctx, &basis, m, n).unwrap();
                let rhs = dtheta_gram_by_parts(&ctx, &basis, m, n).unwrap();
                assert!((lhs - rhs).abs() < 1e-6, "({m},{n}) {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn gram_requires_positive_weights() {
        let ctx = rl_ctx(0.5);
        let basis = JacobiBasis::new(Interval::unit(), WeightParams::new(-0.2, 0.5).unwrap(), 3).unwrap();
        assert!(matches!(dtheta_gram(&ctx, &basis, 0, 0), Err(Error::Domain { .. })));
    }

    #[test]
    fn gram_identity_under_rescaling() {
        let pair = riemann_liouville_pair(0.5).unwrap();
        let iv = Interval::new(0.0, 2.0).unwrap();
        let ctx = OperatorContext::new(pair, iv, 64).unwrap();
        let basis = JacobiBasis::new(iv, WeightParams::new(0.3, 0.6).unwrap(), 3).unwrap();
        let lhs = dtheta_gram(&ctx, &basis, 0, 0).unwrap();
        let rhs = dtheta_gram_by_parts(&ctx, &basis, 0, 0).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
        // n = 0: only the p_0(a)ϑ(x−a) term. ∫ p_0 p_0 ϑ(x) x^β (2−x)^γ dx by a dense plain rule
        let p0 = basis.eval(0, 1.0).unwrap();
        let dense = crate::jacobi::gauss_jacobi_rule(0.3 - 0.5, 0.6, 200).unwrap();
        let g = 1.0 / gamma(0.5).unwrap();
        let want = 2f64.powf(0.3 - 0.5 + 0.6 + 1.0) * dense.integrate(|_| p0 * p0 * g);
        assert!((lhs - want).abs() < 1e-12);
    }

    #[test]
    fn operator_bounds_are_finite_and_scale_free() {
        let ctx = rl_ctx(0.5);
        let params = WeightParams::new(0.5, 0.5).unwrap();
        let low = empirical_operator_bound(&ctx, params, 20, 4, 7).unwrap();
        let high = empirical_operator_bound(&ctx, params, 20, 8, 7).unwrap();
        assert!(low.is_finite() && low > 0.0);
        assert!(high < 2.0 * low);
        let proj = empirical_projection_bound(&ctx, params, 10, 6, 6, 3).unwrap();
        assert!(proj.is_finite() && proj > 0.0);
        assert!(empirical_operator_bound(&ctx, params, 0, 4, 7).is_err());
    }
}
