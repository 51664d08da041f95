//! Solving I^ϱφ = f by expanding g = I^ϑf in the (β−1,γ−1) basis and
//! differentiating termwise: ψ_m = C_m·g_{m+1}.

mod diagnostics;

pub use diagnostics::{
    b_functional, boundary_projection, boundary_sum_trace, c_tilde_estimate, mm_weight,
    mm_weighted_sums, pollard_ok, pollard_range, tail_average, tail_decay_exponent, tail_spread,
    verdict_from_traces, xi_exponent, DiagnosticOptions, Diagnostics, TailDecay, Verdict,
    VerdictParts, DEFAULT_BOUNDARY_REL_TOL, DEFAULT_MARGIN, DEFAULT_NOISE_FLOOR, MIN_FIT_MODES,
};

use crate::error::{Error, Result};
use crate::integrand::Integrand;
use crate::jacobi::{
    c_m, lp_norm_weighted_with_order, CoefficientSeries, Interval, JacobiBasis, WeightParams,
    DEFAULT_NORM_ORDER, EXPANSION_ORDER_MARGIN,
};
use crate::kernels::{kernel_in_lq, kernel_in_weighted_l2, KernelRole, SoninPair};
use crate::operators::{
    sonin_integral_of, sonin_integral_of_series, OperatorContext, DEFAULT_QUAD_ORDER,
};
use serde::{Deserialize, Serialize};

pub const DEFAULT_N_MODES: usize = 64;
pub const MIN_N_MODES: usize = 4;

/// I^ϱφ = f on `interval` with ψ sought in L_p(I,β,γ), truncated at
/// `n_modes`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub pair: SoninPair,
    pub interval: Interval,
    pub params: WeightParams,
    pub p: f64,
    pub rhs: Integrand,
    pub n_modes: usize,
}

impl ProblemSpec {
    pub fn new(
        pair: SoninPair,
        interval: Interval,
        params: WeightParams,
        p: f64,
        rhs: Integrand,
        n_modes: usize,
    ) -> Result<Self> {
        let spec = ProblemSpec {
            pair,
            interval,
            params,
            p,
            rhs,
            n_modes,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.params.beta), ("gamma", self.params.gamma)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    range: "(0, 1)",
                });
            }
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::Domain {
                name: "p",
                value: self.p,
                range: "(1, inf)",
            });
        }
        if self.n_modes < MIN_N_MODES {
            return Err(Error::Domain {
                name: "n_modes",
                value: self.n_modes as f64,
                range: "[4, inf)",
            });
        }
        if !self.pair.is_verified() {
            return Err(Error::Unverified {
                max_residual: self.pair.max_residual(),
                tolerance: f64::NAN,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Order of the inner Sonin-integral rules.
    pub quad_order: usize,
    /// Order of the rule used to expand g; default 2(N+2) + 16.
    pub expansion_order: Option<usize>,
    /// Order of the rule for L_p norms; default max(96, N + 16).
    pub norm_order: Option<usize>,
    /// Also compute ‖I^ϱψ − f − C̃ϱ(x−a)‖.
    pub corrected_residual: bool,
    pub diagnostics: DiagnosticOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            quad_order: DEFAULT_QUAD_ORDER,
            expansion_order: None,
            norm_order: None,
            corrected_residual: false,
            diagnostics: DiagnosticOptions::default(),
        }
    }
}

impl SolverOptions {
    pub fn expansion_order_for(&self, n_modes: usize) -> usize {
        self.expansion_order
            .unwrap_or(2 * (n_modes + 2) + EXPANSION_ORDER_MARGIN)
    }

    pub fn norm_order_for(&self, n_modes: usize) -> usize {
        self.norm_order
            .unwrap_or(DEFAULT_NORM_ORDER.max(n_modes + EXPANSION_ORDER_MARGIN))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// ψ_0..ψ_N at (β,γ).
    pub psi: CoefficientSeries,
    /// g_0..g_{N+1} at (β−1,γ−1).
    pub g_coeffs: CoefficientSeries,
    pub b_functional_partial_sums: Vec<f64>,
    pub mm_weighted_sums: Vec<f64>,
    pub boundary_sum_trace: Vec<f64>,
    pub c_tilde_estimate: f64,
    pub boundary_projection: f64,
    /// ‖I^ϱψ − f‖ in L₂(I,β,γ).
    pub residual_l2: f64,
    pub corrected_residual_l2: Option<f64>,
    /// ‖ψ‖ in L_p(I,β,γ).
    pub psi_lp_norm: f64,
    pub pollard_ok: Option<bool>,
    pub criterion_verdict: Verdict,
    pub tail_decay_exponent: Option<f64>,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

pub fn solve(spec: &ProblemSpec, options: &SolverOptions) -> Result<SolveReport> {
    spec.validate()?;
    let ctx = OperatorContext::new(spec.pair.clone(), spec.interval, options.quad_order)?;
    let n = spec.n_modes;
    let params = spec.params;
    let shifted_params = params.shifted()?;
    let shifted = JacobiBasis::new(spec.interval, shifted_params, n + 1)?;

    let g = sonin_integral_of(&ctx, &spec.rhs, KernelRole::Theta)?;
    let g_coeffs = shifted.expand_with_order(&g, n + 1, options.expansion_order_for(n))?;
    let psi_coeffs = (0..=n)
        .map(|m| Ok(c_m(params, m)? * g_coeffs.coeffs[m + 1]))
        .collect::<Result<Vec<f64>>>()?;
    let psi = CoefficientSeries::new(params, spec.interval, psi_coeffs)?;

    let trace = boundary_sum_trace(&g_coeffs, &shifted)?;
    let c_tilde = c_tilde_estimate(&trace);
    let norm_order = options.norm_order_for(n);
    let residual_l2 = residual_norm(&ctx, spec, &psi, 0.0, norm_order)?;
    let corrected_residual_l2 = if options.corrected_residual {
        Some(residual_norm(&ctx, spec, &psi, c_tilde, norm_order)?)
    } else {
        None
    };
    let psi_lp_norm = lp_norm_weighted_with_order(&psi.to_integrand()?, params, spec.interval, spec.p, norm_order)?;

    let diagnostics = diagnose_traces(spec, &g_coeffs, &trace, &options.diagnostics);
    let mut warnings = vec![
        "b_functional_partial_sums are computed from g = I^theta f".to_string(),
        format!(
            "theta is tested in L_2(t^k) with k = {}; the weight index is a convention",
            options.diagnostics.weighted_l2_index
        ),
    ];
    if spec.p < 2.0 {
        warnings.push("for 1 < p < 2 the verdict tests necessary conditions only".into());
        if diagnostics.pollard_ok == Some(false) {
            let (lo, hi) = diagnostics.pollard_range;
            warnings.push(format!("p = {} lies outside the Pollard window ({lo}, {hi})", spec.p));
        }
    }
    if !diagnostics.theta_in_l2.holds {
        warnings.push(format!("theta is not in L_2: {}", diagnostics.theta_in_l2.detail));
    }
    if diagnostics.boundary_ok == Some(false) {
        warnings.push(format!(
            "nonzero boundary defect: I^rho psi = f + c_tilde * rho(x - a) with c_tilde = {c_tilde:.6e}"
        ));
    }

    Ok(SolveReport {
        b_functional_partial_sums: b_functional(&g_coeffs, spec.p, diagnostics.xi, n + 1),
        mm_weighted_sums: mm_weighted_sums(&psi, params, spec.p),
        boundary_projection: boundary_projection(&trace, params, spec.interval)?,
        psi,
        g_coeffs,
        boundary_sum_trace: trace,
        c_tilde_estimate: c_tilde,
        residual_l2,
        corrected_residual_l2,
        psi_lp_norm,
        pollard_ok: diagnostics.pollard_ok,
        criterion_verdict: diagnostics.verdict,
        tail_decay_exponent: diagnostics.tail_decay.rate(),
        diagnostics,
        warnings,
    })
}

/// Recompute the diagnostics of a report, possibly with other options.
pub fn diagnose(spec: &ProblemSpec, report: &SolveReport, options: &DiagnosticOptions) -> Diagnostics {
    diagnose_traces(spec, &report.g_coeffs, &report.boundary_sum_trace, options)
}

fn diagnose_traces(
    spec: &ProblemSpec,
    g_coeffs: &CoefficientSeries,
    trace: &[f64],
    options: &DiagnosticOptions,
) -> Diagnostics {
    let (verdict, parts) = verdict_from_traces(spec.params, spec.p, spec.n_modes, g_coeffs, trace, options);
    let length = spec.interval.length();
    let necessity = spec.p < 2.0;
    Diagnostics {
        verdict,
        p: spec.p,
        xi: parts.xi,
        tail_decay: parts.tail,
        decay_test_value: parts.decay_test_value,
        decay_ok: parts.decay_ok,
        boundary_trace_average: parts.avg,
        boundary_trace_spread: parts.spread,
        boundary_tolerance: parts.tol,
        boundary_stabilized: parts.stabilized,
        boundary_ok: parts.boundary_ok,
        pollard_range: pollard_range(spec.params),
        pollard_ok: necessity.then(|| pollard_ok(spec.params, spec.p)),
        rho_in_conjugate_lq: necessity
            .then(|| kernel_in_lq(spec.pair.rho(), spec.p / (spec.p - 1.0), length)),
        theta_in_l2: kernel_in_lq(spec.pair.theta(), 2.0, length),
        theta_in_weighted_l2: kernel_in_weighted_l2(spec.pair.theta(), options.weighted_l2_index, length),
        reasons: parts.reasons,
    }
}

/// ‖I^ϱψ − f − c·ϱ(x−a)‖ in L₂(I,β,γ).
fn residual_norm(
    ctx: &OperatorContext,
    spec: &ProblemSpec,
    psi: &CoefficientSeries,
    c: f64,
    order: usize,
) -> Result<f64> {
    let a = spec.interval.a;
    let image = sonin_integral_of_series(ctx, psi, KernelRole::Rho)?;
    let mut terms = vec![(1.0, image), (-1.0, spec.rhs.anchored_at(a))];
    if c != 0.0 {
        let rho = spec.pair.rho().clone();
        terms.push((-c, Integrand::with_left_power(a, rho.nu() - 1.0, move |x| rho.regular(x - a))));
    }
    let residual = Integrand::linear_combination(&terms);
    lp_norm_weighted_with_order(&residual, spec.params, spec.interval, 2.0, order)
}

/// ‖I^ϱψ − f − C̃ϱ(x−a)‖ for a finished report.
pub fn corrected_residual_l2(spec: &ProblemSpec, report: &SolveReport, options: &SolverOptions) -> Result<f64> {
    let ctx = OperatorContext::new(spec.pair.clone(), spec.interval, options.quad_order)?;
    residual_norm(&ctx, spec, &report.psi, report.c_tilde_estimate, options.norm_order_for(spec.n_modes))
}

/// ψ as a function on the interval.
pub fn psi_integrand(report: &SolveReport) -> Result<Integrand> {
    report.psi.to_integrand()
}

#[cfg(test)]
mod tests;
