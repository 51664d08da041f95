//! Solvability diagnostics on truncated coefficient series.

use crate::error::{Error, Result};
use crate::jacobi::{beta_ln, CoefficientSeries, Interval, JacobiBasis, WeightParams};
use crate::kernels::LqCheck;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MARGIN: f64 = 0.5;
pub const DEFAULT_BOUNDARY_REL_TOL: f64 = 1e-3;
pub const DEFAULT_NOISE_FLOOR: f64 = 1e-14;
/// Fewer modes than this give an inconclusive verdict.
pub const MIN_FIT_MODES: usize = 8;

/// Partial sums Σ_{n=1..K} |c_n|^p n^ξ for K = 1..upto. `upto` is clamped
/// to the last available index.
pub fn b_functional(series: &CoefficientSeries, p: f64, xi: f64, upto: usize) -> Vec<f64> {
    let upto = upto.min(series.len().saturating_sub(1));
    let mut acc = 0.0;
    (1..=upto)
        .map(|n| {
            acc += series.coeffs[n].abs().powf(p) * (n as f64).powf(xi);
            acc
        })
        .collect()
}

/// ξ = (5/2 + max(β,γ))(p − 2) + 2.
pub fn xi_exponent(params: WeightParams, p: f64) -> f64 {
    (2.5 + params.max()) * (p - 2.0) + 2.0
}

/// M_m = m^{1/2 + max(β,γ)}.
pub fn mm_weight(params: WeightParams, m: usize) -> f64 {
    (m as f64).powf(0.5 + params.max())
}

/// Partial sums Σ_{m=1..K} |ψ_m|^p M_m^{p−2} m^{p−2}, K = 1..len−1.
pub fn mm_weighted_sums(psi: &CoefficientSeries, params: WeightParams, p: f64) -> Vec<f64> {
    let mut acc = 0.0;
    (1..psi.len())
        .map(|m| {
            let w = (mm_weight(params, m) * m as f64).powf(p - 2.0);
            acc += psi.coeffs[m].abs().powf(p) * w;
            acc
        })
        .collect()
}

/// T_K = Σ_{m≤K} g_m p_m(a) in the basis the coefficients belong to.
pub fn boundary_sum_trace(g_coeffs: &CoefficientSeries, shifted_basis: &JacobiBasis) -> Result<Vec<f64>> {
    if g_coeffs.params != shifted_basis.params() || g_coeffs.interval != shifted_basis.interval() {
        return Err(Error::Mismatch(
            "coefficients and basis have different parameters or interval".into(),
        ));
    }
    let mut acc = 0.0;
    g_coeffs
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, g)| {
            acc += g * shifted_basis.endpoint_value(m)?;
            Ok(acc)
        })
        .collect()
}

fn last_quartile(trace: &[f64]) -> &[f64] {
    let k = (trace.len() / 4).max(1).min(trace.len());
    &trace[trace.len() - k..]
}

/// Mean of the last quarter of the trace (at least one entry).
pub fn tail_average(trace: &[f64]) -> f64 {
    let q = last_quartile(trace);
    if q.is_empty() {
        return 0.0;
    }
    q.iter().sum::<f64>() / q.len() as f64
}

/// max − min over the last quarter of the trace.
pub fn tail_spread(trace: &[f64]) -> f64 {
    let q = last_quartile(trace);
    let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
    if q.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// The constant C̃ in I^ϱψ = f + C̃ ϱ(x−a). The trace converges to
/// g(a) and ∫ₐˣψ = g(x) − g(a), so C̃ = −g(a).
pub fn c_tilde_estimate(trace: &[f64]) -> f64 {
    let t = tail_average(trace);
    if t == 0.0 {
        0.0
    } else {
        -t
    }
}

/// √B(β,γ)·(b−a)^{(β+γ−1)/2}·T_avg, the tail-averaged trace in units of
/// 1/p₀^{β−1,γ−1}.
pub fn boundary_projection(trace: &[f64], params: WeightParams, interval: Interval) -> Result<f64> {
    let pref = (0.5 * beta_ln(params.beta, params.gamma)?).exp()
        * interval.length().powf(0.5 * (params.beta + params.gamma - 1.0));
    Ok(pref * tail_average(trace))
}

/// (4 max{(β+1)/(2β+3), (γ+1)/(2γ+3)}, 4 min{(β+1)/(2β+1), (γ+1)/(2γ+1)}).
/// For β or γ ≤ −1/2 the upper bound is +∞.
pub fn pollard_range(params: WeightParams) -> (f64, f64) {
    let lower = |e: f64| 4.0 * (e + 1.0) / (2.0 * e + 3.0);
    let upper = |e: f64| {
        if 2.0 * e + 1.0 <= 0.0 {
            f64::INFINITY
        } else {
            4.0 * (e + 1.0) / (2.0 * e + 1.0)
        }
    };
    (
        lower(params.beta).max(lower(params.gamma)),
        upper(params.beta).min(upper(params.gamma)),
    )
}

pub fn pollard_ok(params: WeightParams, p: f64) -> bool {
    let (lo, hi) = pollard_range(params);
    lo < p && p < hi
}

/// Fitted algebraic decay |c_n| ~ n^{−rate} of a coefficient tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailDecay {
    /// Every tail coefficient is below the noise floor.
    Finite,
    Insufficient { points: usize },
    Fitted { rate: f64, points: usize },
}

impl TailDecay {
    pub fn rate(&self) -> Option<f64> {
        match self {
            TailDecay::Fitted { rate, .. } => Some(*rate),
            _ => None,
        }
    }
}

/// Least-squares slope of ln|c_n| against ln n over the last half of the
/// coefficients, skipping n = 0 and |c_n| < noise_floor·max|c|.
pub fn tail_decay_exponent(coeffs: &[f64], noise_floor: f64) -> TailDecay {
    let peak = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if peak == 0.0 {
        return TailDecay::Finite;
    }
    let floor = noise_floor * peak;
    let start = (coeffs.len() / 2).max(1);
    let pts: Vec<(f64, f64)> = (start..coeffs.len())
        .filter(|&n| coeffs[n].abs() >= floor && coeffs[n] != 0.0)
        .map(|n| ((n as f64).ln(), coeffs[n].abs().ln()))
        .collect();
    match pts.len() {
        0 => TailDecay::Finite,
        k if k < 3 => TailDecay::Insufficient { points: k },
        k => {
            let n = k as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            TailDecay::Fitted {
                rate: -sxy / sxx,
                points: k,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticOptions {
    pub margin: f64,
    /// Boundary tolerance relative to ‖g‖.
    pub boundary_rel_tol: f64,
    pub noise_floor: f64,
    /// k in the L₂(t^k) check of ϑ.
    pub weighted_l2_index: f64,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        DiagnosticOptions {
            margin: DEFAULT_MARGIN,
            boundary_rel_tol: DEFAULT_BOUNDARY_REL_TOL,
            noise_floor: DEFAULT_NOISE_FLOOR,
            weighted_l2_index: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub verdict: Verdict,
    pub p: f64,
    pub xi: f64,
    pub tail_decay: TailDecay,
    /// −p·rate + ξ; the 𝔅 series converges when this is below −1.
    pub decay_test_value: Option<f64>,
    pub decay_ok: Option<bool>,
    pub boundary_trace_average: f64,
    pub boundary_trace_spread: f64,
    pub boundary_tolerance: f64,
    pub boundary_stabilized: bool,
    pub boundary_ok: Option<bool>,
    pub pollard_range: (f64, f64),
    /// Only for 1 < p < 2.
    pub pollard_ok: Option<bool>,
    /// ϱ ∈ L_{p′}, only for 1 < p < 2.
    pub rho_in_conjugate_lq: Option<LqCheck>,
    pub theta_in_l2: LqCheck,
    pub theta_in_weighted_l2: LqCheck,
    pub reasons: Vec<String>,
}

/// Verdict from the shifted coefficients g and their boundary trace.
///
/// `satisfied`: the tail decays fast enough for 𝔅 < ∞ with margin and the
/// boundary trace is within tolerance. `violated`: the decay is clearly too
/// slow, or the trace has settled on a value beyond tolerance. Otherwise, and
/// always for fewer than `MIN_FIT_MODES` modes, `inconclusive`.
pub fn verdict_from_traces(
    params: WeightParams,
    p: f64,
    n_modes: usize,
    g_coeffs: &CoefficientSeries,
    trace: &[f64],
    options: &DiagnosticOptions,
) -> (Verdict, VerdictParts) {
    let xi = xi_exponent(params, p);
    let tail = tail_decay_exponent(&g_coeffs.coeffs, options.noise_floor);
    let mut reasons = Vec::new();
    let decay_test_value = tail.rate().map(|r| -p * r + xi);
    let decay_ok = match (tail, decay_test_value) {
        (TailDecay::Finite, _) => Some(true),
        (_, Some(v)) if v < -1.0 - options.margin => Some(true),
        (_, Some(v)) if v > -1.0 + options.margin => {
            reasons.push(format!("coefficient decay too slow: -p*r + xi = {v:.4} > -1 + margin"));
            Some(false)
        }
        (_, Some(v)) => {
            reasons.push(format!("coefficient decay borderline: -p*r + xi = {v:.4}"));
            None
        }
        (TailDecay::Insufficient { points }, None) => {
            reasons.push(format!("only {points} tail coefficients above the noise floor"));
            None
        }
        _ => None,
    };
    let avg = tail_average(trace);
    let spread = tail_spread(trace);
    let tol = options.boundary_rel_tol * g_coeffs.l2_norm();
    let stabilized = avg != 0.0 && spread <= 0.5 * avg.abs();
    let boundary_ok = if avg.abs() <= tol {
        Some(true)
    } else if stabilized {
        reasons.push(format!("boundary trace settles at {avg:.6e}, tolerance {tol:.3e}"));
        Some(false)
    } else {
        reasons.push(format!("boundary trace {avg:.6e} has not settled"));
        None
    };
    let verdict = if n_modes < MIN_FIT_MODES {
        reasons.push(format!("{n_modes} modes are too few for a tail fit (need {MIN_FIT_MODES})"));
        Verdict::Inconclusive
    } else if decay_ok == Some(false) || boundary_ok == Some(false) {
        Verdict::Violated
    } else if decay_ok == Some(true) && boundary_ok == Some(true) {
        Verdict::Satisfied
    } else {
        Verdict::Inconclusive
    };
    (
        verdict,
        VerdictParts {
            xi,
            tail,
            decay_test_value,
            decay_ok,
            avg,
            spread,
            tol,
            stabilized,
            boundary_ok,
            reasons,
        },
    )
}

/// Intermediate values of `verdict_from_traces`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictParts {
    pub xi: f64,
    pub tail: TailDecay,
    pub decay_test_value: Option<f64>,
    pub decay_ok: Option<bool>,
    pub avg: f64,
    pub spread: f64,
    pub tol: f64,
    pub stabilized: bool,
    pub boundary_ok: Option<bool>,
    pub reasons: Vec<String>,
}
