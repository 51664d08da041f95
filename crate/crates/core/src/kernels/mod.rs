//! Sonin kernel pairs ϱ, ϑ on (0, b−a) with ϱ∗ϑ ≡ 1.
//!
//! Every kernel is stored factored as s^{ν−1}·r(s) with r regular at 0, so
//! quadratures can put the weak singularity into a Gauss–Jacobi weight.

mod table;

pub use table::{read_two_column_csv, MonotoneCubic};

use crate::error::{Error, Result};
use crate::jacobi::{gamma, gauss_jacobi_rule};
use serde::Serialize;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

pub const DEFAULT_SONIN_TOL: f64 = 1e-8;
pub const PROBE_COUNT: usize = 9;
pub const DEFAULT_CONVOLUTION_ORDER: usize = 64;
// relative change allowed between order n and 2n in kernel_in_lq
const LQ_STABILITY_TOL: f64 = 1e-3;
const LQ_BASE_ORDER: usize = 32;

type RegularFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct SoninKernel {
    name: String,
    nu: f64,
    regular: RegularFn,
}

impl SoninKernel {
    /// kernel(s) = s^{ν−1} · regular(s), ν ∈ (0, 1].
    pub fn new<F>(name: impl Into<String>, nu: f64, regular: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::Domain {
                name: "nu",
                value: nu,
                range: "(0, 1]",
            });
        }
        Ok(SoninKernel {
            name: name.into(),
            nu,
            regular: Arc::new(regular),
        })
    }

    /// A kernel whose regular part is tabulated as (s, r(s)) pairs and
    /// interpolated by monotone cubic pieces. The table should cover
    /// [0, b−a]; evaluations outside it yield NaN, which quadratures
    /// report as evaluation errors.
    pub fn from_table(name: impl Into<String>, nu: f64, s: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        let interp = MonotoneCubic::new(s, r)?;
        SoninKernel::new(name, nu, move |s| interp.eval(s).unwrap_or(f64::NAN))
    }

    /// Loads a `s,r` CSV table.
    pub fn from_csv(name: impl Into<String>, nu: f64, path: impl AsRef<Path>) -> Result<Self> {
        let (s, r) = read_two_column_csv(path, "s", "r")?;
        SoninKernel::from_table(name, nu, s, r)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The singularity exponent ν.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn regular(&self, s: f64) -> f64 {
        (self.regular)(s)
    }

    pub fn eval(&self, s: f64) -> f64 {
        if self.nu == 1.0 {
            self.regular(s)
        } else {
            s.powf(self.nu - 1.0) * self.regular(s)
        }
    }
}

impl fmt::Debug for SoninKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SoninKernel")
            .field("name", &self.name)
            .field("nu", &self.nu)
            .finish_non_exhaustive()
    }
}

/// Which member of a pair an operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelRole {
    Rho,
    Theta,
}

#[derive(Debug, Clone)]
pub struct SoninPair {
    rho: SoninKernel,
    theta: SoninKernel,
    verified: bool,
    max_residual: f64,
    /// Largest t for which the condition was checked (∞ when analytic).
    verified_length: f64,
    probes: Vec<(f64, f64)>,
}

impl SoninPair {
    /// Runs the verifier on `PROBE_COUNT` equispaced points of (0, length)
    /// and records the outcome. A failing pair is returned unverified, not
    /// rejected.
    pub fn verify(rho: SoninKernel, theta: SoninKernel, length: f64, tol: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain {
                name: "length",
                value: length,
                range: "(0, inf)",
            });
        }
        let probes = probe_points(length)
            .into_iter()
            .map(|t| Ok((t, sonin_residual_of(&rho, &theta, t, DEFAULT_CONVOLUTION_ORDER)?)))
            .collect::<Result<Vec<_>>>()?;
        let max_residual = probes.iter().map(|p| p.1).fold(0.0, f64::max);
        Ok(SoninPair {
            rho,
            theta,
            verified: max_residual < tol,
            max_residual,
            verified_length: length,
            probes,
        })
    }

    pub fn rho(&self) -> &SoninKernel {
        &self.rho
    }

    pub fn theta(&self) -> &SoninKernel {
        &self.theta
    }

    pub fn kernel(&self, role: KernelRole) -> &SoninKernel {
        match role {
            KernelRole::Rho => &self.rho,
            KernelRole::Theta => &self.theta,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn verified_length(&self) -> f64 {
        self.verified_length
    }

    /// (t, |(ϱ∗ϑ)(t) − 1|) at the probe points.
    pub fn probes(&self) -> &[(f64, f64)] {
        &self.probes
    }
}

/// t_i = i·length/(PROBE_COUNT+1), i = 1..=PROBE_COUNT.
pub fn probe_points(length: f64) -> Vec<f64> {
    (1..=PROBE_COUNT)
        .map(|i| length * i as f64 / (PROBE_COUNT + 1) as f64)
        .collect()
}

/// ϱ(s) = s^{α−1}/Γ(α), ϑ(s) = s^{−α}/Γ(1−α).
pub fn riemann_liouville_pair(alpha: f64) -> Result<SoninPair> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            range: "(0, 1)",
        });
    }
    let (g_rho, g_theta) = (gamma(alpha)?, gamma(1.0 - alpha)?);
    let rho = SoninKernel::new(format!("rl-rho(alpha={alpha})"), alpha, move |_| 1.0 / g_rho)?;
    let theta = SoninKernel::new(format!("rl-theta(alpha={alpha})"), 1.0 - alpha, move |_| {
        1.0 / g_theta
    })?;
    // B(α,1−α) = Γ(α)Γ(1−α) makes the identity exact for every t; the probes
    // on (0,1) are recorded for reporting.
    let mut pair = SoninPair::verify(rho, theta, 1.0, DEFAULT_SONIN_TOL)?;
    pair.verified = true;
    pair.verified_length = f64::INFINITY;
    Ok(pair)
}

/// ϱ(s) = cos(2√(λs))/√(πs), ϑ(s) = cosh(2√(λs))/√(πs), checked by the
/// verifier on (0, length) at the default tolerance.
pub fn cosine_pair(lambda: f64, length: f64) -> Result<SoninPair> {
    cosine_pair_with_tol(lambda, length, DEFAULT_SONIN_TOL)
}

pub fn cosine_pair_with_tol(lambda: f64, length: f64, tol: f64) -> Result<SoninPair> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            range: "[0, inf)",
        });
    }
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let rho = SoninKernel::new(format!("cos-rho(lambda={lambda})"), 0.5, move |s| {
        (2.0 * (lambda * s).sqrt()).cos() * inv_sqrt_pi
    })?;
    let theta = SoninKernel::new(format!("cosh-theta(lambda={lambda})"), 0.5, move |s| {
        (2.0 * (lambda * s).sqrt()).cosh() * inv_sqrt_pi
    })?;
    let pair = SoninPair::verify(rho, theta, length, tol)?;
    if !pair.verified {
        return Err(Error::Unverified {
            max_residual: pair.max_residual,
            tolerance: tol,
        });
    }
    Ok(pair)
}

/// |(ϱ∗ϑ)(t) − 1| for the pair's kernels.
pub fn sonin_residual(pair: &SoninPair, t: f64) -> Result<f64> {
    sonin_residual_of(&pair.rho, &pair.theta, t, DEFAULT_CONVOLUTION_ORDER)
}

/// |∫₀ᵗ ϱ(s)ϑ(t−s) ds − 1|, split at t/2 so each half carries one endpoint
/// singularity, each integrated with a Gauss–Jacobi rule of that exponent.
pub fn sonin_residual_of(rho: &SoninKernel, theta: &SoninKernel, t: f64, order: usize) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            range: "(0, b-a]",
        });
    }
    let half = 0.5 * t;
    let part = |near: &SoninKernel, far: &SoninKernel| -> Result<f64> {
        let rule = gauss_jacobi_rule(near.nu - 1.0, 0.0, order)?;
        let sum = rule.try_integrate(
            |v| near.regular(half * v) * far.eval(t - half * v),
            |v| half * v,
            "Sonin convolution",
        )?;
        Ok(half.powf(near.nu) * sum)
    };
    let conv = part(rho, theta)? + part(theta, rho)?;
    Ok((conv - 1.0).abs())
}

/// Outcome of an integrability check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LqCheck {
    pub holds: bool,
    /// Exponent of the singular factor after raising to the power.
    pub singular_exponent: f64,
    /// Quadrature estimate of the integral at the higher order, if computed.
    pub estimate: Option<f64>,
    pub detail: String,
}

/// Is the kernel in L_q(0, length)? Power counting on s^{q(ν−1)} decides
/// integrability at 0; the integral must also be stable under doubling the
/// quadrature order.
pub fn kernel_in_lq(kernel: &SoninKernel, q: f64, length: f64) -> LqCheck {
    power_integrability(kernel, q, 0.0, length, &format!("L_{q}"))
}

/// Is ∫₀^length |kernel(t)|² t^k dt finite?
pub fn kernel_in_weighted_l2(kernel: &SoninKernel, k: f64, length: f64) -> LqCheck {
    power_integrability(kernel, 2.0, k, length, &format!("L_2(t^{k})"))
}

fn power_integrability(kernel: &SoninKernel, q: f64, extra: f64, length: f64, label: &str) -> LqCheck {
    let e = q * (kernel.nu - 1.0) + extra;
    if !(q >= 1.0) {
        return LqCheck {
            holds: false,
            singular_exponent: e,
            estimate: None,
            detail: format!("{label}: exponent q = {q} must be at least 1"),
        };
    }
    if e <= -1.0 {
        return LqCheck {
            holds: false,
            singular_exponent: e,
            estimate: None,
            detail: format!("{label}: |kernel|^q ~ s^{e} is not integrable at 0"),
        };
    }
    let estimate = |order: usize| -> Option<f64> {
        let rule = gauss_jacobi_rule(e, 0.0, order).ok()?;
        let v = length.powf(e + 1.0) * rule.integrate(|u| kernel.regular(length * u).abs().powf(q));
        v.is_finite().then_some(v)
    };
    match (estimate(LQ_BASE_ORDER), estimate(2 * LQ_BASE_ORDER)) {
        (Some(lo), Some(hi)) => {
            let change = (hi - lo).abs() / hi.abs().max(f64::MIN_POSITIVE);
            if change < LQ_STABILITY_TOL {
                LqCheck {
                    holds: true,
                    singular_exponent: e,
                    estimate: Some(hi),
                    detail: format!("{label}: integral ≈ {hi:e}"),
                }
            } else {
                LqCheck {
                    holds: false,
                    singular_exponent: e,
                    estimate: Some(hi),
                    detail: format!("{label}: quadrature unstable (relative change {change:e} on order doubling)"),
                }
            }
        }
        _ => LqCheck {
            holds: false,
            singular_exponent: e,
            estimate: None,
            detail: format!("{label}: integrand not finite at quadrature nodes"),
        },
    }
}
