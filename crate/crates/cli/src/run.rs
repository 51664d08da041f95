use crate::config::{self, DefaultsUsed, Overrides, PairConfig, ProblemConfig, Resolved};
use crate::error::CliError;
use abel_sonin::jacobi::{c_m, delta_n, delta_prime_n, Interval, JacobiBasis, WeightParams};
use abel_sonin::kernels::{probe_points, sonin_residual};
use abel_sonin::operators::{empirical_operator_bound, empirical_projection_bound, OperatorContext};
use abel_sonin::solver::{solve, Diagnostics, SolveReport, Verdict};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct EmpiricalBounds {
    pub seed: u64,
    pub trials: usize,
    pub degree: usize,
    /// max ‖I^ϑ f‖/‖f‖ over random polynomials, both in L₂(I,β,γ).
    pub operator_norm_lower_bound: f64,
    /// max |∫ p_m^{β−1,γ−1} I^ϑ f ω^{β−1,γ−1}| / ‖f‖ for m ≤ degree.
    pub projection_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct DiagnosticsSection<'a> {
    pub criterion_verdict: Verdict,
    pub tail_decay_exponent: Option<f64>,
    pub c_tilde_estimate: f64,
    pub boundary_projection: f64,
    pub pollard_ok: Option<bool>,
    pub g_coeffs: &'a [f64],
    pub boundary_sum_trace: &'a [f64],
    pub b_functional_partial_sums: &'a [f64],
    pub mm_weighted_sums: &'a [f64],
    pub detail: &'a Diagnostics,
    pub empirical_bounds: EmpiricalBounds,
}

#[derive(Debug, Serialize)]
pub struct Residuals {
    pub residual_l2: f64,
    pub corrected_residual_l2: Option<f64>,
    pub psi_lp_norm: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveDocument<'a> {
    pub problem: &'a ProblemConfig,
    pub psi_coeffs: &'a [f64],
    pub diagnostics: DiagnosticsSection<'a>,
    pub residuals: Residuals,
    pub defaults_used: &'a DefaultsUsed,
    pub warnings: &'a [String],
}

#[derive(Debug, Serialize)]
pub struct DiagnoseDocument<'a> {
    pub problem: &'a ProblemConfig,
    pub diagnostics: DiagnosticsSection<'a>,
    pub warnings: &'a [String],
}

pub fn resolve_file(path: &Path, overrides: &Overrides) -> Result<Resolved, CliError> {
    let cfg = config::load(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    config::resolve(cfg, &base, overrides)
}

fn bounds(resolved: &Resolved, report: &SolveReport) -> Result<EmpiricalBounds, CliError> {
    let s = &resolved.settings;
    let ctx = OperatorContext::new(resolved.build_pair()?, resolved.interval(), s.quad_order)?;
    let params = report.psi.params;
    Ok(EmpiricalBounds {
        seed: s.seed,
        trials: s.bound_trials,
        degree: s.bound_degree,
        operator_norm_lower_bound: empirical_operator_bound(&ctx, params, s.bound_trials, s.bound_degree, s.seed)?,
        projection_bound: empirical_projection_bound(
            &ctx,
            params,
            s.bound_trials,
            s.bound_degree,
            s.bound_degree,
            s.seed,
        )?,
    })
}

fn section<'a>(report: &'a SolveReport, empirical_bounds: EmpiricalBounds) -> DiagnosticsSection<'a> {
    DiagnosticsSection {
        criterion_verdict: report.criterion_verdict,
        tail_decay_exponent: report.tail_decay_exponent,
        c_tilde_estimate: report.c_tilde_estimate,
        boundary_projection: report.boundary_projection,
        pollard_ok: report.pollard_ok,
        g_coeffs: &report.g_coeffs.coeffs,
        boundary_sum_trace: &report.boundary_sum_trace,
        b_functional_partial_sums: &report.b_functional_partial_sums,
        mm_weighted_sums: &report.mm_weighted_sums,
        detail: &report.diagnostics,
        empirical_bounds,
    }
}

fn to_json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc).map_err(|e| CliError::numerical(format!("serializing report: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

/// `<dir>/<stem>.<suffix>` next to the report.
pub fn sibling(report: &Path, suffix: &str) -> PathBuf {
    let stem = report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    report.with_file_name(format!("{stem}.{suffix}"))
}

fn psi_csv(report: &SolveReport, interval: Interval, samples: usize) -> Result<String, CliError> {
    let psi = report.psi.to_integrand()?;
    let mut out = String::from("x,psi\n");
    for i in 1..=samples {
        let x = interval.a + interval.length() * i as f64 / (samples + 1) as f64;
        let _ = writeln!(out, "{x},{}", psi.eval(x));
    }
    Ok(out)
}

fn cell(v: Option<&f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn traces_csv(report: &SolveReport) -> String {
    let mut out = String::from("k,g_coeff,boundary_trace,psi_coeff,b_functional_partial_sum,mm_weighted_sum\n");
    for k in 0..report.g_coeffs.len() {
        let later = |v: &[f64]| cell(k.checked_sub(1).and_then(|i| v.get(i)));
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{}",
            report.g_coeffs.coeffs[k],
            report.boundary_sum_trace[k],
            cell(report.psi.coeffs.get(k)),
            later(&report.b_functional_partial_sums),
            later(&report.mm_weighted_sums),
        );
    }
    out
}

fn output_path(resolved: &Resolved, out: Option<&Path>, config_dir: &Path) -> PathBuf {
    match (out, &resolved.output) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(o)) => config_dir.join(o),
        (None, None) => config_dir.join(config::defaults::OUTPUT),
    }
}

pub fn run_solve(config: &Path, out: Option<&Path>, overrides: &Overrides) -> Result<String, CliError> {
    let resolved = resolve_file(config, overrides)?;
    let spec = resolved.build_spec()?;
    let report = solve(&spec, &resolved.solver_options())?;
    let doc = SolveDocument {
        problem: &resolved.problem,
        psi_coeffs: &report.psi.coeffs,
        diagnostics: section(&report, bounds(&resolved, &report)?),
        residuals: Residuals {
            residual_l2: report.residual_l2,
            corrected_residual_l2: report.corrected_residual_l2,
            psi_lp_norm: report.psi_lp_norm,
        },
        defaults_used: &resolved.defaults,
        warnings: &report.warnings,
    };
    let dir = config.parent().unwrap_or(Path::new("."));
    let path = output_path(&resolved, out, dir);
    write_file(&path, &to_json(&doc)?)?;
    let samples = sibling(&path, "psi.csv");
    write_file(&samples, &psi_csv(&report, resolved.interval(), resolved.settings.psi_samples)?)?;
    write_file(&sibling(&path, "traces.csv"), &traces_csv(&report))?;
    Ok(format!(
        "verdict={} residual_l2={:e} c_tilde={:e} report={} samples={}\n",
        verdict_name(report.criterion_verdict),
        report.residual_l2,
        report.c_tilde_estimate,
        path.display(),
        samples.display()
    ))
}

pub fn run_diagnose(config: &Path, out: Option<&Path>, overrides: &Overrides) -> Result<String, CliError> {
    let resolved = resolve_file(config, overrides)?;
    let spec = resolved.build_spec()?;
    let report = solve(&spec, &resolved.solver_options())?;
    let doc = DiagnoseDocument {
        problem: &resolved.problem,
        diagnostics: section(&report, bounds(&resolved, &report)?),
        warnings: &report.warnings,
    };
    let json = to_json(&doc)?;
    match out {
        Some(p) => {
            write_file(p, &json)?;
            Ok(format!("verdict={} diagnostics={}\n", verdict_name(report.criterion_verdict), p.display()))
        }
        None => Ok(json),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Satisfied => "satisfied",
        Verdict::Violated => "violated",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Pair selection for `verify-pair` when no config is given.
#[derive(Debug, Clone, Default)]
pub struct PairFlags {
    pub pair: Option<String>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub length: Option<f64>,
}

pub fn run_verify_pair(config: Option<&Path>, flags: &PairFlags, overrides: &Overrides) -> Result<String, CliError> {
    let tol = overrides.tol_sonin.unwrap_or(config::defaults::TOL_SONIN);
    let (pair_cfg, length, tol) = match config {
        Some(path) => {
            let r = resolve_file(path, overrides)?;
            (r.problem.pair.clone(), r.interval().length(), r.settings.tol_sonin)
        }
        None => {
            let length = flags.length.unwrap_or(1.0);
            if !(length > 0.0 && length.is_finite()) {
                return Err(CliError::out_of_range("length", length.to_string(), "(0,inf)"));
            }
            if !(tol > 0.0) {
                return Err(CliError::out_of_range("tol-sonin", tol.to_string(), "(0,inf)"));
            }
            let cfg = match flags.pair.as_deref() {
                Some("rl") => PairConfig::Rl {
                    alpha: flags.alpha.ok_or_else(|| CliError::precondition("alpha", "--pair rl needs --alpha"))?,
                },
                Some("cosine") => PairConfig::Cosine {
                    lambda: flags
                        .lambda
                        .ok_or_else(|| CliError::precondition("lambda", "--pair cosine needs --lambda"))?,
                },
                Some(other) => {
                    return Err(CliError::precondition("pair", format!("unknown pair '{other}', expected rl or cosine")))
                }
                None => return Err(CliError::precondition("pair", "give --pair or --config")),
            };
            if let PairConfig::Rl { alpha } = cfg {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(CliError::out_of_range("alpha", alpha.to_string(), "(0,1)"));
                }
            }
            if let PairConfig::Cosine { lambda } = cfg {
                if !(lambda >= 0.0 && lambda.is_finite()) {
                    return Err(CliError::out_of_range("lambda", lambda.to_string(), "[0,inf)"));
                }
            }
            (cfg, length, tol)
        }
    };
    let pair = config::build_pair(&pair_cfg, length, tol)?;
    let mut out = format!("pair rho={} theta={} length={length}\n", pair.rho().name(), pair.theta().name());
    let mut worst = 0.0f64;
    for t in probe_points(length) {
        let r = sonin_residual(&pair, t)?;
        worst = worst.max(r);
        let _ = writeln!(out, "t={t} residual={r:e}");
    }
    let _ = writeln!(out, "max_residual={worst:e} tolerance={tol:e} verified={}", worst < tol);
    if worst < tol {
        Ok(out)
    } else {
        Err(CliError::precondition(
            "pair",
            format!("Sonin residual {worst:e} exceeds tolerance {tol:e}"),
        ))
    }
}

#[derive(Debug, Clone, Default)]
pub struct BasisFlags {
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub max_degree: Option<usize>,
}

pub fn run_basis_info(config: Option<&Path>, flags: &BasisFlags) -> Result<String, CliError> {
    let (mut beta, mut gamma, mut a, mut b) = (flags.beta, flags.gamma, flags.a, flags.b);
    if let Some(path) = config {
        let cfg = config::load(path)?;
        beta = beta.or(Some(cfg.problem.params.beta));
        gamma = gamma.or(Some(cfg.problem.params.gamma));
        a = a.or(Some(cfg.problem.interval.a));
        b = b.or(Some(cfg.problem.interval.b));
    }
    let beta = beta.ok_or_else(|| CliError::precondition("beta", "give --beta or --config"))?;
    let gamma = gamma.ok_or_else(|| CliError::precondition("gamma", "give --gamma or --config"))?;
    let (a, b) = (a.unwrap_or(0.0), b.unwrap_or(1.0));
    for (name, v) in [("beta", beta), ("gamma", gamma)] {
        if !(v > -1.0) {
            return Err(CliError::out_of_range(name, v.to_string(), "(-1,inf)"));
        }
    }
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(CliError::out_of_range("b", b.to_string(), "(a,inf)"));
    }
    let n_max = flags.max_degree.unwrap_or(10);
    let params = WeightParams::new(beta, gamma)?;
    let iv = Interval::new(a, b)?;
    let basis = JacobiBasis::new(iv, params, n_max)?;
    let shifted = params.shifted().ok();
    let fmt = |r: abel_sonin::Result<f64>| r.map(|v| format!("{v:e}")).unwrap_or_else(|_| "-".into());
    let mut out = format!("basis beta={beta} gamma={gamma} interval=({a},{b})\n");
    out.push_str("n delta_n delta_prime_n shifted_delta_prime_n c_m endpoint_value\n");
    for n in 0..=n_max {
        let sd = shifted.map(|s| fmt(delta_prime_n(s, n))).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{n} {} {} {sd} {} {}",
            fmt(delta_n(params, iv, n)),
            fmt(delta_prime_n(params, n)),
            fmt(c_m(params, n)),
            fmt(basis.endpoint_value(n)),
        );
    }
    Ok(out)
}
