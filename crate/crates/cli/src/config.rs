//! Run configuration: a single JSON document.
//!
//! ```json
//! {
//!   "problem": {
//!     "pair": { "kind": "rl", "alpha": 0.5 },
//!     "interval": { "a": 0.0, "b": 1.0 },
//!     "params": { "beta": 0.5, "gamma": 0.5 },
//!     "p": 2.0,
//!     "rhs": { "kind": "expr", "expr": "1 + x", "left_exponent": 0.0 },
//!     "n_modes": 64
//!   },
//!   "output": "report.json",
//!   "tolerances": { "quad_order": 64, "tol_sonin": 1e-8 },
//!   "seed": 0
//! }
//! ```
//!
//! Pairs: `rl` (`alpha`), `cosine` (`lambda`), `table` (`rho` and `theta`,
//! each `{ "path": ..., "nu": ... }` pointing at an `s,r` CSV of the regular
//! factor). Right-hand sides: `expr` (f = (x−a)^left_exponent · expr),
//! `samples` (`path` to an `x,f` CSV, monotone cubic interpolation) and
//! `solution` (an expression for φ; f = I^ϱφ is built by the forward
//! operator). Relative paths are resolved against the config file.

use crate::error::CliError;
use crate::expr::Expr;
use abel_sonin::jacobi::{Interval, WeightParams};
use abel_sonin::kernels::{
    cosine_pair_with_tol, read_two_column_csv, riemann_liouville_pair, KernelRole, MonotoneCubic,
    SoninKernel, SoninPair,
};
use abel_sonin::operators::{sonin_integral_of, OperatorContext, MIN_QUAD_ORDER};
use abel_sonin::solver::{DiagnosticOptions, ProblemSpec, SolverOptions, MIN_N_MODES};
use abel_sonin::Integrand;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Every default in one place; echoed into reports as `defaults_used`.
pub mod defaults {
    pub const N_MODES: usize = abel_sonin::solver::DEFAULT_N_MODES;
    pub const P: f64 = 2.0;
    pub const QUAD_ORDER: usize = abel_sonin::operators::DEFAULT_QUAD_ORDER;
    pub const TOL_SONIN: f64 = abel_sonin::kernels::DEFAULT_SONIN_TOL;
    pub const SEED: u64 = 0;
    pub const MARGIN: f64 = abel_sonin::solver::DEFAULT_MARGIN;
    pub const BOUNDARY_REL_TOL: f64 = abel_sonin::solver::DEFAULT_BOUNDARY_REL_TOL;
    pub const NOISE_FLOOR: f64 = abel_sonin::solver::DEFAULT_NOISE_FLOOR;
    pub const WEIGHTED_L2_INDEX: f64 = 1.0;
    pub const CORRECTED_RESIDUAL: bool = false;
    pub const PSI_SAMPLES: usize = 201;
    pub const BOUND_TRIALS: usize = 16;
    pub const BOUND_DEGREE: usize = 8;
    pub const LEFT_EXPONENT: f64 = 0.0;
    pub const OUTPUT: &str = "report.json";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub pair: PairConfig,
    pub interval: IntervalConfig,
    pub params: ParamsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub rhs: RhsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairConfig {
    Rl { alpha: f64 },
    Cosine { lambda: f64 },
    Table { rho: KernelTable, theta: KernelTable },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTable {
    pub path: String,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RhsConfig {
    Expr {
        expr: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        left_exponent: Option<f64>,
    },
    Samples {
        path: String,
    },
    Solution {
        expr: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        left_exponent: Option<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_sonin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_l2_index: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_residual: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_degree: Option<usize>,
}

/// Values actually used for every setting with a default.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub n_modes: usize,
    pub p: f64,
    pub quad_order: usize,
    pub tol_sonin: f64,
    pub seed: u64,
    pub expansion_order: usize,
    pub norm_order: usize,
    pub margin: f64,
    pub boundary_rel_tol: f64,
    pub noise_floor: f64,
    pub weighted_l2_index: f64,
    pub corrected_residual: bool,
    pub psi_samples: usize,
    pub bound_trials: usize,
    pub bound_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefaultsUsed {
    pub values: Settings,
    /// Keys whose value came from the defaults table.
    pub defaulted: Vec<&'static str>,
}

/// Command-line overrides, applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n_modes: Option<usize>,
    pub quad_order: Option<usize>,
    pub tol_sonin: Option<f64>,
    pub seed: Option<u64>,
}

/// A validated configuration, with the problem fully spelled out.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub problem: ProblemConfig,
    pub output: Option<String>,
    pub settings: Settings,
    pub defaults: DefaultsUsed,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::precondition("config", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::precondition("config", format!("line {} column {}: {e}", e.line(), e.column()))
    })
}

fn check(ok: bool, field: &str, value: impl ToString, range: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::out_of_range(field, value.to_string(), range))
    }
}

fn absolute(base: &Path, p: &str) -> String {
    let path = Path::new(p);
    let joined: PathBuf = if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    };
    std::fs::canonicalize(&joined)
        .unwrap_or(joined)
        .to_string_lossy()
        .into_owned()
}

/// Apply overrides and defaults, validate every field and make paths
/// absolute. No computation happens here.
pub fn resolve(mut config: RunConfig, base_dir: &Path, overrides: &Overrides) -> Result<Resolved, CliError> {
    if let Some(n) = overrides.n_modes {
        config.problem.n_modes = Some(n);
    }
    if let Some(q) = overrides.quad_order {
        config.tolerances.quad_order = Some(q);
    }
    if let Some(t) = overrides.tol_sonin {
        config.tolerances.tol_sonin = Some(t);
    }
    if let Some(s) = overrides.seed {
        config.seed = Some(s);
    }

    let mut defaulted = Vec::new();
    macro_rules! pick {
        ($opt:expr, $default:expr, $key:literal) => {
            match $opt {
                Some(v) => v,
                None => {
                    defaulted.push($key);
                    $default
                }
            }
        };
    }

    let mut problem = config.problem;
    let t = config.tolerances;
    let n_modes = pick!(problem.n_modes, defaults::N_MODES, "n_modes");
    let p = pick!(problem.p, defaults::P, "p");
    let quad_order = pick!(t.quad_order, defaults::QUAD_ORDER, "quad_order");
    let tol_sonin = pick!(t.tol_sonin, defaults::TOL_SONIN, "tol_sonin");
    let seed = pick!(config.seed, defaults::SEED, "seed");
    let solver_defaults = SolverOptions {
        expansion_order: t.expansion_order,
        norm_order: t.norm_order,
        ..SolverOptions::default()
    };
    if t.expansion_order.is_none() {
        defaulted.push("expansion_order");
    }
    if t.norm_order.is_none() {
        defaulted.push("norm_order");
    }
    let settings = Settings {
        n_modes,
        p,
        quad_order,
        tol_sonin,
        seed,
        expansion_order: solver_defaults.expansion_order_for(n_modes),
        norm_order: solver_defaults.norm_order_for(n_modes),
        margin: pick!(t.margin, defaults::MARGIN, "margin"),
        boundary_rel_tol: pick!(t.boundary_rel_tol, defaults::BOUNDARY_REL_TOL, "boundary_rel_tol"),
        noise_floor: pick!(t.noise_floor, defaults::NOISE_FLOOR, "noise_floor"),
        weighted_l2_index: pick!(t.weighted_l2_index, defaults::WEIGHTED_L2_INDEX, "weighted_l2_index"),
        corrected_residual: pick!(t.corrected_residual, defaults::CORRECTED_RESIDUAL, "corrected_residual"),
        psi_samples: pick!(t.psi_samples, defaults::PSI_SAMPLES, "psi_samples"),
        bound_trials: pick!(t.bound_trials, defaults::BOUND_TRIALS, "bound_trials"),
        bound_degree: pick!(t.bound_degree, defaults::BOUND_DEGREE, "bound_degree"),
    };

    let iv = problem.interval;
    check(iv.a.is_finite(), "problem.interval.a", iv.a, "finite")?;
    check(iv.b.is_finite() && iv.b > iv.a, "problem.interval.b", iv.b, "(a,inf)")?;
    let pr = problem.params;
    check(pr.beta > 0.0 && pr.beta < 1.0, "problem.params.beta", pr.beta, "(0,1)")?;
    check(pr.gamma > 0.0 && pr.gamma < 1.0, "problem.params.gamma", pr.gamma, "(0,1)")?;
    check(p > 1.0 && p.is_finite(), "problem.p", p, "(1,inf)")?;
    check(n_modes >= MIN_N_MODES, "problem.n_modes", n_modes, "[4,inf)")?;
    match &mut problem.pair {
        PairConfig::Rl { alpha } => check(*alpha > 0.0 && *alpha < 1.0, "problem.pair.alpha", *alpha, "(0,1)")?,
        PairConfig::Cosine { lambda } => check(
            *lambda >= 0.0 && lambda.is_finite(),
            "problem.pair.lambda",
            *lambda,
            "[0,inf)",
        )?,
        PairConfig::Table { rho, theta } => {
            for (name, k) in [("rho", rho), ("theta", theta)] {
                check(k.nu > 0.0 && k.nu <= 1.0, &format!("problem.pair.{name}.nu"), k.nu, "(0,1]")?;
                k.path = absolute(base_dir, &k.path);
            }
        }
    }
    match &mut problem.rhs {
        RhsConfig::Expr { expr, left_exponent } | RhsConfig::Solution { expr, left_exponent } => {
            Expr::parse(expr).map_err(|e| CliError::precondition("problem.rhs.expr", e.to_string()))?;
            let mu = left_exponent.unwrap_or(defaults::LEFT_EXPONENT);
            check(mu > -1.0 && mu.is_finite(), "problem.rhs.left_exponent", mu, "(-1,inf)")?;
            *left_exponent = Some(mu);
        }
        RhsConfig::Samples { path } => *path = absolute(base_dir, path),
    }
    problem.n_modes = Some(n_modes);
    problem.p = Some(p);

    check(quad_order >= MIN_QUAD_ORDER, "tolerances.quad_order", quad_order, "[16,inf)")?;
    check(tol_sonin > 0.0 && tol_sonin.is_finite(), "tolerances.tol_sonin", tol_sonin, "(0,inf)")?;
    check(settings.expansion_order >= 1, "tolerances.expansion_order", settings.expansion_order, "[1,inf)")?;
    check(settings.norm_order >= 1, "tolerances.norm_order", settings.norm_order, "[1,inf)")?;
    check(settings.margin >= 0.0, "tolerances.margin", settings.margin, "[0,inf)")?;
    check(settings.boundary_rel_tol > 0.0, "tolerances.boundary_rel_tol", settings.boundary_rel_tol, "(0,inf)")?;
    check(
        (0.0..1.0).contains(&settings.noise_floor),
        "tolerances.noise_floor",
        settings.noise_floor,
        "[0,1)",
    )?;
    check(
        settings.weighted_l2_index.is_finite(),
        "tolerances.weighted_l2_index",
        settings.weighted_l2_index,
        "finite",
    )?;
    check(settings.psi_samples >= 2, "tolerances.psi_samples", settings.psi_samples, "[2,inf)")?;
    check(settings.bound_trials >= 1, "tolerances.bound_trials", settings.bound_trials, "[1,inf)")?;

    Ok(Resolved {
        problem,
        output: config.output,
        defaults: DefaultsUsed {
            values: settings.clone(),
            defaulted,
        },
        settings,
    })
}

impl Resolved {
    pub fn interval(&self) -> Interval {
        Interval {
            a: self.problem.interval.a,
            b: self.problem.interval.b,
        }
    }

    pub fn params(&self) -> WeightParams {
        WeightParams {
            beta: self.problem.params.beta,
            gamma: self.problem.params.gamma,
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let s = &self.settings;
        SolverOptions {
            quad_order: s.quad_order,
            expansion_order: Some(s.expansion_order),
            norm_order: Some(s.norm_order),
            corrected_residual: s.corrected_residual,
            diagnostics: DiagnosticOptions {
                margin: s.margin,
                boundary_rel_tol: s.boundary_rel_tol,
                noise_floor: s.noise_floor,
                weighted_l2_index: s.weighted_l2_index,
            },
        }
    }

    pub fn build_pair(&self) -> Result<SoninPair, CliError> {
        build_pair(&self.problem.pair, self.interval().length(), self.settings.tol_sonin)
    }

    pub fn build_spec(&self) -> Result<ProblemSpec, CliError> {
        let pair = self.build_pair()?;
        let iv = self.interval();
        let rhs = match &self.problem.rhs {
            RhsConfig::Expr { expr, left_exponent } => expression_integrand(expr, iv.a, left_exponent.unwrap_or(0.0))?,
            RhsConfig::Samples { path } => samples_integrand(path, iv)?,
            RhsConfig::Solution { expr, left_exponent } => {
                let phi = expression_integrand(expr, iv.a, left_exponent.unwrap_or(0.0))?;
                let ctx = OperatorContext::new(pair.clone(), iv, self.settings.quad_order)?;
                sonin_integral_of(&ctx, &phi, KernelRole::Rho)?
            }
        };
        Ok(ProblemSpec::new(
            pair,
            iv,
            self.params(),
            self.settings.p,
            rhs,
            self.settings.n_modes,
        )?)
    }
}

pub fn build_pair(config: &PairConfig, length: f64, tol: f64) -> Result<SoninPair, CliError> {
    let pair = match config {
        PairConfig::Rl { alpha } => riemann_liouville_pair(*alpha)?,
        PairConfig::Cosine { lambda } => cosine_pair_with_tol(*lambda, length, tol)?,
        PairConfig::Table { rho, theta } => {
            let r = SoninKernel::from_csv("table-rho", rho.nu, &rho.path)
                .map_err(|e| CliError::precondition("problem.pair.rho.path", e.to_string()))?;
            let t = SoninKernel::from_csv("table-theta", theta.nu, &theta.path)
                .map_err(|e| CliError::precondition("problem.pair.theta.path", e.to_string()))?;
            SoninPair::verify(r, t, length, tol)?
        }
    };
    if !pair.is_verified() {
        return Err(CliError::precondition(
            "problem.pair",
            format!(
                "Sonin condition fails: max residual {:e} exceeds tolerance {:e}",
                pair.max_residual(),
                tol
            ),
        ));
    }
    Ok(pair)
}

fn expression_integrand(source: &str, a: f64, mu: f64) -> Result<Integrand, CliError> {
    let e = Expr::parse(source).map_err(|e| CliError::precondition("problem.rhs.expr", e.to_string()))?;
    Ok(Integrand::with_left_power(a, mu, move |x| e.eval(x)))
}

fn samples_integrand(path: &str, iv: Interval) -> Result<Integrand, CliError> {
    let field = "problem.rhs.path";
    let (xs, ys) = read_two_column_csv(path, "x", "f").map_err(|e| CliError::precondition(field, e.to_string()))?;
    if let Some(x) = xs.iter().find(|&&x| x < iv.a || x > iv.b) {
        return Err(CliError::out_of_range(field, x.to_string(), "[a,b]"));
    }
    let spline = MonotoneCubic::new(xs, ys).map_err(|e| CliError::precondition(field, e.to_string()))?;
    Ok(Integrand::new(move |x| spline.eval(x).unwrap_or(f64::NAN)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        serde_json::from_str(
            r#"{"problem":{"pair":{"kind":"rl","alpha":0.5},"interval":{"a":0,"b":1},
                "params":{"beta":0.5,"gamma":0.5},"rhs":{"kind":"expr","expr":"x"}}}"#,
        )
        .unwrap()
    }

    #[test]
    fn samples_interpolate_inside_hull_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "x,f\n0.1,1\n0.4,2.5\n0.9,2.7\n").unwrap();
        let f = samples_integrand(path.to_str().unwrap(), Interval::unit()).unwrap();
        // scipy.interpolate.PchipInterpolator on the same points
        assert!((f.eval(0.25) - 1.9722871677740863).abs() < 1e-12);
        assert!((f.eval(0.6) - 2.627808637873754).abs() < 1e-12);
        assert!(f.eval(0.05).is_nan());
        std::fs::write(&path, "x,f\n0.1,1\n0.4,2.5\n0.3,2.7\n").unwrap();
        assert!(samples_integrand(path.to_str().unwrap(), Interval::unit()).is_err());
        std::fs::write(&path, "x,f\n0.1,1\n1.4,2.5\n").unwrap();
        let e = samples_integrand(path.to_str().unwrap(), Interval::unit()).unwrap_err();
        assert_eq!(e.range.as_deref(), Some("[a,b]"));
    }

    #[test]
    fn defaults_are_recorded() {
        let r = resolve(base(), Path::new("."), &Overrides::default()).unwrap();
        assert_eq!(r.settings.n_modes, 64);
        assert_eq!(r.settings.expansion_order, 2 * 66 + 16);
        assert!(r.defaults.defaulted.contains(&"n_modes"));
        assert_eq!(r.problem.n_modes, Some(64));
        let r = resolve(
            base(),
            Path::new("."),
            &Overrides {
                n_modes: Some(12),
                ..Overrides::default()
            },
        )
        .unwrap();
        assert_eq!(r.settings.n_modes, 12);
        assert!(!r.defaults.defaulted.contains(&"n_modes"));
    }

    #[test]
    fn validation_names_fields() {
        let mut c = base();
        c.problem.params.gamma = 0.0;
        let e = resolve(c, Path::new("."), &Overrides::default()).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("problem.params.gamma"));
        let mut c = base();
        c.problem.rhs = RhsConfig::Expr {
            expr: "x +".into(),
            left_exponent: None,
        };
        let e = resolve(c, Path::new("."), &Overrides::default()).unwrap_err();
        assert!(e.message.contains("column 4"), "{}", e.message);
        let mut c = base();
        c.tolerances.quad_order = Some(4);
        let e = resolve(c, Path::new("."), &Overrides::default()).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("tolerances.quad_order"));
        let c: std::result::Result<RunConfig, _> =
            serde_json::from_str(r#"{"problem":{"pair":{"kind":"rl","alpha":0.5},"bogus":1}}"#);
        assert!(c.is_err());
    }
}
