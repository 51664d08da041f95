use abel_sonin::jacobi::{Interval, JacobiBasis, WeightParams};
use abel_sonin::kernels::{cosine_pair, riemann_liouville_pair, KernelRole, SoninPair};
use abel_sonin::operators::{sonin_integral_of, OperatorContext, DEFAULT_QUAD_ORDER};
use abel_sonin::solver::{corrected_residual_l2, solve, ProblemSpec, SolverOptions, Verdict};
use abel_sonin::Integrand;

fn manufactured(pair: &SoninPair, iv: Interval, params: WeightParams, k: usize, n: usize) -> ProblemSpec {
    let ctx = OperatorContext::new(pair.clone(), iv, DEFAULT_QUAD_ORDER).unwrap();
    let basis = JacobiBasis::new(iv, params, k).unwrap();
    let phi = Integrand::new(move |x| basis.eval(k, x).unwrap());
    let f = sonin_integral_of(&ctx, &phi, KernelRole::Rho).unwrap();
    ProblemSpec::new(pair.clone(), iv, params, 2.0, f, n).unwrap()
}

fn assert_unit_vector(coeffs: &[f64], k: usize, tol: f64) {
    for (m, c) in coeffs.iter().enumerate() {
        let want = if m == k { 1.0 } else { 0.0 };
        assert!((c - want).abs() < tol, "coefficient {m} = {c}");
    }
}

#[test]
fn cosine_pair_manufactured_problem() {
    let pair = cosine_pair(4.0, 1.0).unwrap();
    let params = WeightParams::new(0.4, 0.6).unwrap();
    let spec = manufactured(&pair, Interval::unit(), params, 3, 24);
    let report = solve(&spec, &SolverOptions::default()).unwrap();
    assert_unit_vector(&report.psi.coeffs, 3, 1e-6);
    assert!(report.residual_l2 < 1e-6);
    assert_eq!(report.criterion_verdict, Verdict::Satisfied);
}

#[test]
fn shifted_interval_manufactured_problem() {
    let iv = Interval::new(1.0, 3.0).unwrap();
    let pair = riemann_liouville_pair(0.3).unwrap();
    let params = WeightParams::new(0.2, 0.8).unwrap();
    let spec = manufactured(&pair, iv, params, 2, 16);
    let report = solve(&spec, &SolverOptions::default()).unwrap();
    assert_unit_vector(&report.psi.coeffs, 2, 1e-6);
    assert!(report.residual_l2 < 1e-6);
    assert!(report.c_tilde_estimate.abs() < 1e-6);
}

#[test]
fn cosine_counterexample_reports_defect() {
    let pair = cosine_pair(1.0, 1.0).unwrap();
    let rho = pair.rho().clone();
    let f = Integrand::with_left_power(0.0, -0.5, move |x| rho.regular(x));
    let spec = ProblemSpec::new(pair, Interval::unit(), WeightParams::new(0.5, 0.5).unwrap(), 2.0, f, 32).unwrap();
    let opts = SolverOptions::default();
    let report = solve(&spec, &opts).unwrap();
    assert_eq!(report.criterion_verdict, Verdict::Violated);
    assert!((report.c_tilde_estimate + 1.0).abs() < 1e-6);
    assert!(corrected_residual_l2(&spec, &report, &opts).unwrap() < 1e-4);
}

#[test]
fn nonsmooth_solution_converges_pointwise() {
    let pair = riemann_liouville_pair(0.5).unwrap();
    let ctx = OperatorContext::new(pair.clone(), Interval::unit(), DEFAULT_QUAD_ORDER).unwrap();
    let phi = Integrand::with_left_power(0.0, 0.2, |_| 1.0);
    let f = sonin_integral_of(&ctx, &phi, KernelRole::Rho).unwrap();
    let params = WeightParams::new(0.5, 0.5).unwrap();
    let errors: Vec<f64> = [16, 64]
        .iter()
        .map(|&n| {
            let spec = ProblemSpec::new(pair.clone(), Interval::unit(), params, 2.0, f.clone(), n).unwrap();
            let psi = solve(&spec, &SolverOptions::default()).unwrap().psi.to_integrand().unwrap();
            [0.25, 0.5, 0.75]
                .iter()
                .map(|&x: &f64| (psi.eval(x) - x.powf(0.2)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(errors[1] < errors[0] && errors[1] < 1e-2, "{errors:?}");
}

#[test]
fn p4_report_populates_functionals() {
    let pair = riemann_liouville_pair(0.5).unwrap();
    let params = WeightParams::new(0.5, 0.5).unwrap();
    let mut spec = manufactured(&pair, Interval::unit(), params, 2, 16);
    spec.p = 4.0;
    let report = solve(&spec, &SolverOptions::default()).unwrap();
    assert_eq!(report.diagnostics.xi, 8.0);
    assert_eq!(report.b_functional_partial_sums.len(), 17);
    assert_eq!(report.mm_weighted_sums.len(), 16);
    assert_eq!(report.pollard_ok, None);
    assert!(report.psi_lp_norm > 0.0);
}
