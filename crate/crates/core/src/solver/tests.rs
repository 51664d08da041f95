use super::*;
use crate::jacobi::{gauss_jacobi_rule, lp_norm_weighted};
use crate::kernels::riemann_liouville_pair;
use crate::operators::apply_sonin_integral;

fn half() -> WeightParams {
    WeightParams::new(0.5, 0.5).unwrap()
}

fn basis(params: WeightParams, n: usize) -> JacobiBasis {
    JacobiBasis::new(Interval::unit(), params, n).unwrap()
}

/// f = I^ϱ φ* through the forward operator.
fn forward(alpha: f64, phi: Integrand) -> (SoninPair, Integrand) {
    let pair = riemann_liouville_pair(alpha).unwrap();
    let ctx = OperatorContext::new(pair.clone(), Interval::unit(), DEFAULT_QUAD_ORDER).unwrap();
    let f = sonin_integral_of(&ctx, &phi, KernelRole::Rho).unwrap();
    (pair, f)
}

fn jacobi_phi(params: WeightParams, k: usize) -> Integrand {
    let b = basis(params, k);
    Integrand::new(move |x| b.eval(k, x).unwrap())
}

fn spec(pair: SoninPair, rhs: Integrand, n: usize) -> ProblemSpec {
    ProblemSpec::new(pair, Interval::unit(), half(), 2.0, rhs, n).unwrap()
}

#[test]
fn manufactured_p2_recovers_coefficients() {
    let (pair, f) = forward(0.5, jacobi_phi(half(), 2));
    let report = solve(&spec(pair, f, 32), &SolverOptions::default()).unwrap();
    assert_eq!(report.psi.len(), 33);
    assert_eq!(report.g_coeffs.len(), 34);
    assert_eq!(report.boundary_sum_trace.len(), 34);
    for (m, c) in report.psi.coeffs.iter().enumerate() {
        let want = if m == 2 { 1.0 } else { 0.0 };
        assert!((c - want).abs() < 1e-6, "psi_{m} = {c}");
    }
    assert!(report.residual_l2 < 1e-6, "{}", report.residual_l2);
    assert!(report.boundary_sum_trace.last().unwrap().abs() < 1e-4);
    assert!(report.c_tilde_estimate.abs() < 1e-4);
    assert_eq!(report.criterion_verdict, Verdict::Satisfied, "{:?}", report.diagnostics);
}

#[test]
fn zero_rhs() {
    let pair = riemann_liouville_pair(0.5).unwrap();
    let report = solve(&spec(pair, Integrand::zero(), 16), &SolverOptions::default()).unwrap();
    assert!(report.psi.coeffs.iter().all(|&c| c == 0.0));
    assert_eq!(report.residual_l2, 0.0);
    assert_eq!(report.c_tilde_estimate, 0.0);
}

#[test]
fn few_modes_inconclusive() {
    let (pair, f) = forward(0.5, jacobi_phi(half(), 1));
    let report = solve(&spec(pair, f, 4), &SolverOptions::default()).unwrap();
    assert_eq!(report.criterion_verdict, Verdict::Inconclusive);
}

#[test]
fn counterexample_has_boundary_defect() {
    let alpha: f64 = 0.5;
    let pair = riemann_liouville_pair(alpha).unwrap();
    let g = crate::jacobi::gamma(alpha).unwrap();
    let f = Integrand::with_left_power(0.0, alpha - 1.0, move |_| 1.0 / g);
    let s = spec(pair, f, 32);
    let opts = SolverOptions {
        corrected_residual: true,
        ..SolverOptions::default()
    };
    let report = solve(&s, &opts).unwrap();
    assert_eq!(report.criterion_verdict, Verdict::Violated);
    assert!((report.c_tilde_estimate + 1.0).abs() < 1e-8);
    assert!(report.corrected_residual_l2.unwrap() < 1e-4);
    assert!(report.residual_l2 > 0.1);
    assert!(report.warnings.iter().any(|w| w.contains("boundary defect")));
    let again = corrected_residual_l2(&s, &report, &opts).unwrap();
    assert_eq!(again, report.corrected_residual_l2.unwrap());
}

#[test]
fn nonsmooth_self_convergence() {
    let phi = Integrand::with_left_power(0.0, 0.2, |_| 1.0);
    let (pair, f) = forward(0.5, phi);
    let residuals: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| solve(&spec(pair.clone(), f.clone(), n), &SolverOptions::default()).unwrap().residual_l2)
        .collect();
    assert!(residuals[0] > residuals[1] && residuals[1] > residuals[2], "{residuals:?}");
}

#[test]
fn linearity_of_pipeline() {
    let pair = riemann_liouville_pair(0.3).unwrap();
    let f1 = Integrand::new(|x: f64| (2.0 * x).sin() + 0.3);
    let f2 = Integrand::new(|x: f64| x.exp() * x);
    let (a, b) = (1.7, -0.45);
    let combo = Integrand::linear_combination(&[(a, f1.clone()), (b, f2.clone())]);
    let opts = SolverOptions::default();
    let r1 = solve(&spec(pair.clone(), f1, 24), &opts).unwrap();
    let r2 = solve(&spec(pair.clone(), f2, 24), &opts).unwrap();
    let rc = solve(&spec(pair, combo, 24), &opts).unwrap();
    for m in 0..rc.psi.len() {
        let want = a * r1.psi.coeffs[m] + b * r2.psi.coeffs[m];
        assert!((rc.psi.coeffs[m] - want).abs() < 1e-8);
    }
}

#[test]
fn psi_matches_dense_projection_of_g() {
    // ψ_m against C_m ∫ p_{m+1} g ω^{β−1,γ−1} with g sampled pointwise
    // under an unfolded dense rule.
    let (pair, f) = forward(0.5, jacobi_phi(half(), 3));
    let report = solve(&spec(pair.clone(), f.clone(), 12), &SolverOptions::default()).unwrap();
    let ctx = OperatorContext::new(pair, Interval::unit(), DEFAULT_QUAD_ORDER).unwrap();
    let shifted = basis(half().shifted().unwrap(), 13);
    let rule = gauss_jacobi_rule(-0.5, -0.5, 80).unwrap();
    let gs: Vec<f64> = rule
        .nodes()
        .iter()
        .map(|&x| apply_sonin_integral(&ctx, &f, x, KernelRole::Theta).unwrap())
        .collect();
    for m in 0..=12 {
        let proj: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .zip(&gs)
            .map(|((&x, &w), &g)| w * g * shifted.eval(m + 1, x).unwrap())
            .sum();
        let want = c_m(half(), m).unwrap() * proj;
        assert!((report.psi.coeffs[m] - want).abs() < 1e-7, "m {m}");
    }
}

#[test]
fn residual_matches_external_norm() {
    let f = Integrand::new(|x: f64| (3.0 * x).cos());
    let pair = riemann_liouville_pair(0.7).unwrap();
    let s = spec(pair.clone(), f.clone(), 16);
    let report = solve(&s, &SolverOptions::default()).unwrap();
    let ctx = OperatorContext::new(pair, Interval::unit(), DEFAULT_QUAD_ORDER).unwrap();
    let psi = report.psi.to_integrand().unwrap();
    // pointwise I^ϱψ with its x^0.7 factor declared, then combined with f
    let image = Integrand::with_left_power(0.0, 0.7, move |x| {
        apply_sonin_integral(&ctx, &psi, x, KernelRole::Rho).unwrap() / x.powf(0.7)
    });
    let residual = Integrand::linear_combination(&[(1.0, image), (-1.0, f.anchored_at(0.0))]);
    let external = lp_norm_weighted(&residual, half(), Interval::unit(), 2.0).unwrap();
    assert!(
        (external - report.residual_l2).abs() < 1e-9,
        "{external} vs {}",
        report.residual_l2
    );
}

#[test]
fn mm_sums_bounded_for_smooth_problems() {
    let (pair, f) = forward(0.5, jacobi_phi(half(), 4));
    for p in [2.0, 4.0] {
        let s = ProblemSpec::new(pair.clone(), Interval::unit(), half(), p, f.clone(), 32).unwrap();
        let report = solve(&s, &SolverOptions::default()).unwrap();
        let sums = &report.mm_weighted_sums;
        assert_eq!(sums.len(), 32);
        let mid = sums[15];
        let last = *sums.last().unwrap();
        assert!(last.is_finite() && (last - mid).abs() <= 1e-6 * mid.max(1.0), "{mid} {last}");
    }
}

#[test]
fn deterministic() {
    let f = Integrand::new(|x: f64| x.sqrt() + 1.0);
    let pair = riemann_liouville_pair(0.4).unwrap();
    let r1 = solve(&spec(pair.clone(), f.clone(), 20), &SolverOptions::default()).unwrap();
    let r2 = solve(&spec(pair, f, 20), &SolverOptions::default()).unwrap();
    assert_eq!(r1.psi.coeffs, r2.psi.coeffs);
    assert_eq!(r1.residual_l2.to_bits(), r2.residual_l2.to_bits());
}

#[test]
fn validation() {
    let pair = riemann_liouville_pair(0.5).unwrap();
    let f = Integrand::zero();
    let bad = WeightParams::new(1.5, 0.5).unwrap();
    let err = ProblemSpec::new(pair.clone(), Interval::unit(), bad, 2.0, f.clone(), 8).unwrap_err();
    assert!(matches!(err, Error::Domain { name: "beta", .. }));
    assert!(ProblemSpec::new(pair.clone(), Interval::unit(), half(), 1.0, f.clone(), 8).is_err());
    assert!(ProblemSpec::new(pair.clone(), Interval::unit(), half(), 2.0, f.clone(), 3).is_err());
    let long = Interval::new(0.0, 3.0).unwrap();
    let cos = crate::kernels::cosine_pair(1.0, 1.0).unwrap();
    let s = ProblemSpec::new(cos, long, half(), 2.0, f, 8).unwrap();
    assert!(solve(&s, &SolverOptions::default()).is_err());
}

#[test]
fn necessity_records_for_small_p() {
    let (pair, f) = forward(0.5, jacobi_phi(half(), 2));
    let s = ProblemSpec::new(pair, Interval::unit(), half(), 1.7, f, 16).unwrap();
    let report = solve(&s, &SolverOptions::default()).unwrap();
    assert_eq!(report.pollard_ok, Some(true));
    let lq = report.diagnostics.rho_in_conjugate_lq.as_ref().unwrap();
    // p′ = 1.7/0.7 ≈ 2.43: (α−1)p′ = −1.21 < −1
    assert!(!lq.holds);
    assert!(report.warnings.iter().any(|w| w.contains("necessary")));
}
