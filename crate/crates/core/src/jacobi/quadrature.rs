//! Gauss–Jacobi rules on (0,1) for ∫₀¹ u^left (1-u)^right g(u) du.

use super::recurrence::Recurrence;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    left_exponent: f64,
    right_exponent: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn left_exponent(&self) -> f64 {
        self.left_exponent
    }

    pub fn right_exponent(&self) -> f64 {
        self.right_exponent
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Σ wᵢ g(uᵢ), summed in node order.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * g(u))
            .sum()
    }

    /// Like `integrate`, but fails on the first non-finite sample and names
    /// the node where it happened (mapped through `to_x` for the message).
    pub fn try_integrate<F, M>(&self, mut g: F, to_x: M, context: &str) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
        M: Fn(f64) -> f64,
    {
        let mut acc = 0.0;
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            let v = g(u);
            if !v.is_finite() {
                return Err(Error::Evaluation {
                    at: to_x(u),
                    context: context.to_string(),
                });
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// Builds the `order`-point Gauss–Jacobi rule for the weight
/// u^left_exponent (1-u)^right_exponent on (0,1).
///
/// Eigenvalues of the Jacobi matrix seed the nodes, Newton's method on the
/// orthonormal recurrence polishes them, and the weights are Christoffel
/// numbers 1/Σ q_k(uᵢ)².
pub fn gauss_jacobi_rule(
    left_exponent: f64,
    right_exponent: f64,
    order: usize,
) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::Argument("quadrature order must be at least 1".into()));
    }
    let rec = Recurrence::new(left_exponent, right_exponent, order)?;
    let seeds = eigen_seeds(&rec, order);

    let mut nodes = Vec::with_capacity(order);
    for (i, &seed) in seeds.iter().enumerate() {
        nodes.push(newton_polish(&rec, order, seed).ok_or_else(|| {
            Error::Quadrature(format!(
                "Newton iteration for node {i} of {order} (seed {seed:e}) did not converge"
            ))
        })?);
    }
    for (i, pair) in nodes.windows(2).enumerate() {
        if !(pair[1] > pair[0]) {
            return Err(Error::Quadrature(format!(
                "nodes {i} and {} coincide or are out of order ({:e}, {:e})",
                i + 1,
                pair[0],
                pair[1]
            )));
        }
    }
    if nodes[0] <= 0.0 || nodes[order - 1] >= 1.0 {
        return Err(Error::Quadrature("node outside (0,1)".into()));
    }

    let mut buf = Vec::with_capacity(order);
    let weights = nodes
        .iter()
        .map(|&u| {
            rec.values_into(u, order - 1, &mut buf);
            1.0 / buf.iter().map(|q| q * q).sum::<f64>()
        })
        .collect();

    Ok(QuadratureRule {
        nodes,
        weights,
        left_exponent,
        right_exponent,
    })
}

fn eigen_seeds(rec: &Recurrence, order: usize) -> Vec<f64> {
    let diag = rec.diagonal(order);
    let off = rec.off_diagonal(order);
    let mut m = DMatrix::<f64>::zeros(order, order);
    for i in 0..order {
        m[(i, i)] = diag[i];
        if i + 1 < order {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

fn newton_polish(rec: &Recurrence, order: usize, seed: f64) -> Option<f64> {
    // Near the endpoints the recurrence itself is only accurate to ~1e-11
    // relative, so iteration also stops once steps stop shrinking there.
    const ROUNDOFF_FLOOR: f64 = 1e-9;
    let mut u = seed.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    let mut prev_step = f64::INFINITY;
    for _ in 0..40 {
        let (q, dq) = rec.value_and_derivative(u, order);
        if dq == 0.0 || !dq.is_finite() {
            return None;
        }
        let step = q / dq;
        let scale = u.min(1.0 - u);
        if step.abs() <= 4.0 * f64::EPSILON * scale {
            return Some(u - step);
        }
        if step.abs() >= 0.5 * prev_step.abs() && step.abs() <= ROUNDOFF_FLOOR * scale {
            return Some(u);
        }
        u -= step;
        if !(u > 0.0 && u < 1.0) {
            return None;
        }
        prev_step = step;
    }
    None
}

type RuleKey = (u64, u64, usize);

/// Memoizes rules by (left, right, order). Shared across threads.
#[derive(Debug, Default)]
pub struct RuleCache {
    rules: Mutex<HashMap<RuleKey, Arc<QuadratureRule>>>,
}

impl RuleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, left: f64, right: f64, order: usize) -> Result<Arc<QuadratureRule>> {
        let key = (left.to_bits(), right.to_bits(), order);
        if let Some(rule) = self.rules.lock().expect("rule cache poisoned").get(&key) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(gauss_jacobi_rule(left, right, order)?);
        self.rules
            .lock()
            .expect("rule cache poisoned")
            .entry(key)
            .or_insert_with(|| Arc::clone(&rule));
        Ok(rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::special::beta_ln;
    use std::f64::consts::PI;

    fn moment(left: f64, right: f64, k: usize) -> f64 {
        beta_ln(left + k as f64 + 1.0, right + 1.0).unwrap().exp()
    }

    fn assert_exact(rule: &QuadratureRule) {
        let (l, r) = (rule.left_exponent(), rule.right_exponent());
        for k in 0..2 * rule.order() {
            let got = rule.integrate(|u| u.powi(k as i32));
            let want = moment(l, r, k);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "left {l} right {r} order {} k {k}: {got} vs {want}",
                rule.order()
            );
        }
    }

    #[test]
    fn chebyshev_mass_is_pi() {
        let rule = gauss_jacobi_rule(-0.5, -0.5, 8).unwrap();
        let mass: f64 = rule.weights().iter().sum();
        assert!((mass - PI).abs() < 1e-14);
    }

    #[test]
    fn legendre_cubic() {
        let rule = gauss_jacobi_rule(0.0, 0.0, 4).unwrap();
        assert!((rule.integrate(|u| u * u * u) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn half_power_moment() {
        let rule = gauss_jacobi_rule(0.5, 0.0, 16).unwrap();
        assert!((rule.integrate(|u| u * u) - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_exactness_across_exponents() {
        for &(l, r) in &[(0.0, 0.0), (-0.5, -0.5), (0.5, -0.3), (-0.9, 0.7), (2.5, 1.0)] {
            for &order in &[1usize, 2, 5, 16, 40] {
                assert_exact(&gauss_jacobi_rule(l, r, order).unwrap());
            }
        }
    }

    #[test]
    fn high_order_rules_are_exact() {
        for &order in &[64usize, 96, 144] {
            assert_exact(&gauss_jacobi_rule(-0.5, 0.3, order).unwrap());
        }
    }

    #[test]
    fn nodes_interior_and_weights_positive() {
        let rule = gauss_jacobi_rule(-0.95, -0.95, 100).unwrap();
        assert!(rule.nodes().iter().all(|&u| u > 0.0 && u < 1.0));
        assert!(rule.weights().iter().all(|&w| w > 0.0));
        assert!(rule.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(gauss_jacobi_rule(0.0, 0.0, 0), Err(Error::Argument(_))));
        assert!(matches!(gauss_jacobi_rule(-1.0, 0.0, 4), Err(Error::Domain { .. })));
        assert!(matches!(gauss_jacobi_rule(0.0, -2.0, 4), Err(Error::Domain { .. })));
    }

    #[test]
    fn cache_returns_same_rule() {
        let cache = RuleCache::new();
        let a = cache.get(0.2, 0.1, 12).unwrap();
        let b = cache.get(0.2, 0.1, 12).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
