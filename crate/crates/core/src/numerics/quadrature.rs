use std::f64::consts::PI;

use crate::{Error, Result};

pub const DEFAULT_ORDER: usize = 32;
pub const DEFAULT_PANELS: usize = 8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// The `order`-point Gauss–Legendre rule (exact for degree `2·order − 1`).
///
/// Nodes are the roots of `P_order`, found by Newton's method from the
/// Tricomi initial guesses; they come out strictly increasing.
pub fn gauss_legendre(order: usize) -> QuadratureRule {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for iter in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 || iter == 99 {
                dp = legendre_with_derivative(n, z).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal sub-intervals of `[a, b]`.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    rule: &QuadratureRule,
) -> f64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let half = 0.5 * width;
        let mid = lo + half;
        let mut acc = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += w * f(mid + half * x);
        }
        total += half * acc;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// Difference between the last two panel doublings.
    pub error: f64,
    pub panels: usize,
}

/// Composite order-32 quadrature that doubles the panel count (starting from
/// 8) until two successive values agree to `tol · max(1, |value|)`.
pub fn integrate_checked(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureEstimate> {
    let rule = gauss_legendre(DEFAULT_ORDER);
    let mut panels = DEFAULT_PANELS;
    let mut previous = integrate(&mut f, a, b, panels, &rule);
    while panels <= 1024 {
        panels *= 2;
        let value = integrate(&mut f, a, b, panels, &rule);
        let error = (value - previous).abs();
        if error <= tol * value.abs().max(1.0) {
            return Ok(QuadratureEstimate { value, error, panels });
        }
        previous = value;
    }
    Err(Error::InvalidArgument(format!(
        "quadrature on [{a}, {b}] did not settle to {tol:e} within {panels} panels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_rule() {
        let r = gauss_legendre(1);
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_rule() {
        let r = gauss_legendre(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes()[0] + x).abs() < 1e-15 && (r.nodes()[1] - x).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15 && (r.weights()[1] - 1.0).abs() < 1e-15);
        // Exact on x² and x³.
        let q = |f: fn(f64) -> f64| integrate(f, -1.0, 1.0, 1, &r);
        assert!((q(|x| x * x) - 2.0 / 3.0).abs() < 1e-15);
        assert!(q(|x| x * x * x).abs() < 1e-15);
    }

    #[test]
    fn three_point_rule_integrates_quartic() {
        let r = gauss_legendre(3);
        assert!((integrate(|x| x.powi(4), -1.0, 1.0, 1, &r) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rules_are_well_formed() {
        for order in 1..=64 {
            let r = gauss_legendre(order);
            let sum: f64 = r.weights().iter().sum();
            assert!((sum - 2.0).abs() < 1e-14, "order {order}: {sum}");
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!(r.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(r.nodes().iter().all(|x| x.abs() < 1.0));
        }
    }

    #[test]
    fn polynomial_exactness() {
        for order in [4, 9, 16, 32] {
            let r = gauss_legendre(order);
            for deg in 0..2 * order as i32 {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = integrate(|x| x.powi(deg), -1.0, 1.0, 1, &r);
                assert!((got - exact).abs() <= 1e-13 * exact.abs().max(1.0), "order {order} deg {deg}");
            }
        }
    }

    #[test]
    fn composite_constants_and_sine() {
        let r = gauss_legendre(16);
        assert!((integrate(|_| 1.0, 0.0, PI, 4, &r) - PI).abs() < 1e-14);
        assert!((integrate(f64::sin, 0.0, PI, 4, &r) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn checked_integration_settles() {
        let est = integrate_checked(|x| (3.0 * x).cos().exp(), 0.0, 2.0, 1e-13).unwrap();
        // Trapezoid on a periodic integrand over a full period is spectrally
        // accurate; 2π/3 is the period, so use [0, 2π/3].
        let period = 2.0 * PI / 3.0;
        let trap = {
            let n = 400;
            (0..n).map(|i| (3.0 * period * i as f64 / n as f64).cos().exp()).sum::<f64>() * period / n as f64
        };
        let est_period = integrate_checked(|x| (3.0 * x).cos().exp(), 0.0, period, 1e-13).unwrap();
        assert!((est_period.value - trap).abs() < 1e-13);
        assert!(est.error < 1e-13);
    }
}
