//! Gauss–Legendre rules on `[0, 1]` and the integration helpers built on them.
//!
//! An `n`-node rule integrates polynomials of degree `2n - 1` exactly, so a
//! Bernstein estimate of order `m` (a polynomial of degree `m - 1`) has its
//! square integrated exactly whenever `n >= m`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, Mutex};

use crate::error::{Error, Result};

/// Default node count used for ISE, mass and `∫f²` integrals.
pub const DEFAULT_NODES: usize = 512;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static RULES: LazyLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

impl GaussLegendre {
    /// Builds the `n`-node rule on `[0, 1]` by Newton iteration on `P_n`.
    /// Nodes are returned in increasing order.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let step = p / d;
                z -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d.is_finite() {
                dp = d;
            }
            // z is the i-th largest root on [-1, 1]; map to [0, 1] ascending.
            let w = 1.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = 0.5 * (1.0 - z);
            nodes[n - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Process-wide cached rule with `n` nodes.
    pub fn shared(n: usize) -> Arc<Self> {
        let mut rules = RULES.lock().expect("quadrature cache poisoned");
        rules
            .entry(n)
            .or_insert_with(|| Arc::new(Self::new(n)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let h = b - a;
        h * self.integrate(|t| f(a + h * t))
    }

    /// Weighted sum of integrand values already evaluated at the nodes.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// `P_n(z)` and `P_n'(z)` via the three-term recurrence.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre on `[a, b]`, doubling the panel count until two
/// successive estimates agree to `rel_tol` (relative to `max(1, |I|)`).
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    const MAX_LEVEL: u32 = 12;
    let rule = GaussLegendre::shared(32);
    let composite = |panels: usize| -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                rule.integrate_on(lo, lo + h, &f)
            })
            .sum()
    };
    let mut prev = composite(1);
    for level in 1..=MAX_LEVEL {
        let cur = composite(1 << level);
        if !cur.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand on [{a}, {b}] at level {level}"
            )));
        }
        if (cur - prev).abs() <= rel_tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "no convergence to {rel_tol:e} on [{a}, {b}] after {} panels (last estimate {prev})",
        1u32 << MAX_LEVEL
    )))
}

/// `∫_0^1 g(x) / sqrt(x (1 - x)) dx` through `x = sin²(θ/2)`, which turns the
/// integrable endpoint singularities into `∫_0^π g(sin²(θ/2)) dθ`.
pub fn integrate_arcsine_weighted(g: impl Fn(f64) -> f64, rel_tol: f64) -> Result<f64> {
    integrate_adaptive(
        |theta| {
            let s = (0.5 * theta).sin();
            g(s * s)
        },
        0.0,
        PI,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for n in [1, 2, 5, 64, 512, 1024] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn nodes_are_increasing_and_interior() {
        let rule = GaussLegendre::new(512);
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(rule.nodes()[0] > 0.0 && rule.nodes()[511] < 1.0);
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        // ∫_0^1 x^d dx = 1/(d+1)
        for n in [3usize, 10, 40] {
            let rule = GaussLegendre::new(n);
            let d = 2 * n - 1;
            let got = rule.integrate(|x| x.powi(d as i32));
            assert!((got - 1.0 / (d as f64 + 1.0)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_smooth_integrand() {
        let got = integrate_adaptive(|x| (3.0 * x).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((got - ((3.0f64).exp() - 1.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_reports_divergence() {
        let err = integrate_adaptive(|x| 1.0 / x, 0.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Quadrature(_)));
    }

    #[test]
    fn arcsine_weight_integrates_to_pi() {
        // ∫ 1/sqrt(x(1-x)) = B(1/2, 1/2) = π
        let got = integrate_arcsine_weighted(|_| 1.0, 1e-13).unwrap();
        assert!((got - PI).abs() < 1e-12);
    }
}
