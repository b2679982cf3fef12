//! Stepsize sequences `γ_n` and Bernstein order sequences `m_n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::TheoryConstants;
use crate::error::{domain, Error, Result};

/// `γ_n = min(1, γ₀ n^{-α})` with `α ∈ (1/2, 1]`.
///
/// The clamp at 1 only matters for `γ₀ > 1` or at `n = 1` with `γ₀ = 1`; in
/// the latter case `Π_n = 0` for every `n` and `f_1 = Z_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepsizeSchedule {
    gamma0: f64,
    alpha: f64,
}

impl StepsizeSchedule {
    pub fn new(gamma0: f64, alpha: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(domain(format!("stepsize constant gamma0 = {gamma0} must be positive")));
        }
        if !(alpha > 0.5 && alpha <= 1.0) {
            return Err(domain(format!("stepsize exponent alpha = {alpha} must lie in (1/2, 1]")));
        }
        Ok(Self { gamma0, alpha })
    }

    /// `γ_n = γ₀ / n`.
    pub fn harmonic(gamma0: f64) -> Result<Self> {
        Self::new(gamma0, 1.0)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ξ = lim (n γ_n)^{-1}`: `1/γ₀` when `α = 1`, otherwise 0.
    pub fn xi(&self) -> f64 {
        if self.alpha == 1.0 {
            1.0 / self.gamma0
        } else {
            0.0
        }
    }

    /// `lim n γ_n` (infinite when `α < 1`).
    pub fn limit_n_gamma(&self) -> f64 {
        if self.alpha == 1.0 {
            self.gamma0
        } else {
            f64::INFINITY
        }
    }

    pub fn gamma_at(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(domain("stepsize index n must be at least 1"));
        }
        Ok(self.gamma_unchecked(n))
    }

    #[inline]
    pub(crate) fn gamma_unchecked(&self, n: usize) -> f64 {
        let g = if self.alpha == 1.0 {
            self.gamma0 / n as f64
        } else {
            self.gamma0 * (n as f64).powf(-self.alpha)
        };
        g.min(1.0)
    }

    /// Weights `w_k = γ_k ∏_{j=k+1}^{n} (1 - γ_j)`, `k = 1..=n`, so that the
    /// recursion started from zero gives `f_n = Σ_k w_k Z_k`.
    pub fn recursion_weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        let mut tail = 1.0;
        for k in (1..=n).rev() {
            let g = self.gamma_unchecked(k);
            w[k - 1] = g * tail;
            tail *= 1.0 - g;
        }
        w
    }

    /// `γ₀ = 1` (the MISE-optimal constant).
    pub fn r1() -> Self {
        Self { gamma0: 1.0, alpha: 1.0 }
    }

    /// `γ₀ = 1 - a/2` with `a = 2/9`, i.e. `8/9`.
    pub fn r2() -> Self {
        Self { gamma0: 8.0 / 9.0, alpha: 1.0 }
    }

    /// `γ₀ = 1 - a` with `a = 1/5`, i.e. `4/5`.
    pub fn r3() -> Self {
        Self { gamma0: 0.8, alpha: 1.0 }
    }
}

/// Named presets "r1", "r2", "r3".
impl FromStr for StepsizeSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r1" => Ok(Self::r1()),
            "r2" => Ok(Self::r2()),
            "r3" => Ok(Self::r3()),
            other => Err(Error::Parse(format!(
                "unknown stepsize preset `{other}` (expected r1, r2 or r3)"
            ))),
        }
    }
}

impl fmt::Display for StepsizeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gamma_n = {} n^-{}", self.gamma0, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    /// Round to the nearest even integer, never below 2, so `m/2` is an order.
    ForceEven,
}

/// `m_n = nearest_even(c n^a)`, floored at 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderSchedule {
    c: f64,
    a: f64,
    parity: Parity,
}

impl OrderSchedule {
    /// `c = 0` is accepted and yields the minimal order 2 everywhere (this is
    /// what the optimal constant degenerates to when the bias functional vanishes).
    pub fn new(c: f64, a: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(domain(format!("order constant c = {c} must be finite and nonnegative")));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(domain(format!("order exponent a = {a} must lie in (0, 1)")));
        }
        Ok(Self {
            c,
            a,
            parity: Parity::ForceEven,
        })
    }

    /// The fixed order `m` at every step (`a = 0`). Outside the regularly
    /// varying class the theory assumes, but handy as a reference point.
    pub fn constant(m: usize) -> Result<Self> {
        if m < 2 || m % 2 != 0 {
            return Err(domain(format!("constant order m = {m} must be even and at least 2")));
        }
        Ok(Self {
            c: m as f64,
            a: 0.0,
            parity: Parity::ForceEven,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn order_at(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(domain("order index n must be at least 1"));
        }
        Ok(self.order_unchecked(n))
    }

    #[inline]
    pub(crate) fn order_unchecked(&self, n: usize) -> usize {
        nearest_even(self.c * (n as f64).powf(self.a))
    }

    /// Real-valued `c n^a` before rounding.
    pub fn continuous_at(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(self.a)
    }
}

/// Nearest even integer to `v`, at least 2. Halfway cases round away from zero.
pub fn nearest_even(v: f64) -> usize {
    if !(v.is_finite()) || v <= 2.0 {
        return 2;
    }
    2 * (v / 2.0).round() as usize
}

/// Nearest positive multiple of `step` to `v`, at least `step`.
pub fn nearest_multiple(v: f64, step: usize) -> usize {
    debug_assert!(step >= 1);
    if !(v.is_finite()) || v <= step as f64 {
        return step;
    }
    step * (v / step as f64).round() as usize
}

/// Running `Π_n = ∏_{j<=n} (1 - γ_j)`, with `Π_0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiProduct {
    value: f64,
    n: usize,
}

impl Default for PiProduct {
    fn default() -> Self {
        Self { value: 1.0, n: 0 }
    }
}

impl PiProduct {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&mut self, gamma: f64) {
        self.value *= 1.0 - gamma;
        self.n += 1;
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn count(&self) -> usize {
        self.n
    }
}

/// Leading constant `c` of the MISE-optimal order schedule `m_n = c n^{2α/9}`
/// for the recursive estimator:
/// `c = 2^{2/9} (1 - 4ξ/9)^{-2/9} [32 C₂ / (C₁ C₃)]^{2/9} γ₀^{-2/9}`,
/// which for `α = 1` is `2^{2/9} (γ₀ - 4/9)^{-2/9} [32 C₂ / (C₁ C₃)]^{2/9}`.
pub fn optimal_order_constant(tc: &TheoryConstants, s: &StepsizeSchedule) -> Result<f64> {
    let shrink = 1.0 - 4.0 * s.xi() / 9.0;
    if shrink <= 0.0 {
        return Err(Error::Regime(format!(
            "optimal order needs gamma0 > 4/9 (got gamma0 = {}, so 1 - 4xi/9 = {shrink})",
            s.gamma0()
        )));
    }
    let ratio = 32.0 * tc.c2 / (tc.c1 * tc.c3);
    Ok(2f64.powf(2.0 / 9.0)
        * shrink.powf(-2.0 / 9.0)
        * ratio.powf(2.0 / 9.0)
        * s.gamma0().powf(-2.0 / 9.0))
}

/// MISE-optimal order schedule for the recursive estimator under `s`.
pub fn optimal_order_schedule(tc: &TheoryConstants, s: &StepsizeSchedule) -> Result<OrderSchedule> {
    OrderSchedule::new(optimal_order_constant(tc, s)?, 2.0 * s.alpha() / 9.0)
}

/// `N [1 - v_{N-1} / v_N]` for the last two terms of `seq`, a numerical
/// stand-in for the exponent of a regularly varying sequence. Convergence is
/// slow (`~1/log N`) when the sequence carries logarithmic factors.
pub fn gs_exponent_diagnostic(seq: &[f64]) -> Result<f64> {
    if seq.len() < 10 {
        return Err(domain(format!(
            "GS diagnostic needs at least 10 terms, got {}",
            seq.len()
        )));
    }
    if let Some(i) = seq.iter().position(|&v| !(v > 0.0)) {
        return Err(domain(format!("GS diagnostic term {} = {} is not positive", i + 1, seq[i])));
    }
    let n = seq.len();
    Ok(n as f64 * (1.0 - seq[n - 2] / seq[n - 1]))
}

/// Where `lim n γ_n` sits relative to the lower bounds the theory needs.
///
/// Two interior bounds are reported because they are stated two ways:
/// `min(2a, (2α - a)/4)` and `min(a, (2α + a)/4)`. The edge bound is
/// `min(2a, (α - a)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub limit_n_gamma: f64,
    pub interior_bound: f64,
    pub interior_ok: bool,
    pub alternative_interior_bound: f64,
    pub alternative_interior_ok: bool,
    pub edge_bound: f64,
    pub edge_ok: bool,
    /// `1 - 2aξ > 0` and `4 - (2α - a)ξ > 0`.
    pub interior_denominators_positive: bool,
    /// `1 - 2aξ > 0` and `2 - (α - a)ξ > 0`.
    pub edge_denominators_positive: bool,
}

impl AssumptionReport {
    pub fn any_violation(&self) -> bool {
        !(self.interior_ok && self.alternative_interior_ok && self.edge_ok)
    }
}

pub fn check_assumptions(s: &StepsizeSchedule, o: &OrderSchedule) -> AssumptionReport {
    let (a, alpha, xi) = (o.a(), s.alpha(), s.xi());
    let lim = s.limit_n_gamma();
    let interior_bound = (2.0 * a).min((2.0 * alpha - a) / 4.0);
    let alternative_interior_bound = a.min((2.0 * alpha + a) / 4.0);
    let edge_bound = (2.0 * a).min((alpha - a) / 2.0);
    AssumptionReport {
        limit_n_gamma: lim,
        interior_bound,
        interior_ok: lim > interior_bound,
        alternative_interior_bound,
        alternative_interior_ok: lim > alternative_interior_bound,
        edge_bound,
        edge_ok: lim > edge_bound,
        interior_denominators_positive: 1.0 - 2.0 * a * xi > 0.0
            && 4.0 - (2.0 * alpha - a) * xi > 0.0,
        edge_denominators_positive: 1.0 - 2.0 * a * xi > 0.0 && 2.0 - (alpha - a) * xi > 0.0,
    }
}
