//! Leading-order bias, variance, MSE and MISE of the recursive estimator and
//! of the batch comparison estimators, their MISE-optimal orders, and the
//! limiting normal law of the recursive estimator at interior points.

use serde::Serialize;

use super::constants::{lambda1, lambda2, TheoryConstants};
use super::density::{delta1, delta2, psi, TrueDensity};
use crate::error::{domain, Error, Result};
use crate::estimators::BatchKind;
use crate::schedules::{
    nearest_even, nearest_multiple, optimal_order_constant, OrderSchedule, StepsizeSchedule,
};

const SPLIT_TOL: f64 = 1e-12;

/// An estimator family, as far as order selection is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Method {
    Recursive(StepsizeSchedule),
    Batch(BatchKind),
}

/// An estimator with its smoothing fully specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Tuning {
    Recursive {
        stepsize: StepsizeSchedule,
        orders: OrderSchedule,
    },
    Batch {
        kind: BatchKind,
        m: usize,
    },
}

/// Which leading terms survive for the recursive estimator, depending on
/// where the order exponent `a` sits relative to the split point
/// (`2α/9` in the interior, `α/5` at the endpoints).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `a` below the split: squared bias dominates, variance is negligible.
    BiasDominated,
    /// `a` at the split: both terms are of the same order.
    Balanced,
    /// `a` above the split: variance dominates, bias is negligible.
    VarianceDominated,
}

impl Regime {
    pub fn classify(a: f64, split: f64) -> Self {
        if (a - split).abs() <= SPLIT_TOL * split.max(1.0) {
            Regime::Balanced
        } else if a < split {
            Regime::BiasDominated
        } else {
            Regime::VarianceDominated
        }
    }

    pub fn interior(a: f64, alpha: f64) -> Self {
        Self::classify(a, 2.0 * alpha / 9.0)
    }

    pub fn edge(a: f64, alpha: f64) -> Self {
        Self::classify(a, alpha / 5.0)
    }

    fn has_bias(self) -> bool {
        self != Regime::VarianceDominated
    }

    fn has_variance(self) -> bool {
        self != Regime::BiasDominated
    }
}

fn positive_factor(value: f64, what: &str) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Regime(format!("{what} = {value} must be positive")))
    }
}

/// `1 - 2aξ`, required positive whenever a bias term is present.
fn bias_denominator(a: f64, xi: f64) -> Result<f64> {
    positive_factor(1.0 - 2.0 * a * xi, "1 - 2 a xi")
}

/// `4 - (2α - a)ξ`, required positive whenever the interior variance is present.
fn interior_variance_denominator(a: f64, alpha: f64, xi: f64) -> Result<f64> {
    positive_factor(4.0 - (2.0 * alpha - a) * xi, "4 - (2 alpha - a) xi")
}

/// `2 - (α - a)ξ`, required positive whenever the edge variance is present.
fn edge_variance_denominator(a: f64, alpha: f64, xi: f64) -> Result<f64> {
    positive_factor(2.0 - (alpha - a) * xi, "2 - (alpha - a) xi")
}

fn check_n(n: usize) -> Result<f64> {
    if n == 0 {
        Err(domain("sample size n must be at least 1"))
    } else {
        Ok(n as f64)
    }
}

fn check_batch_order(kind: &BatchKind, m: usize) -> Result<f64> {
    kind.check_order(m)?;
    Ok(m as f64)
}

/// The integrated squared bias functional of a batch kind: `C₄` for Vitale,
/// `C₂`, `C₅`, `C₆` for the additive, multiplicative and normalized
/// corrections.
fn batch_bias_constant(tc: &TheoryConstants, kind: &BatchKind) -> f64 {
    match kind {
        BatchKind::Vitale => tc.c4,
        BatchKind::Leblanc | BatchKind::Generalized { .. } => tc.c2,
        BatchKind::Multiplicative { .. } => tc.c5,
        BatchKind::Normalized { .. } => tc.c6,
    }
}

/// Leading-term MISE.
///
/// Recursive: `C₂ m⁻⁴ 4/(1 - 2aξ)²` and/or `C₁C₃ γ_n m^{1/2} 2/(4 - (2α - a)ξ)`
/// according to [`Regime::interior`]. Batch kinds: `m^{1/2}C₁/n + C₄/m²`
/// (Vitale) and `λ₁(b) C₁ m^{1/2}/n + b² C/m⁴` with `C` the kind's bias
/// functional (`λ₁(2) = C₃` recovers Leblanc's `4C₂/m⁴`).
pub fn theoretical_mise(tc: &TheoryConstants, tuning: &Tuning, n: usize) -> Result<f64> {
    let nf = check_n(n)?;
    match tuning {
        Tuning::Recursive { stepsize, orders } => {
            let (a, alpha, xi) = (orders.a(), stepsize.alpha(), stepsize.xi());
            let m = orders.order_at(n)? as f64;
            let gamma = stepsize.gamma_at(n)?;
            let regime = Regime::interior(a, alpha);
            let mut total = 0.0;
            if regime.has_bias() {
                let den = bias_denominator(a, xi)?;
                total += tc.c2 * m.powi(-4) * 4.0 / (den * den);
            }
            if regime.has_variance() {
                let den = interior_variance_denominator(a, alpha, xi)?;
                total += tc.c1 * tc.c3 * gamma * m.sqrt() * 2.0 / den;
            }
            Ok(total)
        }
        Tuning::Batch { kind, m } => {
            let mf = check_batch_order(kind, *m)?;
            let bias = batch_bias_constant(tc, kind);
            Ok(match kind {
                BatchKind::Vitale => mf.sqrt() * tc.c1 / nf + bias / (mf * mf),
                _ => {
                    let b = kind.b() as f64;
                    lambda1(kind.b()) * tc.c1 * mf.sqrt() / nf + b * b * bias / mf.powi(4)
                }
            })
        }
    }
}

/// Leading bias, variance and `MSE = bias² + variance` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseTheory {
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
    /// Recursive kind only.
    pub regime: Option<Regime>,
}

impl PointwiseTheory {
    fn new(bias: f64, variance: f64, regime: Option<Regime>) -> Self {
        Self {
            bias,
            variance,
            mse: bias * bias + variance,
            regime,
        }
    }
}

/// Leading-order pointwise theory. Interior points use the `ψ`-weighted
/// variances; `x ∈ {0, 1}` uses the `m/n`-type edge variances, and for the
/// recursive kind the edge regime split at `α/5`. Terms that are of smaller
/// order in the active regime are reported as zero.
pub fn pointwise_theory(
    tc: &TheoryConstants,
    d: &dyn TrueDensity,
    tuning: &Tuning,
    x: f64,
    n: usize,
) -> Result<PointwiseTheory> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("x = {x} is outside [0, 1]")));
    }
    let nf = check_n(n)?;
    let edge = x == 0.0 || x == 1.0;
    let f = d.pdf(x);
    match tuning {
        Tuning::Recursive { stepsize, orders } => {
            let (a, alpha, xi) = (orders.a(), stepsize.alpha(), stepsize.xi());
            let m = orders.order_at(n)? as f64;
            let gamma = stepsize.gamma_at(n)?;
            let regime = if edge {
                Regime::edge(a, alpha)
            } else {
                Regime::interior(a, alpha)
            };
            let bias = if regime.has_bias() {
                -2.0 * delta2(d, x) / (m * m * bias_denominator(a, xi)?)
            } else {
                0.0
            };
            let variance = match (regime.has_variance(), edge) {
                (false, _) => 0.0,
                (true, false) => {
                    tc.c3 * gamma * m.sqrt() * 2.0 * f * psi(x)
                        / interior_variance_denominator(a, alpha, xi)?
                }
                (true, true) => 2.5 * gamma * m * f / edge_variance_denominator(a, alpha, xi)?,
            };
            Ok(PointwiseTheory::new(bias, variance, Some(regime)))
        }
        Tuning::Batch { kind, m } => {
            let mf = check_batch_order(kind, *m)?;
            let (bias, var_factor_interior, var_factor_edge) = match kind {
                BatchKind::Vitale => (delta1(d, x) / mf, 1.0, 1.0),
                _ => {
                    let b = kind.b();
                    let mut functional = delta2(d, x);
                    if matches!(
                        kind,
                        BatchKind::Multiplicative { .. } | BatchKind::Normalized { .. }
                    ) {
                        if !(f > 0.0) {
                            return Err(domain(format!(
                                "the multiplicative correction's bias needs f(x) > 0 (f({x}) = {f})"
                            )));
                        }
                        let d1 = delta1(d, x);
                        functional -= d1 * d1 / (2.0 * f);
                        if matches!(kind, BatchKind::Normalized { .. }) {
                            functional += f * tc.i_functional;
                        }
                    }
                    (-(b as f64) * functional / (mf * mf), lambda1(b), lambda2(b))
                }
            };
            let variance = if edge {
                var_factor_edge * mf * f / nf
            } else {
                var_factor_interior * mf.sqrt() * f * psi(x) / nf
            };
            Ok(PointwiseTheory::new(bias, variance, None))
        }
    }
}

/// Real-valued MISE-optimal order at sample size `n`, before rounding.
///
/// Recursive: `2^{2/9}(1 - 4ξ/9)^{-2/9}[32C₂/(C₁C₃)]^{2/9} γ_n^{-2/9}`.
/// Vitale: `[4C₄/C₁]^{2/5} n^{2/5}`. Leblanc: `[32C₂/(C₁C₃)]^{2/9} n^{2/9}`.
/// Generalized, multiplicative, normalized: `[b² 8C/(λ₁(b)C₁)]^{2/9} n^{2/9}`
/// with `C = C₂, C₅, C₆`.
pub fn optimal_order_continuous(tc: &TheoryConstants, method: &Method, n: usize) -> Result<f64> {
    let nf = check_n(n)?;
    if !(tc.c1 > 0.0) {
        return Err(domain(format!("C1 = {} must be positive", tc.c1)));
    }
    match method {
        Method::Recursive(s) => {
            let c = optimal_order_constant(tc, s)?;
            Ok(c * nf.powf(2.0 * s.alpha() / 9.0))
        }
        Method::Batch(kind) => {
            let bias = batch_bias_constant(tc, kind);
            Ok(match kind {
                BatchKind::Vitale => (4.0 * bias / tc.c1).powf(0.4) * nf.powf(0.4),
                BatchKind::Leblanc => {
                    (32.0 * bias / (tc.c1 * tc.c3)).powf(2.0 / 9.0) * nf.powf(2.0 / 9.0)
                }
                _ => {
                    let b = kind.b();
                    let bf = b as f64;
                    (bf * bf * 8.0 * bias / (lambda1(b) * tc.c1)).powf(2.0 / 9.0)
                        * nf.powf(2.0 / 9.0)
                }
            })
        }
    }
}

/// [`optimal_order_continuous`] rounded to the nearest admissible order: an
/// even integer for the recursive, Vitale and Leblanc kinds, otherwise a
/// multiple of `lcm(2, b)` so that both `m` and `m/b` are valid orders.
pub fn optimal_order(tc: &TheoryConstants, method: &Method, n: usize) -> Result<usize> {
    let v = optimal_order_continuous(tc, method, n)?;
    Ok(match method {
        Method::Recursive(_) => nearest_even(v),
        Method::Batch(kind) => nearest_multiple(v, kind.order_step()),
    })
}

/// Leading MISE at the real-valued optimal order.
///
/// Recursive: `9(32C₁⁸C₃⁸C₂)^{1/9} / (8 · 2^{8/9}(1 - 4ξ/9)^{10/9}) γ_n^{8/9}`,
/// which for `γ_n = γ₀/n` is `(9/8)(8C₁⁸C₃⁸C₂)^{1/9} γ₀² / (2^{6/9}(γ₀ - 4/9)^{10/9}) n^{-8/9}`.
/// Vitale: `(5/4)(4C₁⁴C₄)^{1/5} n^{-4/5}`, the exact minimum of
/// `m^{1/2}C₁/n + C₄/m²`. Leblanc: `(9/8)(32C₁⁸C₂C₃⁸)^{1/9} n^{-8/9}`.
/// Others: `(bλ₁(b)⁴)^{2/9}(9/8)(8C₁⁸C)^{1/9} n^{-8/9}`.
pub fn optimal_mise(tc: &TheoryConstants, method: &Method, n: usize) -> Result<f64> {
    let nf = check_n(n)?;
    let c1_8 = tc.c1.powi(8);
    match method {
        Method::Recursive(s) => {
            let shrink = positive_factor(1.0 - 4.0 * s.xi() / 9.0, "1 - 4 xi / 9")?;
            let gamma = s.gamma0() * nf.powf(-s.alpha());
            Ok(9.0 * (32.0 * c1_8 * tc.c3.powi(8) * tc.c2).powf(1.0 / 9.0)
                / (8.0 * 2f64.powf(8.0 / 9.0) * shrink.powf(10.0 / 9.0))
                * gamma.powf(8.0 / 9.0))
        }
        Method::Batch(kind) => {
            let bias = batch_bias_constant(tc, kind);
            Ok(match kind {
                BatchKind::Vitale => 1.25 * (4.0 * tc.c1.powi(4) * bias).powf(0.2) * nf.powf(-0.8),
                BatchKind::Leblanc => {
                    9.0 / 8.0 * (32.0 * c1_8 * bias * tc.c3.powi(8)).powf(1.0 / 9.0)
                        * nf.powf(-8.0 / 9.0)
                }
                _ => {
                    let b = kind.b();
                    (b as f64 * lambda1(b).powi(4)).powf(2.0 / 9.0)
                        * 9.0
                        / 8.0
                        * (8.0 * c1_8 * bias).powf(1.0 / 9.0)
                        * nf.powf(-8.0 / 9.0)
                }
            })
        }
    }
}

/// Limiting law of `γ_n^{-1/2} m_n^{-1/4} (f_n(x) - f(x))` at an interior point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CltPrediction {
    /// `c = lim γ_n^{-1/2} m_n^{-9/4}`.
    pub c: f64,
    /// `-2cΔ₂(x)/(1 - 2aξ)`.
    pub center: f64,
    /// `2C₃ f(x) ψ(x)/(4 - (2α - a)ξ)`.
    pub variance: f64,
    pub std: f64,
}

/// Requires the schedules to be in the regime where `γ_n^{-1/2} m_n^{-9/4}`
/// has a finite limit `c`: with `m_n = c' n^a` and `γ_n = γ₀ n^{-α}` that is
/// `a > 2α/9` (`c = 0`) or `a = 2α/9` with `c' > 0` (`c = γ₀^{-1/2} c'^{-9/4}`).
pub fn clt_prediction(
    tc: &TheoryConstants,
    d: &dyn TrueDensity,
    x: f64,
    stepsize: &StepsizeSchedule,
    orders: &OrderSchedule,
) -> Result<CltPrediction> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!(
            "the normal limit holds at interior points only (x = {x})"
        )));
    }
    let (a, alpha, xi) = (orders.a(), stepsize.alpha(), stepsize.xi());
    let c = match Regime::interior(a, alpha) {
        Regime::VarianceDominated => 0.0,
        Regime::Balanced if orders.c() > 0.0 => {
            stepsize.gamma0().powf(-0.5) * orders.c().powf(-2.25)
        }
        _ => {
            return Err(Error::Regime(format!(
                "gamma_n^(-1/2) m_n^(-9/4) diverges for a = {a}, alpha = {alpha}, c = {}; \
                 the estimator is bias-dominated",
                orders.c()
            )))
        }
    };
    let center = if c == 0.0 {
        0.0
    } else {
        -2.0 * c * delta2(d, x) / bias_denominator(a, xi)?
    };
    let variance =
        2.0 * tc.c3 * d.pdf(x) * psi(x) / interior_variance_denominator(a, alpha, xi)?;
    Ok(CltPrediction {
        c,
        center,
        variance,
        std: variance.sqrt(),
    })
}
