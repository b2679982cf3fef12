//! Least-squares cross-validation of the smoothing order,
//! `LSCV(m) = ∫ f̂² - (2/n) Σ_i f̂_{-i}(X_i)`.
//!
//! Vitale's estimator and the additive corrections have exact leave-one-out
//! forms because removing `X_i` only removes its own kernel. The recursive
//! estimator has one when `γ_n = 1/n` (the estimate is then a plain average of
//! kernels); other stepsizes are handled by refitting. `∫ f̂²` is computed on a
//! Gauss–Legendre grid with enough nodes to be exact for the polynomial kinds.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{basis_from_logs, bin_index, ln_choose};
use crate::error::{domain, Result};
use crate::estimators::{BatchKind, DensityEstimate, EvalGrid};
use crate::quadrature::DEFAULT_NODES;
use crate::sample::Sample;
use crate::schedules::{OrderSchedule, StepsizeSchedule};

/// Scores over a candidate list and the minimizing candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LscvResult<T> {
    pub candidates: Vec<T>,
    pub scores: Vec<f64>,
    /// The `∫ f̂²` part of each score.
    pub integral_sq: Vec<f64>,
    pub argmin: T,
}

impl<T: Copy + PartialOrd> LscvResult<T> {
    fn from_parts(candidates: Vec<T>, parts: Vec<(f64, f64)>) -> Result<Self> {
        let (integral_sq, scores): (Vec<f64>, Vec<f64>) = parts.into_iter().unzip();
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(domain(format!("LSCV score of candidate {i} is not finite")));
        }
        let mut best = 0;
        for i in 1..scores.len() {
            let better = scores[i] < scores[best]
                || (scores[i] == scores[best] && candidates[i] < candidates[best]);
            if better {
                best = i;
            }
        }
        Ok(Self {
            argmin: candidates[best],
            candidates,
            scores,
            integral_sq,
        })
    }
}

/// Multiples of `step` from `step` up to `2n`.
pub fn default_order_candidates(n: usize, step: usize) -> Vec<usize> {
    (1..).map(|j| j * step).take_while(|&m| m <= 2 * n.max(1)).collect()
}

/// Exponents `0.10, 0.11, ..., 0.99` for `m_n = n^a`.
pub fn default_exponent_grid() -> Vec<f64> {
    (10..=99).map(|i| i as f64 / 100.0).collect()
}

fn check_inputs<T>(sample: &Sample, candidates: &[T]) -> Result<()> {
    if sample.len() < 2 {
        return Err(domain(format!(
            "cross-validation needs at least 2 observations, got {}",
            sample.len()
        )));
    }
    if candidates.is_empty() {
        return Err(domain("no candidate orders to score"));
    }
    Ok(())
}

/// Gauss–Legendre grid exact for squares of polynomials of degree below `m`.
fn grid_for_degree(max_degree: usize) -> std::sync::Arc<EvalGrid> {
    let need = max_degree + 1;
    if need <= DEFAULT_NODES {
        EvalGrid::standard()
    } else {
        EvalGrid::shared(need.div_ceil(64) * 64)
    }
}

/// `Σ coef · b_k(degree, ·)`, evaluated term by term.
#[derive(Default)]
struct BasisSum {
    terms: Vec<(usize, usize, f64, f64)>,
}

impl BasisSum {
    fn push(&mut self, degree: usize, k: usize, coef: f64) {
        self.terms.push((degree, k, coef, ln_choose(degree, k)));
    }

    fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return self
                .terms
                .iter()
                .filter(|&&(d, k, _, _)| if x <= 0.0 { k == 0 } else { k == d })
                .map(|t| t.2)
                .sum();
        }
        let (lx, l1x) = (x.ln(), (-x).ln_1p());
        self.terms
            .iter()
            .map(|&(d, k, c, lc)| c * basis_from_logs(lc, d, k, lx, l1x))
            .sum()
    }

    fn integral_sq(&self) -> f64 {
        let grid = grid_for_degree(self.max_degree());
        let mut values = vec![0.0; grid.len()];
        let mut col = vec![0.0; grid.len()];
        for &(d, k, c, _) in &self.terms {
            grid.basis_column_into(d, k, &mut col);
            for (v, b) in values.iter_mut().zip(&col) {
                *v += c * b;
            }
        }
        values.iter().zip(grid.weights()).map(|(v, w)| w * v * v).sum()
    }
}

/// `b_k(degree, x)` for a single term.
fn basis_at(degree: usize, k: usize, x: f64) -> f64 {
    let mut s = BasisSum::default();
    s.push(degree, k, 1.0);
    s.eval(x)
}

fn bin_weights(values: &[f64], m: usize) -> Vec<(usize, f64)> {
    let mut counts = vec![0usize; m];
    for &x in values {
        counts[bin_index(x, m)] += 1;
    }
    let inv = 1.0 / values.len() as f64;
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (k, c as f64 * inv))
        .collect()
}

/// `(∫ f̂², score)` for the additive family `f̂ = b/(b-1) f̃_m - 1/(b-1) f̃_{m/b}`
/// (`b = 1` meaning plain Vitale).
fn additive_score(xs: &[f64], m: usize, b: usize) -> (f64, f64) {
    let n = xs.len() as f64;
    let mut f = BasisSum::default();
    let (w_hi, w_lo) = if b == 1 {
        (1.0, 0.0)
    } else {
        (b as f64 / (b as f64 - 1.0), 1.0 / (b as f64 - 1.0))
    };
    for (k, w) in bin_weights(xs, m) {
        f.push(m - 1, k, w_hi * m as f64 * w);
    }
    let low = m / b;
    if b > 1 {
        for (k, w) in bin_weights(xs, low) {
            f.push(low - 1, k, -w_lo * low as f64 * w);
        }
    }
    let isq = f.integral_sq();
    // Own-kernel contribution g_i(X_i), so that n f̂ - g_i is the fit without X_i.
    let mut sum_f = 0.0;
    let mut sum_own = 0.0;
    for &x in xs {
        sum_f += f.eval(x);
        let mut own = w_hi * m as f64 * basis_at(m - 1, bin_index(x, m), x);
        if b > 1 {
            own -= w_lo * low as f64 * basis_at(low - 1, bin_index(x, low), x);
        }
        sum_own += own;
    }
    let loo = (n * sum_f - sum_own) / (n - 1.0);
    (isq, isq - 2.0 / n * loo)
}

/// Vitale's estimator: `∫ f̃² - (2/(n-1)) [Σ f̃(X_i) - (m/n) Σ b_{k_i}(m-1, X_i)]`.
pub fn lscv_vitale(sample: &Sample, candidates: &[usize]) -> Result<LscvResult<usize>> {
    check_inputs(sample, candidates)?;
    for &m in candidates {
        BatchKind::Vitale.check_order(m)?;
    }
    let xs = sample.values();
    let parts = candidates
        .par_iter()
        .map(|&m| additive_score(xs, m, 1))
        .collect();
    LscvResult::from_parts(candidates.to_vec(), parts)
}

/// The additive correction `b/(b-1) f̃_m - 1/(b-1) f̃_{m/b}` (Leblanc's for
/// `b = 2`), with `k_i`, `r_i` the bins of `X_i` at orders `m` and `m/b`.
pub fn lscv_generalized(sample: &Sample, b: u32, candidates: &[usize]) -> Result<LscvResult<usize>> {
    check_inputs(sample, candidates)?;
    let kind = BatchKind::Generalized { b };
    for &m in candidates {
        kind.check_order(m)?;
    }
    let xs = sample.values();
    let parts = candidates
        .par_iter()
        .map(|&m| additive_score(xs, m, b as usize))
        .collect();
    LscvResult::from_parts(candidates.to_vec(), parts)
}

/// `Z_j(x)` with observation `j`'s own order.
fn z_terms(x_j: f64, m: usize, coef: f64, into: &mut BasisSum) {
    let half = m / 2;
    into.push(m - 1, bin_index(x_j, m), coef * 2.0 * m as f64);
    into.push(half - 1, bin_index(x_j, half), -coef * half as f64);
}

fn z_at(x_j: f64, m: usize, x: f64) -> f64 {
    let half = m / 2;
    2.0 * m as f64 * basis_at(m - 1, bin_index(x_j, m), x)
        - half as f64 * basis_at(half - 1, bin_index(x_j, half), x)
}

fn recursive_score(xs: &[f64], stepsize: &StepsizeSchedule, orders: &OrderSchedule) -> (f64, f64) {
    let n = xs.len();
    let nf = n as f64;
    let m: Vec<usize> = (1..=n).map(|j| orders.order_unchecked(j)).collect();
    let w = stepsize.recursion_weights(n);
    let mut f = BasisSum::default();
    for j in 0..n {
        z_terms(xs[j], m[j], w[j], &mut f);
    }
    let isq = f.integral_sq();
    let harmonic = stepsize.gamma0() == 1.0 && stepsize.alpha() == 1.0;
    let loo_sum: f64 = if harmonic {
        // f_n is the average of the Z_j, so dropping X_i leaves (n f_n - Z_i)/(n - 1).
        (0..n)
            .map(|i| (nf * f.eval(xs[i]) - z_at(xs[i], m[i], xs[i])) / (nf - 1.0))
            .sum()
    } else {
        // Rerun the recursion over the other n - 1 points in arrival order:
        // stepsizes are re-indexed, each point keeps its own order.
        let w_short = stepsize.recursion_weights(n - 1);
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let pos = if j < i { j } else { j - 1 };
                        w_short[pos] * z_at(xs[j], m[j], xs[i])
                    })
                    .sum::<f64>()
            })
            .sum()
    };
    (isq, isq - 2.0 / nf * loo_sum)
}

/// Recursive estimator with order schedules `m_n = c n^a` over the exponent
/// candidates. Leave-one-out deletes `X_i` and its kernel `Z_i` (built at
/// `X_i`'s own order `m_i`); the remaining kernels keep their orders.
pub fn lscv_recursive(
    sample: &Sample,
    stepsize: &StepsizeSchedule,
    c: f64,
    exponents: &[f64],
) -> Result<LscvResult<f64>> {
    check_inputs(sample, exponents)?;
    let schedules = exponents
        .iter()
        .map(|&a| OrderSchedule::new(c, a))
        .collect::<Result<Vec<_>>>()?;
    let xs = sample.values();
    let parts = schedules
        .par_iter()
        .map(|o| recursive_score(xs, stepsize, o))
        .collect();
    LscvResult::from_parts(exponents.to_vec(), parts)
}

/// Brute-force leave-one-out for any estimator: `n + 1` fits per candidate.
/// `∫ f̂²` uses a Gauss–Legendre grid with at least `m + 1` nodes.
pub fn lscv_generic<E, F>(sample: &Sample, candidates: &[usize], factory: F) -> Result<LscvResult<usize>>
where
    E: DensityEstimate,
    F: Fn(usize, &Sample) -> Result<E> + Sync,
{
    check_inputs(sample, candidates)?;
    let n = sample.len() as f64;
    let parts = candidates
        .par_iter()
        .map(|&m| -> Result<(f64, f64)> {
            let full = factory(m, sample)?;
            let grid = grid_for_degree(m);
            let values = full.eval_grid(&grid);
            let isq: f64 = values.iter().zip(grid.weights()).map(|(v, w)| w * v * v).sum();
            let mut loo = 0.0;
            for (i, &x) in sample.values().iter().enumerate() {
                loo += factory(m, &sample.without(i))?.eval(x);
            }
            Ok((isq, isq - 2.0 / n * loo))
        })
        .collect::<Result<Vec<_>>>()?;
    LscvResult::from_parts(candidates.to_vec(), parts)
}

/// Dispatches a batch kind to its closed form when one exists.
pub fn lscv_batch(sample: &Sample, kind: BatchKind, candidates: &[usize]) -> Result<LscvResult<usize>> {
    match kind {
        BatchKind::Vitale => lscv_vitale(sample, candidates),
        BatchKind::Leblanc => lscv_generalized(sample, 2, candidates),
        BatchKind::Generalized { b } => lscv_generalized(sample, b, candidates),
        BatchKind::Multiplicative { .. } | BatchKind::Normalized { .. } => {
            for &m in candidates {
                kind.check_order(m)?;
            }
            lscv_generic(sample, candidates, |m, s| {
                crate::estimators::BatchEstimator::new(kind, m, s)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_grids() {
        assert_eq!(default_order_candidates(3, 2), vec![2, 4, 6]);
        assert_eq!(default_order_candidates(5, 6), vec![6]);
        let g = default_exponent_grid();
        assert_eq!(g.len(), 90);
        assert_eq!(g[0], 0.10);
        assert_eq!(g[89], 0.99);
    }

    #[test]
    fn two_identical_points() {
        let s = Sample::unit(vec![0.4, 0.4]).unwrap();
        let r = lscv_vitale(&s, &[2]).unwrap();
        assert_eq!(r.argmin, 2);
        assert!(r.scores[0].is_finite());
    }

    #[test]
    fn ties_go_to_the_smaller_candidate() {
        let r = LscvResult::from_parts(vec![6usize, 2, 4], vec![(0.0, 1.0), (0.0, 1.0), (0.0, 2.0)])
            .unwrap();
        assert_eq!(r.argmin, 2);
    }

    #[test]
    fn input_errors() {
        let one = Sample::unit(vec![0.4]).unwrap();
        assert!(lscv_vitale(&one, &[2]).is_err());
        let s = Sample::unit(vec![0.4, 0.6]).unwrap();
        assert!(lscv_generalized(&s, 3, &[4]).is_err());
        assert!(lscv_vitale(&s, &[]).is_err());
    }
}
