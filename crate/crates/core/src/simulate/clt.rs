//! Monte Carlo check of the pointwise normal limit of the recursive estimator.

use rayon::prelude::*;
use serde::Serialize;
use libm::erfc;

use super::harness::derive_seed;
use super::zoo::ZooId;
use crate::asymptotics::{clt_prediction, CltPrediction, TheoryConstants, TrueDensity};
use crate::error::{domain, Result};
use crate::estimators::{EvalGrid, RecursiveEstimator};
use crate::schedules::{OrderSchedule, StepsizeSchedule};

/// Fewest replicates accepted by [`clt_check`].
pub const MIN_REPLICATES: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub density: ZooId,
    pub x: f64,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub prediction: CltPrediction,
    /// `γ_n^{-1/2} m_n^{-1/4} (f_n(x) - f(x))` per replicate.
    pub standardized: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    /// `|sd / predicted sd - 1|`.
    pub sd_relative_error: f64,
    /// Anderson–Darling statistic with Stephens' small-sample factor.
    pub anderson_darling: f64,
    pub normality_p_value: f64,
}

/// Runs `replicates` independent recursions of length `n` at the single
/// point `x` and compares the standardized errors with the predicted normal
/// law.
pub fn clt_check(
    density: ZooId,
    x: f64,
    stepsize: StepsizeSchedule,
    orders: OrderSchedule,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<CltReport> {
    if replicates < MIN_REPLICATES {
        return Err(domain(format!(
            "a normality check needs at least {MIN_REPLICATES} replicates, got {replicates}"
        )));
    }
    if n == 0 {
        return Err(domain("sample size must be positive"));
    }
    let truth = density.density();
    let tc = TheoryConstants::compute(&truth)?;
    let prediction = clt_prediction(&tc, &truth, x, &stepsize, &orders)?;

    let grid = std::sync::Arc::new(EvalGrid::custom(vec![x])?);
    let scale = stepsize.gamma_at(n)?.powf(-0.5) * (orders.order_at(n)? as f64).powf(-0.25);
    let fx = truth.pdf(x);
    let standardized = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let values = truth.draw_n(n, derive_seed(&[seed, density.index() as u64, n as u64, r as u64]));
            let mut est = RecursiveEstimator::with_grid(grid.clone(), stepsize, orders);
            est.update_all(&values)?;
            Ok(scale * (est.values()[0] - fx))
        })
        .collect::<Result<Vec<_>>>()?;

    let k = standardized.len() as f64;
    let mean = standardized.iter().sum::<f64>() / k;
    let sd = (standardized.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    let (anderson_darling, normality_p_value) = anderson_darling_normal(&standardized, mean, sd);
    Ok(CltReport {
        density,
        x,
        n,
        replicates,
        seed,
        prediction,
        mean,
        sd,
        sd_relative_error: (sd / prediction.std - 1.0).abs(),
        anderson_darling,
        normality_p_value,
        standardized,
    })
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Anderson–Darling test of normality with mean and sd estimated from the
/// data. Returns the modified statistic `A²(1 + 0.75/n + 2.25/n²)` and its
/// approximate p-value (D'Agostino and Stephens, 1986).
pub fn anderson_darling_normal(data: &[f64], mean: f64, sd: f64) -> (f64, f64) {
    let mut z: Vec<f64> = data.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len();
    let nf = n as f64;
    let s: f64 = (0..n)
        .map(|i| {
            let lo = normal_cdf(z[i]).max(f64::MIN_POSITIVE).ln();
            let hi = (1.0 - normal_cdf(z[n - 1 - i])).max(f64::MIN_POSITIVE).ln();
            (2.0 * i as f64 + 1.0) * (lo + hi)
        })
        .sum();
    let a2 = -nf - s / nf;
    let a = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p = if a >= 0.6 {
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else if a >= 0.34 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a >= 0.2 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    };
    (a, p.clamp(0.0, 1.0))
}
