//! Averaged-ISE experiments over the density zoo.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::zoo::{ZooDensity, ZooId};
use crate::asymptotics::{optimal_order, Method, TheoryConstants, TrueDensity};
use crate::error::{domain, Result};
use crate::estimators::{BatchEstimator, BatchKind, DensityEstimate, EvalGrid, RecursiveEstimator};
use crate::schedules::{optimal_order_schedule, OrderSchedule, StepsizeSchedule};

/// `∫ (f̂ - f)²` by the standard 512-node Gauss–Legendre grid.
pub fn ise(estimate: &dyn DensityEstimate, truth: &dyn TrueDensity) -> f64 {
    let grid = EvalGrid::standard();
    ise_values(&estimate.eval_grid(&grid), truth, &grid)
}

/// ISE of values already tabulated on `grid`.
pub fn ise_values(values: &[f64], truth: &dyn TrueDensity, grid: &EvalGrid) -> f64 {
    values
        .iter()
        .zip(grid.abscissas())
        .zip(grid.weights())
        .map(|((v, &x), w)| {
            let e = v - truth.pdf(x);
            w * e * e
        })
        .sum()
}

/// SplitMix64 finalizer folded over the parts, giving independent-looking
/// streams for each `(seed, density, n, trial)`.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p;
        h = h.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}

/// Seed of one trial. Every estimator sees the same samples for a given
/// `(seed, density, n, trial)`.
pub fn trial_seed(seed: u64, density: ZooId, n: usize, trial: usize) -> u64 {
    derive_seed(&[seed, density.index() as u64, n as u64, trial as u64])
}

/// An estimator configuration for the experiments. Orders are always the
/// MISE-optimal ones computed from the true density's theory constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EstimatorSpec {
    Recursive {
        gamma0: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    Vitale {},
    Leblanc {},
    Generalized {
        #[serde(default = "default_b")]
        b: u32,
    },
    Multiplicative {
        #[serde(default = "default_b")]
        b: u32,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    Normalized {
        #[serde(default = "default_b")]
        b: u32,
        #[serde(default = "default_eps")]
        eps: f64,
    },
}

fn default_alpha() -> f64 {
    1.0
}

fn default_b() -> u32 {
    BatchKind::DEFAULT_B
}

fn default_eps() -> f64 {
    BatchKind::DEFAULT_EPS
}

impl EstimatorSpec {
    pub fn recursive(stepsize: StepsizeSchedule) -> Self {
        EstimatorSpec::Recursive {
            gamma0: stepsize.gamma0(),
            alpha: stepsize.alpha(),
        }
    }

    pub fn batch(kind: BatchKind) -> Self {
        match kind {
            BatchKind::Vitale => EstimatorSpec::Vitale {},
            BatchKind::Leblanc => EstimatorSpec::Leblanc {},
            BatchKind::Generalized { b } => EstimatorSpec::Generalized { b },
            BatchKind::Multiplicative { b, eps } => EstimatorSpec::Multiplicative { b, eps },
            BatchKind::Normalized { b, eps } => EstimatorSpec::Normalized { b, eps },
        }
    }

    pub fn method(&self) -> Result<Method> {
        Ok(match *self {
            EstimatorSpec::Recursive { gamma0, alpha } => {
                Method::Recursive(StepsizeSchedule::new(gamma0, alpha)?)
            }
            EstimatorSpec::Vitale {} => Method::Batch(BatchKind::Vitale),
            EstimatorSpec::Leblanc {} => Method::Batch(BatchKind::Leblanc),
            EstimatorSpec::Generalized { b } => Method::Batch(BatchKind::Generalized { b }),
            EstimatorSpec::Multiplicative { b, eps } => {
                Method::Batch(BatchKind::Multiplicative { b, eps })
            }
            EstimatorSpec::Normalized { b, eps } => Method::Batch(BatchKind::Normalized { b, eps }),
        })
    }

    /// Column label, e.g. `recursive(gamma0=0.888889)` or `generalized(b=3)`.
    pub fn label(&self) -> String {
        match *self {
            EstimatorSpec::Recursive { gamma0, alpha } => {
                if alpha == 1.0 {
                    format!("recursive(gamma0={})", short(gamma0))
                } else {
                    format!("recursive(gamma0={}, alpha={})", short(gamma0), short(alpha))
                }
            }
            _ => match self.method() {
                Ok(Method::Batch(kind)) => kind.to_string(),
                _ => unreachable!("batch specs map to batch methods"),
            },
        }
    }
}

fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// A fully resolved estimator for one `(density, n)` cell.
#[derive(Debug, Clone, Copy)]
enum Plan {
    Recursive(StepsizeSchedule, OrderSchedule),
    Batch(BatchKind, usize),
}

impl Plan {
    fn new(spec: &EstimatorSpec, tc: &TheoryConstants, n: usize) -> Result<Self> {
        match spec.method()? {
            Method::Recursive(s) => Ok(Plan::Recursive(s, optimal_order_schedule(tc, &s)?)),
            m @ Method::Batch(kind) => Ok(Plan::Batch(kind, optimal_order(tc, &m, n)?)),
        }
    }

    /// Order in force at the last observation.
    fn final_order(&self, n: usize) -> usize {
        match self {
            Plan::Recursive(_, o) => o.order_unchecked(n),
            Plan::Batch(_, m) => *m,
        }
    }

    fn ise(&self, values: &[f64], truth: &ZooDensity, grid: &std::sync::Arc<EvalGrid>) -> Result<f64> {
        let est = match *self {
            Plan::Recursive(s, o) => {
                let mut r = RecursiveEstimator::with_grid(grid.clone(), s, o);
                r.update_all(values)?;
                r.values().to_vec()
            }
            Plan::Batch(kind, m) => BatchEstimator::from_values(kind, m, values)?.eval_grid(grid),
        };
        Ok(ise_values(&est, truth, grid))
    }
}

/// Averaged ISE of one estimator on one density at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub estimator: EstimatorSpec,
    pub label: String,
    pub density: ZooId,
    pub n: usize,
    pub trials: usize,
    /// Bernstein order used (for the recursive kind, `m_n` at the last step).
    pub order: usize,
    pub ises: Vec<f64>,
    pub mean_ise: f64,
    pub std_error: f64,
    pub seed: u64,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `trials` replications of one cell. Trials run in parallel; each draws
/// its sample from [`trial_seed`], so the result does not depend on
/// scheduling.
pub fn run_cell(
    spec: &EstimatorSpec,
    density: ZooId,
    tc: &TheoryConstants,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<TrialReport> {
    if n == 0 || trials == 0 {
        return Err(domain("sample size and trial count must be positive"));
    }
    let plan = Plan::new(spec, tc, n)?;
    let truth = density.density();
    let grid = EvalGrid::standard();
    let ises = (0..trials)
        .into_par_iter()
        .map(|t| {
            let values = truth.draw_n(n, trial_seed(seed, density, n, t));
            plan.ise(&values, &truth, &grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let (mean_ise, std_error) = mean_and_se(&ises);
    Ok(TrialReport {
        estimator: *spec,
        label: spec.label(),
        density,
        n,
        trials,
        order: plan.final_order(n),
        ises,
        mean_ise,
        std_error,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub densities: Vec<ZooId>,
    pub estimators: Vec<EstimatorSpec>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    42
}

/// Every `(density, n, estimator)` cell, densities outermost, estimators
/// innermost.
pub fn run_table(config: &TableConfig) -> Result<Vec<TrialReport>> {
    let mut out = Vec::new();
    for &d in &config.densities {
        let tc = TheoryConstants::compute(&d.density())?;
        for &n in &config.sizes {
            for spec in &config.estimators {
                out.push(run_cell(spec, d, &tc, n, config.trials, config.seed)?);
            }
        }
    }
    Ok(out)
}

/// One row per cell: `density,n,estimator,order,trials,mean_ise,std_error`.
pub fn reports_to_csv(reports: &[TrialReport]) -> String {
    let mut s = String::from("density,n,estimator,order,trials,mean_ise,std_error\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},\"{}\",{},{},{:.6e},{:.3e}",
            r.density, r.n, r.label, r.order, r.trials, r.mean_ise, r.std_error
        );
    }
    s
}

/// Table layout: one row per `(density, n)`, one column per estimator, the
/// smallest averaged ISE of each row in bold.
pub fn reports_to_markdown(reports: &[TrialReport]) -> String {
    let mut labels: Vec<String> = Vec::new();
    let mut rows: BTreeMap<(ZooId, usize), BTreeMap<String, f64>> = BTreeMap::new();
    for r in reports {
        if !labels.contains(&r.label) {
            labels.push(r.label.clone());
        }
        rows.entry((r.density, r.n))
            .or_default()
            .insert(r.label.clone(), r.mean_ise);
    }
    let mut s = String::from("| density | n |");
    for l in &labels {
        let _ = write!(s, " {l} |");
    }
    s.push_str("\n|---|---|");
    s.push_str(&"---|".repeat(labels.len()));
    s.push('\n');
    let mut last = None;
    for ((d, n), cells) in &rows {
        let name = if last == Some(*d) { String::new() } else { format!("({d})") };
        last = Some(*d);
        let best = cells.values().cloned().fold(f64::INFINITY, f64::min);
        let _ = write!(s, "| {name} | {n} |");
        for l in &labels {
            match cells.get(l) {
                Some(&v) if v == best => {
                    let _ = write!(s, " **{v:.6}** |");
                }
                Some(v) => {
                    let _ = write!(s, " {v:.6} |");
                }
                None => s.push_str(" |"),
            }
        }
        s.push('\n');
    }
    s
}

/// Least-squares slope of `ln y` against `ln n`.
pub fn log_log_slope(sizes: &[usize], values: &[f64]) -> Result<f64> {
    if sizes.len() != values.len() || sizes.len() < 2 {
        return Err(domain("slope needs at least two (n, value) pairs"));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(domain(format!(
            "averaged ISE {v} is not positive; the log-log slope is undefined"
        )));
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(domain("slope needs at least two distinct sample sizes"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Slope of log averaged ISE against log n over `sizes`, which must span at
/// least a factor of 10.
pub fn convergence_slope(
    spec: &EstimatorSpec,
    density: ZooId,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let lo = sizes.iter().copied().min().unwrap_or(0);
    let hi = sizes.iter().copied().max().unwrap_or(0);
    if lo == 0 || hi < 10 * lo {
        return Err(domain(format!(
            "sample sizes {sizes:?} must be positive and span at least one decade"
        )));
    }
    let tc = TheoryConstants::compute(&density.density())?;
    let means = sizes
        .iter()
        .map(|&n| run_cell(spec, density, &tc, n, trials, seed).map(|r| r.mean_ise))
        .collect::<Result<Vec<_>>>()?;
    log_log_slope(sizes, &means)
}
