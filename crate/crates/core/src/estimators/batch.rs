use std::fmt;

use serde::{Deserialize, Serialize};

use super::grid::EvalGrid;
use super::DensityEstimate;
use crate::basis::{basis_row_into, bin_index};
use crate::error::{domain, Result};
use crate::sample::Sample;

/// The batch (non-recursive) Bernstein estimators.
///
/// With `f̃_m` Vitale's estimator of order `m`:
/// - `Leblanc`: `2 f̃_m - f̃_{m/2}`;
/// - `Generalized`: `b/(b-1) f̃_m - 1/(b-1) f̃_{m/b}`;
/// - `Multiplicative`: `f̃_m^{b/(b-1)} (f̃_{m/b} + ε)^{-1/(b-1)}`, nonnegative but
///   not normalized;
/// - `Normalized`: the multiplicative estimate divided by its integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BatchKind {
    Vitale,
    Leblanc,
    Generalized { b: u32 },
    Multiplicative { b: u32, eps: f64 },
    Normalized { b: u32, eps: f64 },
}

impl BatchKind {
    pub const DEFAULT_B: u32 = 2;
    pub const DEFAULT_EPS: f64 = 1e-5;

    /// Ratio between the two orders combined (1 for Vitale, 2 for Leblanc).
    pub fn b(&self) -> u32 {
        match self {
            BatchKind::Vitale => 1,
            BatchKind::Leblanc => 2,
            BatchKind::Generalized { b }
            | BatchKind::Multiplicative { b, .. }
            | BatchKind::Normalized { b, .. } => *b,
        }
    }

    pub fn eps(&self) -> Option<f64> {
        match self {
            BatchKind::Multiplicative { eps, .. } | BatchKind::Normalized { eps, .. } => Some(*eps),
            _ => None,
        }
    }

    /// Granularity used when rounding a real-valued order: even for Vitale
    /// and Leblanc, `lcm(2, b)` for the other corrections.
    pub fn order_step(&self) -> usize {
        let b = self.b() as usize;
        match self {
            BatchKind::Vitale | BatchKind::Leblanc => 2,
            _ => {
                if b % 2 == 0 {
                    b
                } else {
                    2 * b
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = self.b();
        if !matches!(self, BatchKind::Vitale) && b < 2 {
            return Err(domain(format!("correction ratio b = {b} must be at least 2")));
        }
        if let Some(eps) = self.eps() {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(domain(format!("epsilon = {eps} must be positive")));
            }
        }
        Ok(())
    }

    /// `m` must be positive, and divisible by `b` for the corrected kinds.
    pub fn check_order(&self, m: usize) -> Result<()> {
        self.validate()?;
        let b = self.b() as usize;
        if m == 0 || m % b != 0 {
            return Err(domain(format!(
                "order m = {m} must be a positive multiple of b = {b} for the {self} estimator"
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            BatchKind::Vitale => "vitale",
            BatchKind::Leblanc => "leblanc",
            BatchKind::Generalized { .. } => "generalized",
            BatchKind::Multiplicative { .. } => "multiplicative",
            BatchKind::Normalized { .. } => "normalized",
        }
    }

    fn combine(&self, hi: f64, lo: f64) -> f64 {
        let b = self.b() as f64;
        match self {
            BatchKind::Vitale => hi,
            BatchKind::Leblanc | BatchKind::Generalized { .. } => {
                (b * hi - lo) / (b - 1.0)
            }
            BatchKind::Multiplicative { eps, .. } | BatchKind::Normalized { eps, .. } => {
                if hi <= 0.0 {
                    0.0
                } else {
                    hi.powf(b / (b - 1.0)) * (lo + eps).powf(-1.0 / (b - 1.0))
                }
            }
        }
    }
}

impl fmt::Display for BatchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatchKind::Vitale | BatchKind::Leblanc => write!(f, "{}", self.name()),
            BatchKind::Generalized { b } => write!(f, "generalized(b={b})"),
            BatchKind::Multiplicative { b, eps } | BatchKind::Normalized { b, eps } => {
                write!(f, "{}(b={b}, eps={eps})", self.name())
            }
        }
    }
}

/// Empirical-CDF increments `F_n((k+1)/m) - F_n(k/m)`, `k = 0..m`, with an
/// observation at exactly 0 counted in the first bin.
pub fn vitale_weights(values: &[f64], m: usize) -> Vec<f64> {
    let mut w = vec![0.0; m];
    let inv = 1.0 / values.len() as f64;
    for &x in values {
        w[bin_index(x, m)] += inv;
    }
    w
}

/// One of the [`BatchKind`] estimators fitted to a sample. Immutable.
#[derive(Debug, Clone)]
pub struct BatchEstimator {
    kind: BatchKind,
    m: usize,
    n: usize,
    hi: Vec<f64>,
    lo: Option<Vec<f64>>,
    scale: f64,
}

impl BatchEstimator {
    pub fn new(kind: BatchKind, m: usize, sample: &Sample) -> Result<Self> {
        Self::from_values(kind, m, sample.values())
    }

    /// Fits from raw unit-interval values without building a [`Sample`].
    pub fn from_values(kind: BatchKind, m: usize, values: &[f64]) -> Result<Self> {
        kind.check_order(m)?;
        if values.is_empty() {
            return Err(crate::Error::EmptySample);
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(domain(format!(
                "observation {v} is outside [0, 1]; apply a support transform first"
            )));
        }
        let hi = vitale_weights(values, m);
        let lo = match kind {
            BatchKind::Vitale => None,
            _ => Some(vitale_weights(values, m / kind.b() as usize)),
        };
        let mut est = Self {
            kind,
            m,
            n: values.len(),
            hi,
            lo,
            scale: 1.0,
        };
        if let BatchKind::Normalized { .. } = kind {
            let grid = EvalGrid::standard();
            let total = grid.integrate(&est.eval_grid(&grid));
            if !(total > 0.0 && total.is_finite()) {
                return Err(domain(format!(
                    "cannot normalize: the multiplicative estimate integrates to {total}"
                )));
            }
            est.scale = 1.0 / total;
        }
        Ok(est)
    }

    pub fn kind(&self) -> BatchKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `∫ f̂` on the standard grid.
    pub fn mass(&self) -> f64 {
        let grid = EvalGrid::standard();
        grid.integrate(&self.eval_grid(&grid))
    }

    fn vitale_at(weights: &[f64], x: f64, row: &mut Vec<f64>) -> f64 {
        let m = weights.len();
        row.resize(m, 0.0);
        basis_row_into(m - 1, x, row);
        m as f64 * weights.iter().zip(row.iter()).map(|(w, b)| w * b).sum::<f64>()
    }
}

impl DensityEstimate for BatchEstimator {
    fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let mut row = Vec::new();
        let hi = Self::vitale_at(&self.hi, x, &mut row);
        let lo = self
            .lo
            .as_ref()
            .map_or(0.0, |w| Self::vitale_at(w, x, &mut row));
        self.kind.combine(hi, lo) * self.scale
    }

    fn eval_grid(&self, grid: &EvalGrid) -> Vec<f64> {
        let mut hi = grid.vitale_values(&self.hi);
        if let Some(w) = &self.lo {
            let lo = grid.vitale_values(w);
            for (h, l) in hi.iter_mut().zip(lo) {
                *h = self.kind.combine(*h, l);
            }
        }
        if self.scale != 1.0 {
            hi.iter_mut().for_each(|v| *v *= self.scale);
        }
        hi
    }
}
