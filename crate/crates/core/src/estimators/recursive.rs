use std::sync::Arc;

use super::grid::EvalGrid;
use super::DensityEstimate;
use crate::basis::bin_index;
use crate::error::{domain, Result};
use crate::sample::Sample;
use crate::schedules::{OrderSchedule, PiProduct, StepsizeSchedule};

/// Robbins–Monro Bernstein estimator
/// `f_n = (1 - γ_n) f_{n-1} + γ_n Z_n`, `f_0 = 0`, where
/// `Z_n = 2 T_{m_n} - T_{m_n/2}` is built from the `n`-th observation alone.
///
/// The estimate is stored on a fixed grid, so an update costs `O(grid)` and
/// never revisits past observations. Values between abscissas are linearly
/// interpolated. Negative values are kept as they are; see
/// [`super::truncate_and_renormalize`].
#[derive(Debug, Clone)]
pub struct RecursiveEstimator {
    grid: Arc<EvalGrid>,
    values: Vec<f64>,
    stepsize: StepsizeSchedule,
    orders: OrderSchedule,
    pi: PiProduct,
    scratch: Vec<f64>,
}

impl RecursiveEstimator {
    /// Estimator on the standard 512-node grid.
    pub fn new(stepsize: StepsizeSchedule, orders: OrderSchedule) -> Self {
        Self::with_grid(EvalGrid::standard(), stepsize, orders)
    }

    pub fn with_grid(grid: Arc<EvalGrid>, stepsize: StepsizeSchedule, orders: OrderSchedule) -> Self {
        let len = grid.len();
        Self {
            grid,
            values: vec![0.0; len],
            stepsize,
            orders,
            pi: PiProduct::new(),
            scratch: vec![0.0; len],
        }
    }

    /// Runs the recursion over the sample in its stored order.
    pub fn fit(sample: &Sample, stepsize: StepsizeSchedule, orders: OrderSchedule) -> Result<Self> {
        let mut est = Self::new(stepsize, orders);
        est.update_all(sample.values())?;
        Ok(est)
    }

    pub fn update(&mut self, obs: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&obs) {
            return Err(domain(format!(
                "observation {obs} is outside [0, 1]; apply a support transform first"
            )));
        }
        let n = self.pi.count() + 1;
        let gamma = self.stepsize.gamma_unchecked(n);
        let m = self.orders.order_unchecked(n);
        let keep = 1.0 - gamma;

        self.grid
            .basis_column_into(m - 1, bin_index(obs, m), &mut self.scratch);
        let hi = gamma * 2.0 * m as f64;
        for (v, &b) in self.values.iter_mut().zip(&self.scratch) {
            *v = keep * *v + hi * b;
        }
        let half = m / 2;
        self.grid
            .basis_column_into(half - 1, bin_index(obs, half), &mut self.scratch);
        let lo = gamma * half as f64;
        for (v, &b) in self.values.iter_mut().zip(&self.scratch) {
            *v -= lo * b;
        }
        self.pi.advance(gamma);
        Ok(())
    }

    pub fn update_all(&mut self, observations: &[f64]) -> Result<()> {
        observations.iter().try_for_each(|&x| self.update(x))
    }

    pub fn reset(&mut self) {
        self.values.fill(0.0);
        self.pi = PiProduct::new();
    }

    /// Observations consumed so far.
    pub fn n(&self) -> usize {
        self.pi.count()
    }

    pub fn pi(&self) -> f64 {
        self.pi.value()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &Arc<EvalGrid> {
        &self.grid
    }

    pub fn stepsize(&self) -> StepsizeSchedule {
        self.stepsize
    }

    pub fn orders(&self) -> OrderSchedule {
        self.orders
    }

    /// `∫ f_n` under the grid's quadrature; equals `1 - Π_n` exactly (up to
    /// rounding) on a Gauss–Legendre grid with at least `m_n` nodes.
    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn eval_checked(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain(format!("x = {x} is outside [0, 1]")));
        }
        Ok(self.eval(x))
    }
}

impl DensityEstimate for RecursiveEstimator {
    fn eval(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    fn eval_grid(&self, grid: &EvalGrid) -> Vec<f64> {
        if std::ptr::eq(grid, self.grid.as_ref()) {
            return self.values.clone();
        }
        grid.abscissas().iter().map(|&x| self.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::z_kernel;

    #[test]
    fn first_update_is_the_kernel() {
        let o = OrderSchedule::new(3.0, 0.4).unwrap();
        let mut est = RecursiveEstimator::new(StepsizeSchedule::r1(), o);
        assert_eq!(est.n(), 0);
        assert!(est.values().iter().all(|&v| v == 0.0));
        assert_eq!(est.eval(0.3), 0.0);
        est.update(0.42).unwrap();
        let m = o.order_at(1).unwrap();
        for &x in est.grid().abscissas().iter().step_by(37) {
            let want = z_kernel(x, 0.42, m).unwrap();
            assert!((est.eval(x) - want).abs() < 1e-12 * want.abs().max(1.0));
        }
        assert_eq!(est.pi(), 0.0);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut est = RecursiveEstimator::new(StepsizeSchedule::r1(), OrderSchedule::new(2.0, 0.3).unwrap());
        assert!(est.update(1.2).is_err());
        assert_eq!(est.n(), 0);
        assert!(est.eval_checked(-0.1).is_err());
    }

    #[test]
    fn reset_clears_state() {
        let mut est = RecursiveEstimator::new(StepsizeSchedule::r2(), OrderSchedule::new(2.0, 0.3).unwrap());
        est.update_all(&[0.1, 0.5, 0.9]).unwrap();
        assert_eq!(est.n(), 3);
        est.reset();
        assert_eq!(est.n(), 0);
        assert_eq!(est.pi(), 1.0);
        assert!(est.values().iter().all(|&v| v == 0.0));
    }
}
