//! The recursive Bernstein estimator, the five batch Bernstein estimators it
//! is compared against, and a fixed-bandwidth Gaussian kernel estimator.

mod batch;
mod gaussian;
mod grid;
mod kernels;
mod recursive;

pub use batch::{vitale_weights, BatchEstimator, BatchKind};
pub use gaussian::GaussianKde;
pub use grid::EvalGrid;
pub use kernels::{t_kernel, z_kernel};
pub use recursive::RecursiveEstimator;

/// Anything that can be evaluated on `[0, 1]`.
pub trait DensityEstimate: Send + Sync {
    fn eval(&self, x: f64) -> f64;

    /// Values at each abscissa of `grid`. Implementations override this when
    /// they can do better than pointwise evaluation.
    fn eval_grid(&self, grid: &EvalGrid) -> Vec<f64> {
        grid.abscissas().iter().map(|&x| self.eval(x)).collect()
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> DensityEstimate for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Clips negative values to zero and rescales so the result integrates to one
/// under `grid`'s quadrature weights. Returns all zeros if nothing positive
/// remains.
pub fn truncate_and_renormalize(values: &[f64], grid: &EvalGrid) -> Vec<f64> {
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let mass = grid.integrate(&clipped);
    if mass > 0.0 {
        clipped.iter().map(|v| v / mass).collect()
    } else {
        clipped
    }
}
