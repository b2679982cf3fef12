use std::f64::consts::PI;

use super::DensityEstimate;
use crate::error::{domain, Result};

/// Fixed-bandwidth Gaussian kernel estimator, `(nh)⁻¹ Σ φ((x - X_i)/h)`.
/// Evaluated on whatever scale the data live on; no boundary correction.
#[derive(Debug, Clone)]
pub struct GaussianKde {
    data: Vec<f64>,
    h: f64,
}

impl GaussianKde {
    pub fn new(data: Vec<f64>, h: f64) -> Result<Self> {
        if data.is_empty() {
            return Err(crate::Error::EmptySample);
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(domain(format!("bandwidth h = {h} must be positive")));
        }
        Ok(Self { data, h })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }
}

impl DensityEstimate for GaussianKde {
    fn eval(&self, x: f64) -> f64 {
        let norm = 1.0 / (self.data.len() as f64 * self.h * (2.0 * PI).sqrt());
        norm * self
            .data
            .iter()
            .map(|&xi| {
                let u = (x - xi) / self.h;
                (-0.5 * u * u).exp()
            })
            .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_adaptive;

    #[test]
    fn single_point_is_normal_pdf() {
        let k = GaussianKde::new(vec![0.0], 1.0).unwrap();
        assert!((k.eval(0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
    }

    #[test]
    fn integrates_to_one() {
        let k = GaussianKde::new(vec![1.0, 2.5, 3.0], 0.3677).unwrap();
        let s = integrate_adaptive(|x| k.eval(x), -10.0, 15.0, 1e-12).unwrap();
        assert!((s - 1.0).abs() < 1e-10);
        assert!(GaussianKde::new(vec![1.0], 0.0).is_err());
    }
}
