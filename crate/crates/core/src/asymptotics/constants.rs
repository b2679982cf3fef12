//! Integrated functionals `C₁..C₆` of a true density and the universal
//! variance factors `C₃`, `λ₁(b)`, `λ₂(b)`.

use serde::Serialize;

use super::density::{delta1, delta2, TrueDensity};
use crate::error::{domain, Result};
use crate::quadrature::{integrate_adaptive, integrate_arcsine_weighted};

const REL_TOL: f64 = 1e-12;

/// `C₃ = 1/√2 + 4(1 - √(2/3))`, the interior variance inflation of the
/// order-`(m, m/2)` correction.
pub fn c3() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2 + 4.0 * (1.0 - (2.0f64 / 3.0).sqrt())
}

/// `λ₁(b) = {b² + b^{-1/2} - 2b (2/(b+1))^{1/2}} / (1 - b)²`, `b >= 2`.
pub fn lambda1(b: u32) -> f64 {
    let bf = b as f64;
    (bf * bf + bf.powf(-0.5) - 2.0 * bf * (2.0 / (bf + 1.0)).sqrt()) / ((1.0 - bf) * (1.0 - bf))
}

/// `λ₂(b) = {b² + b^{-1} - 2} / (1 - b)²`, `b >= 2`.
pub fn lambda2(b: u32) -> f64 {
    let bf = b as f64;
    (bf * bf + 1.0 / bf - 2.0) / ((1.0 - bf) * (1.0 - bf))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaEntry {
    pub b: u32,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// `λ₁`, `λ₂` for `b = 2..=10`.
pub fn lambda_table() -> Vec<LambdaEntry> {
    (2..=10)
        .map(|b| LambdaEntry {
            b,
            lambda1: lambda1(b),
            lambda2: lambda2(b),
        })
        .collect()
}

/// Theory constants of one density.
///
/// `c1 = ∫ f ψ`, `c2 = ∫ Δ₂²`, `c3` universal, `c4 = ∫ Δ₁²`,
/// `c5 = ∫ (Δ₂ - Δ₁²/(2f))²`, `c6 = ∫ (Δ₂ - Δ₁²/(2f) + f I)²` where
/// `i_functional = I = ∫ Δ₁²/(2f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub i_functional: f64,
}

impl TheoryConstants {
    /// Assembles constants computed elsewhere; `c3` is filled in.
    pub fn from_parts(c1: f64, c2: f64, c4: f64, c5: f64, c6: f64, i_functional: f64) -> Self {
        Self {
            c1,
            c2,
            c3: c3(),
            c4,
            c5,
            c6,
            i_functional,
        }
    }

    /// Integrates every functional by adaptive Gauss–Legendre. `C₁` goes
    /// through the arcsine substitution because `ψ` is singular at both ends.
    pub fn compute(d: &dyn TrueDensity) -> Result<Self> {
        let c1 = integrate_arcsine_weighted(|x| d.pdf(x), REL_TOL)?
            / (2.0 * std::f64::consts::PI.sqrt());
        if !(c1 > 0.0) {
            return Err(domain(format!("C1 = {c1} is not positive; is the density zero?")));
        }
        let c2 = integrate_adaptive(|x| delta2(d, x).powi(2), 0.0, 1.0, REL_TOL)?;
        let c4 = integrate_adaptive(|x| delta1(d, x).powi(2), 0.0, 1.0, REL_TOL)?;
        let ratio = |x: f64| {
            let f = d.pdf(x);
            let d1 = delta1(d, x);
            if d1 == 0.0 {
                0.0
            } else {
                d1 * d1 / (2.0 * f)
            }
        };
        let i_functional = integrate_adaptive(ratio, 0.0, 1.0, REL_TOL)?;
        let c5 = integrate_adaptive(|x| (delta2(d, x) - ratio(x)).powi(2), 0.0, 1.0, REL_TOL)?;
        let c6 = integrate_adaptive(
            |x| (delta2(d, x) - ratio(x) + d.pdf(x) * i_functional).powi(2),
            0.0,
            1.0,
            REL_TOL,
        )?;
        Ok(Self {
            c1,
            c2,
            c3: c3(),
            c4,
            c5,
            c6,
            i_functional,
        })
    }
}
