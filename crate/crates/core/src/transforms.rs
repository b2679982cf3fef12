//! Changes of variable that move data onto `[0, 1]` and pull densities back.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SupportTransform {
    /// Data already on `[0, 1]`.
    Identity,
    /// Finite support `[lo, hi]`, mapped affinely.
    Bounded { lo: f64, hi: f64 },
    /// Whole real line, `y = 1/2 + arctan(x)/π`.
    RealLine,
    /// `[0, ∞)`, `y = x / (1 + x)`.
    HalfLine,
}

impl SupportTransform {
    pub fn bounded(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(domain(format!("bounded support needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self::Bounded { lo, hi })
    }

    fn check_support(&self, x: f64) -> Result<()> {
        let ok = match *self {
            Self::Identity => (0.0..=1.0).contains(&x),
            Self::Bounded { lo, hi } => (lo..=hi).contains(&x),
            Self::RealLine => x.is_finite(),
            Self::HalfLine => x.is_finite() && x >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("value {x} is outside the declared support {self}")))
        }
    }

    /// Original scale → `[0, 1]`.
    pub fn forward(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(match *self {
            Self::Identity => x,
            Self::Bounded { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::RealLine => 0.5 + x.atan() / PI,
            Self::HalfLine => x / (1.0 + x),
        })
    }

    /// `[0, 1]` → original scale.
    pub fn backward(&self, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(domain(format!("{y} is outside [0, 1]")));
        }
        Ok(match *self {
            Self::Identity => y,
            Self::Bounded { lo, hi } => lo + y * (hi - lo),
            Self::RealLine => (PI * (y - 0.5)).tan(),
            Self::HalfLine => y / (1.0 - y),
        })
    }

    /// `dy/dx` at a point of the original support.
    pub fn jacobian(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(match *self {
            Self::Identity => 1.0,
            Self::Bounded { lo, hi } => 1.0 / (hi - lo),
            Self::RealLine => 1.0 / (PI * (1.0 + x * x)),
            Self::HalfLine => 1.0 / ((1.0 + x) * (1.0 + x)),
        })
    }

    /// Density on the original scale from a density `g` on `[0, 1]`:
    /// `f(x) = g(forward(x)) · dy/dx`. Signed `g` passes through unchanged in sign.
    pub fn backward_density(&self, g: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
        let y = self.forward(x)?;
        Ok(g(y) * self.jacobian(x)?)
    }
}

impl fmt::Display for SupportTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "unit"),
            Self::Bounded { lo, hi } => write!(f, "{lo},{hi}"),
            Self::RealLine => write!(f, "real"),
            Self::HalfLine => write!(f, "halfline"),
        }
    }
}

/// Parses the `--support` forms `a,b`, `real`, `halfline` and `unit`.
impl FromStr for SupportTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unit" => Ok(Self::Identity),
            "real" => Ok(Self::RealLine),
            "halfline" => Ok(Self::HalfLine),
            other => {
                let (a, b) = other.split_once(',').ok_or_else(|| {
                    Error::Parse(format!(
                        "support `{other}` is not one of `a,b`, `real`, `halfline`, `unit`"
                    ))
                })?;
                let parse = |t: &str| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("support bound `{t}`: {e}")))
                };
                Self::bounded(parse(a)?, parse(b)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use proptest::prelude::*;

    #[test]
    fn forward_examples() {
        let t = SupportTransform::bounded(1.5, 5.0).unwrap();
        assert!((t.forward(1.67).unwrap() - 0.17 / 3.5).abs() < 1e-12);
        assert_eq!(SupportTransform::RealLine.forward(0.0).unwrap(), 0.5);
        assert_eq!(SupportTransform::HalfLine.forward(1.0).unwrap(), 0.5);
        assert_eq!(t.forward(1.5).unwrap(), 0.0);
        assert_eq!(t.forward(5.0).unwrap(), 1.0);
    }

    #[test]
    fn outside_support_is_rejected() {
        let t = SupportTransform::bounded(1.5, 5.0).unwrap();
        assert!(t.forward(1.4).is_err());
        assert!(t.backward_density(|_| 1.0, 6.0).is_err());
        assert!(SupportTransform::HalfLine.forward(-0.1).is_err());
        assert!(SupportTransform::Identity.forward(1.01).is_err());
        assert!(SupportTransform::bounded(2.0, 2.0).is_err());
    }

    #[test]
    fn backward_density_examples() {
        let g = |y: f64| 3.0 * y * y;
        assert_eq!(
            SupportTransform::Identity.backward_density(g, 0.4).unwrap(),
            g(0.4)
        );
        let t = SupportTransform::bounded(0.0, 2.0).unwrap();
        for x in [0.0, 0.3, 1.0, 2.0] {
            assert!((t.backward_density(|_| 1.0, x).unwrap() - 0.5).abs() < 1e-15);
        }
        let v = SupportTransform::HalfLine.backward_density(|_| 1.0, 1.0).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn parses_cli_forms() {
        assert_eq!("unit".parse::<SupportTransform>().unwrap(), SupportTransform::Identity);
        assert_eq!("real".parse::<SupportTransform>().unwrap(), SupportTransform::RealLine);
        assert_eq!(
            "halfline".parse::<SupportTransform>().unwrap(),
            SupportTransform::HalfLine
        );
        assert_eq!(
            "1.5, 5".parse::<SupportTransform>().unwrap(),
            SupportTransform::Bounded { lo: 1.5, hi: 5.0 }
        );
        assert!("5,1".parse::<SupportTransform>().is_err());
        assert!("circle".parse::<SupportTransform>().is_err());
    }

    /// Composite Gauss–Legendre over `[lo, hi]` split at the given breakpoints.
    fn integrate_pieces(f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
        let rule = GaussLegendre::shared(64);
        breaks
            .windows(2)
            .map(|w| rule.integrate_on(w[0], w[1], &f))
            .sum()
    }

    #[test]
    fn mass_is_preserved() {
        let g = |y: f64| 6.0 * y * (1.0 - y);
        let t = SupportTransform::bounded(-1.0, 3.0).unwrap();
        let m = integrate_pieces(|x| t.backward_density(g, x).unwrap(), &[-1.0, 3.0]);
        assert!((m - 1.0).abs() < 1e-6);

        // Unbounded supports: truncate at a horizon of 1e4 on log-spaced panels.
        let horizon = 1e4;
        let mut breaks: Vec<f64> = (0..=40)
            .map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 40.0))
            .collect();
        breaks.insert(0, 0.0);
        *breaks.last_mut().unwrap() = horizon;
        let h = SupportTransform::HalfLine;
        let m = integrate_pieces(|x| h.backward_density(g, x).unwrap(), &breaks);
        assert!((m - 1.0).abs() < 1e-6, "half-line mass {m}");

        let r = SupportTransform::RealLine;
        let m = 2.0 * integrate_pieces(|x| r.backward_density(g, x).unwrap(), &breaks);
        assert!((m - 1.0).abs() < 1e-6, "real-line mass {m}");
    }

    proptest! {
        #[test]
        fn round_trip(y in 1e-6f64..(1.0 - 1e-6)) {
            for t in [
                SupportTransform::Identity,
                SupportTransform::Bounded { lo: 1.5, hi: 5.0 },
                SupportTransform::RealLine,
                SupportTransform::HalfLine,
            ] {
                let x = t.backward(y).unwrap();
                let back = t.forward(x).unwrap();
                prop_assert!((back - y).abs() <= 1e-12, "{} {} {}", t, y, back);
            }
        }

        #[test]
        fn backward_of_forward(x in -50.0f64..50.0) {
            let r = SupportTransform::RealLine;
            let back = r.backward(r.forward(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
            if x >= 0.0 {
                let h = SupportTransform::HalfLine;
                let back = h.backward(h.forward(x).unwrap()).unwrap();
                prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }
    }
}
