//! The ten test densities on `[0, 1]`: beta laws and mixtures, a truncated
//! exponential and truncated normals, with closed-form derivatives, CDFs and
//! samplers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::asymptotics::TrueDensity;
use crate::error::{Error, Result};
use crate::sample::Sample;

/// Identifier of a zoo density, `a` through `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZooId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
}

impl ZooId {
    pub const ALL: [ZooId; 10] = [
        ZooId::A,
        ZooId::B,
        ZooId::C,
        ZooId::D,
        ZooId::E,
        ZooId::F,
        ZooId::G,
        ZooId::H,
        ZooId::I,
        ZooId::J,
    ];

    pub fn letter(self) -> char {
        (b'a' + self.index() as u8) as char
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn density(self) -> ZooDensity {
        ZooDensity::new(self)
    }

    pub fn description(self) -> &'static str {
        match self {
            ZooId::A => "Beta(3,5)",
            ZooId::B => "Beta(1,6)",
            ZooId::C => "Beta(3,1)",
            ZooId::D => "1/2 Beta(3,9) + 1/2 Beta(9,3)",
            ZooId::E => "1/2 Beta(3,1) + 1/2 Beta(10,10)",
            ZooId::F => "1/2 Beta(1,6) + 1/2 Beta(3,5)",
            ZooId::G => "1/2 Beta(2,1) + 1/2 Beta(1,4)",
            ZooId::H => "exponential with mean 0.8 truncated to [0,1]",
            ZooId::I => "N(0,1) truncated to [0,1]",
            ZooId::J => "1/4 N(2,1) + 3/4 N(-3,1), each truncated to [0,1]",
        }
    }
}

impl fmt::Display for ZooId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for ZooId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut chars = t.chars();
        match (chars.next().map(|c| c.to_ascii_lowercase()), chars.next()) {
            (Some(c @ 'a'..='j'), None) => Ok(ZooId::ALL[(c as u8 - b'a') as usize]),
            _ => Err(Error::UnknownDensity(s.to_string())),
        }
    }
}

fn std_normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Upper tail `P(N(0,1) > u)`.
fn upper_tail(u: f64) -> f64 {
    0.5 * erfc(u / std::f64::consts::SQRT_2)
}

/// `P(a < N(0,1) <= b)` without cancellation in either tail.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        upper_tail(a) - upper_tail(b)
    } else if b <= 0.0 {
        upper_tail(-b) - upper_tail(-a)
    } else {
        1.0 - upper_tail(b) - upper_tail(-a)
    }
}

fn falling(a: u32, i: u32) -> f64 {
    (0..i).fold(1.0, |acc, j| acc * (a - j) as f64)
}

#[derive(Debug, Clone, PartialEq)]
enum Component {
    /// Beta with integer shape parameters.
    Beta { p: u32, q: u32, norm: f64 },
    /// `Exp(mean = scale)` restricted to `[0, 1]`.
    TruncExp { scale: f64, norm: f64 },
    /// `N(mu, 1)` restricted to `[0, 1]`.
    TruncNormal { mu: f64, mass: f64 },
}

impl Component {
    fn beta(p: u32, q: u32) -> Self {
        // 1 / B(p, q) = (p + q - 1)! / ((p - 1)! (q - 1)!)
        let norm = falling(p + q - 1, p + q - 1) / (falling(p - 1, p - 1) * falling(q - 1, q - 1));
        Component::Beta { p, q, norm }
    }

    fn trunc_exp(scale: f64) -> Self {
        let norm = 1.0 / (scale * -(-1.0 / scale).exp_m1());
        Component::TruncExp { scale, norm }
    }

    fn trunc_normal(mu: f64) -> Self {
        Component::TruncNormal {
            mu,
            mass: normal_mass(-mu, 1.0 - mu),
        }
    }

    fn derivative(&self, r: usize, x: f64) -> f64 {
        match *self {
            Component::Beta { p, q, norm } => {
                // Leibniz rule on x^{p-1} (1-x)^{q-1}.
                let (a, b) = (p - 1, q - 1);
                let r = r as u32;
                let mut acc = 0.0;
                for i in 0..=r.min(a) {
                    let j = r - i;
                    if j > b {
                        continue;
                    }
                    let binom = falling(r, i) / falling(i, i);
                    let left = falling(a, i) * x.powi((a - i) as i32);
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let right = sign * falling(b, j) * (1.0 - x).powi((b - j) as i32);
                    acc += binom * left * right;
                }
                norm * acc
            }
            Component::TruncExp { scale, norm } => {
                norm * (-x / scale).exp() * (-1.0 / scale).powi(r as i32)
            }
            Component::TruncNormal { mu, mass } => {
                let u = x - mu;
                let hermite = match r {
                    0 => 1.0,
                    1 => u,
                    2 => u * u - 1.0,
                    3 => u * u * u - 3.0 * u,
                    4 => u.powi(4) - 6.0 * u * u + 3.0,
                    _ => unreachable!("derivative order checked by caller"),
                };
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                sign * hermite * std_normal_pdf(u) / mass
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match *self {
            Component::Beta { p, q, .. } => {
                // I_x(p, q) = Σ_{j=p}^{p+q-1} C(p+q-1, j) x^j (1-x)^{p+q-1-j}
                let n = p + q - 1;
                (p..=n)
                    .map(|j| {
                        falling(n, j) / falling(j, j)
                            * x.powi(j as i32)
                            * (1.0 - x).powi((n - j) as i32)
                    })
                    .sum()
            }
            Component::TruncExp { scale, .. } => (-x / scale).exp_m1() / (-1.0 / scale).exp_m1(),
            Component::TruncNormal { mu, mass } => normal_mass(-mu, x - mu) / mass,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Component::Beta { p, q, .. } => Beta::new(p as f64, q as f64)
                .expect("positive shapes")
                .sample(rng),
            Component::TruncExp { scale, .. } => {
                let u: f64 = rng.random();
                let top = -(-1.0 / scale).exp_m1();
                -scale * (-u * top).ln_1p()
            }
            Component::TruncNormal { mu, .. } => {
                let u: f64 = rng.random();
                let (a, b) = (-mu, 1.0 - mu);
                let z = if a >= 0.0 {
                    let (ta, tb) = (upper_tail(a), upper_tail(b));
                    upper_tail_inv(ta - u * (ta - tb))
                } else {
                    let (ta, tb) = (upper_tail(-b), upper_tail(-a));
                    -upper_tail_inv(ta + u * (tb - ta))
                };
                (mu + z).clamp(0.0, 1.0)
            }
        }
    }
}

/// Inverse of [`upper_tail`], polished by one Newton step against the
/// full-precision `erfc`.
fn upper_tail_inv(p: f64) -> f64 {
    let u = std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    let density = std_normal_pdf(u);
    if density > 0.0 && u.is_finite() {
        u + (upper_tail(u) - p) / density
    } else {
        u
    }
}

/// A zoo density: a finite mixture of [`Component`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct ZooDensity {
    id: ZooId,
    parts: Vec<(f64, Component)>,
}

impl ZooDensity {
    pub fn new(id: ZooId) -> Self {
        use Component as C;
        let parts = match id {
            ZooId::A => vec![(1.0, C::beta(3, 5))],
            ZooId::B => vec![(1.0, C::beta(1, 6))],
            ZooId::C => vec![(1.0, C::beta(3, 1))],
            ZooId::D => vec![(0.5, C::beta(3, 9)), (0.5, C::beta(9, 3))],
            ZooId::E => vec![(0.5, C::beta(3, 1)), (0.5, C::beta(10, 10))],
            ZooId::F => vec![(0.5, C::beta(1, 6)), (0.5, C::beta(3, 5))],
            ZooId::G => vec![(0.5, C::beta(2, 1)), (0.5, C::beta(1, 4))],
            ZooId::H => vec![(1.0, C::trunc_exp(0.8))],
            ZooId::I => vec![(1.0, C::trunc_normal(0.0))],
            ZooId::J => vec![(0.25, C::trunc_normal(2.0)), (0.75, C::trunc_normal(-3.0))],
        };
        Self { id, parts }
    }

    pub fn id(&self) -> ZooId {
        self.id
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.parts.iter().map(|(w, c)| w * c.cdf(x)).sum()
    }

    /// One draw: pick a component by weight, then draw from it.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.parts.len() == 1 {
            return self.parts[0].1.draw(rng);
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (w, c) in &self.parts {
            acc += w;
            if u < acc {
                return c.draw(rng);
            }
        }
        self.parts[self.parts.len() - 1].1.draw(rng)
    }

    pub fn draw_n(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}

impl TrueDensity for ZooDensity {
    fn pdf(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        assert!(order <= 4, "derivative order {order} above 4");
        self.parts.iter().map(|(w, c)| w * c.derivative(order, x)).sum()
    }
}

/// `n` draws from zoo density `id`, deterministic in `seed`.
pub fn sample_zoo(id: ZooId, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    Sample::unit(id.density().draw_n(n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_adaptive;

    #[test]
    fn parse_ids() {
        assert_eq!("a".parse::<ZooId>().unwrap(), ZooId::A);
        assert_eq!("(J)".parse::<ZooId>().unwrap(), ZooId::J);
        assert!("k".parse::<ZooId>().is_err());
        assert!("ab".parse::<ZooId>().is_err());
        assert_eq!(ZooId::H.to_string(), "h");
    }

    #[test]
    fn densities_integrate_to_one() {
        for id in ZooId::ALL {
            let d = id.density();
            let mass = integrate_adaptive(|x| d.pdf(x), 0.0, 1.0, 1e-13).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "{id}: {mass}");
            assert!((d.cdf(1.0) - 1.0).abs() < 1e-12 && d.cdf(0.0).abs() < 1e-15, "{id}");
        }
    }

    #[test]
    fn cdf_matches_integrated_pdf() {
        for id in ZooId::ALL {
            let d = id.density();
            for x in [0.1, 0.37, 0.8] {
                let want = integrate_adaptive(|t| d.pdf(t), 0.0, x, 1e-13).unwrap();
                assert!((d.cdf(x) - want).abs() < 1e-10, "{id} {x}");
            }
        }
    }

    #[test]
    fn known_values() {
        let a = ZooId::A.density();
        assert!((a.pdf(0.5) - 1.640_625).abs() < 1e-13);
        let h = ZooId::H.density();
        let want = (-0.5f64 / 0.8).exp() / (0.8 * (1.0 - (-1.25f64).exp()));
        assert!((h.pdf(0.5) - want).abs() < 1e-13);
    }

    #[test]
    fn draws_are_deterministic_and_in_range() {
        for id in ZooId::ALL {
            let s1 = sample_zoo(id, 500, 7).unwrap();
            let s2 = sample_zoo(id, 500, 7).unwrap();
            assert_eq!(s1, s2);
            assert!(s1.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }
        assert!(sample_zoo(ZooId::A, 0, 1).is_err());
    }
}
