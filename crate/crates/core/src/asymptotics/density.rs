//! True densities on `[0, 1]` with up to four derivatives, and the derivative
//! functionals `Δ₁`, `Δ₂` and the variance weight `ψ`.

use std::f64::consts::PI;

/// A density on `[0, 1]` with four continuous derivatives.
pub trait TrueDensity: Send + Sync {
    fn pdf(&self, x: f64) -> f64;

    /// `f^{(order)}(x)` for `order` in `0..=4`.
    fn derivative(&self, order: usize, x: f64) -> f64;
}

impl<T: TrueDensity + ?Sized> TrueDensity for &T {
    fn pdf(&self, x: f64) -> f64 {
        (**self).pdf(x)
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        (**self).derivative(order, x)
    }
}

/// `Δ₁(x) = ½[(1 - 2x) f'(x) + x(1 - x) f''(x)]`.
pub fn delta1(d: &dyn TrueDensity, x: f64) -> f64 {
    0.5 * ((1.0 - 2.0 * x) * d.derivative(1, x) + x * (1.0 - x) * d.derivative(2, x))
}

/// `Δ₂(x) = (1/6)(1 - 6x(1-x)) f'' + (5/12) x(1-x)(1-2x) f''' + (1/8) x²(1-x)² f''''`.
pub fn delta2(d: &dyn TrueDensity, x: f64) -> f64 {
    let v = x * (1.0 - x);
    (1.0 - 6.0 * v) * d.derivative(2, x) / 6.0
        + 5.0 / 12.0 * v * (1.0 - 2.0 * x) * d.derivative(3, x)
        + v * v * d.derivative(4, x) / 8.0
}

/// `ψ(x) = (4π x(1-x))^{-1/2}`; infinite at the endpoints.
pub fn psi(x: f64) -> f64 {
    (4.0 * PI * x * (1.0 - x)).sqrt().recip()
}

/// Derivatives of a user-supplied pdf by Ridders' extrapolation of finite
/// differences.
///
/// Stencils never leave `[0, 1]`. Where a central stencil of reasonable width
/// fits around `x` it is used (error expansion in `h²`, starting step up to
/// 0.2, shrink 1.4 per tableau row, stopped once the diagonal starts to
/// diverge). Closer to an endpoint the stencil is one-sided, pointing into
/// the interval (expansion in `h`, starting step up to 0.2, shrink 1.5, the
/// full 16-row tableau). Either way the tableau entry with the smallest
/// estimated error is returned. Near the endpoints fourth derivatives are
/// limited by rounding to roughly `1e-6` of their scale.
pub struct FiniteDifference<F> {
    pdf: F,
}

/// Ridders tableau settings.
struct Tableau {
    rows: usize,
    shrink: f64,
    /// Error expansion in powers of `h^power`.
    power: i32,
    /// Rows before the divergence stop is allowed to fire.
    warmup: usize,
}

const CENTRAL: Tableau = Tableau {
    rows: 12,
    shrink: 1.4,
    power: 2,
    warmup: 6,
};

const ONE_SIDED: Tableau = Tableau {
    rows: 16,
    shrink: 1.5,
    power: 1,
    warmup: usize::MAX,
};

impl<F: Fn(f64) -> f64 + Send + Sync> FiniteDifference<F> {
    pub const MAX_STEP: f64 = 0.2;
    const MIN_CENTRAL_STEP: f64 = 0.05;

    pub fn new(pdf: F) -> Self {
        Self { pdf }
    }

    fn central(&self, k: usize, x: f64, h: f64) -> f64 {
        let half = k as f64 / 2.0;
        let mut acc = 0.0;
        for j in 0..=k {
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binomial(k, j) * (self.pdf)(x + (j as f64 - half) * h);
        }
        acc / h.powi(k as i32)
    }

    /// Forward (`dir = 1`) or backward (`dir = -1`) difference.
    fn one_sided(&self, k: usize, x: f64, h: f64, dir: f64) -> f64 {
        let mut acc = 0.0;
        for j in 0..=k {
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binomial(k, j) * (self.pdf)(x + dir * j as f64 * h);
        }
        acc / (dir * h).powi(k as i32)
    }

    /// Extrapolated value and its error estimate.
    fn ridders(&self, step: impl Fn(f64) -> f64, h0: f64, t: &Tableau) -> (f64, f64) {
        let n = t.rows;
        let ratio = t.shrink.powi(t.power);
        let mut tab = vec![vec![0.0; n]; n];
        let mut h = h0;
        tab[0][0] = step(h);
        let mut best = tab[0][0];
        let mut err = f64::INFINITY;
        for i in 1..n {
            h /= t.shrink;
            tab[0][i] = step(h);
            let mut fac = ratio;
            for j in 1..=i {
                tab[j][i] = (tab[j - 1][i] * fac - tab[j - 1][i - 1]) / (fac - 1.0);
                fac *= ratio;
                let e = (tab[j][i] - tab[j - 1][i])
                    .abs()
                    .max((tab[j][i] - tab[j - 1][i - 1]).abs());
                if e <= err {
                    err = e;
                    best = tab[j][i];
                }
            }
            if i >= t.warmup && (tab[i][i] - tab[i - 1][i - 1]).abs() >= 2.0 * err {
                break;
            }
        }
        (best, err)
    }
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |c, i| c * (k - i) as f64 / (i + 1) as f64)
}

impl<F: Fn(f64) -> f64 + Send + Sync> TrueDensity for FiniteDifference<F> {
    fn pdf(&self, x: f64) -> f64 {
        (self.pdf)(x)
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        assert!(order <= 4, "derivative order {order} above 4");
        if order == 0 {
            return (self.pdf)(x);
        }
        let k = order as f64;
        let central_room = 2.0 * x.min(1.0 - x) / k;
        let central = |h0: f64| self.ridders(|h| self.central(order, x, h), h0, &CENTRAL);
        if central_room >= Self::MIN_CENTRAL_STEP {
            return central(central_room.min(Self::MAX_STEP)).0;
        }
        let dir = if x <= 0.5 { 1.0 } else { -1.0 };
        let room = if dir > 0.0 { 1.0 - x } else { x };
        let h0 = (room / k).min(Self::MAX_STEP);
        let one_sided = self.ridders(|h| self.one_sided(order, x, h, dir), h0, &ONE_SIDED);
        if central_room > 0.0 {
            // A narrow central stencil sometimes beats the one-sided one;
            // keep whichever reports the smaller error.
            let c = central(central_room);
            if c.1 < one_sided.1 {
                return c.0;
            }
        }
        one_sided.0
    }
}
