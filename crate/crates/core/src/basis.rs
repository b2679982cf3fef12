//! Bernstein basis polynomials `b_k(m, x) = C(m, k) x^k (1 - x)^(m - k)` and
//! the empirical distribution function.
//!
//! Single values use Loader's saddle-point binomial formula and `x ∈ {0, 1}`
//! is handled exactly. Grid columns use the cheaper log-domain product with
//! `ln C(m, k)` exact (via 128-bit integers) for `m <= 120` and from a
//! Stirling expansion above that. Whole rows use the ratio
//! recurrence `b_{k+1} / b_k = (m - k) / (k + 1) · x / (1 - x)`, re-anchored
//! by a direct log-domain evaluation every [`ROW_BLOCK`] entries so that the
//! accumulated rounding stays far below `1e-13` relative for any degree.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};


use crate::error::{domain, Error, Result};

const EXACT_CHOOSE_MAX: usize = 120;
const ROW_BLOCK: usize = 32;

/// `ln C(m, k)`; `k` must not exceed `m`.
pub fn ln_choose(m: usize, k: usize) -> f64 {
    debug_assert!(k <= m);
    let k = k.min(m - k);
    if k == 0 {
        return 0.0;
    }
    if m <= EXACT_CHOOSE_MAX {
        let mut c: u128 = 1;
        for j in 0..k {
            c = c * (m - j) as u128 / (j + 1) as u128;
        }
        return (c as f64).ln();
    }
    // Stirling with the error terms kept separately, so nothing of size
    // m ln m is ever formed and cancelled.
    let (mf, kf, rf) = (m as f64, k as f64, (m - k) as f64);
    stirling_error(m) - stirling_error(k) - stirling_error(m - k)
        - 0.5 * (2.0 * std::f64::consts::PI * kf * rf / mf).ln()
        + kf * (mf / kf).ln()
        + rf * (kf / rf).ln_1p()
}

/// `ln n! - [(n + 1/2) ln n - n + ln √(2π)]`.
fn stirling_error(n: usize) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let nf = n as f64;
    if n <= 15 {
        let fact: f64 = (1..=n).map(|j| j as f64).product();
        return fact.ln() - (nf + 0.5) * nf.ln() + nf - 0.5 * (2.0 * std::f64::consts::PI).ln();
    }
    let n2 = nf * nf;
    if n > 500 {
        (S0 - S1 / n2) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / n2) / n2) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / n2) / n2) / n2) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / n2) / n2) / n2) / n2) / nf
    }
}

/// Deviance term `x ln(x / np) + np - x`, accurate when `x ≈ np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("basis argument x = {x} is outside [0, 1]")))
    }
}

/// `b_k(m, x)`. Degree 0 is accepted (`b_0(0, x) = 1`), which the order-`m/2`
/// half of the `Z` kernel needs when `m = 2`.
pub fn eval_basis(m: usize, k: usize, x: f64) -> Result<f64> {
    if k > m {
        return Err(domain(format!("basis index k = {k} exceeds degree m = {m}")));
    }
    check_x(x)?;
    Ok(basis_unchecked(m, k, x))
}

/// Pointwise value by Loader's saddle-point form of the binomial
/// probability, which keeps the relative error near machine precision for
/// any degree.
pub(crate) fn basis_unchecked(m: usize, k: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if x >= 1.0 {
        return if k == m { 1.0 } else { 0.0 };
    }
    let (mf, kf) = (m as f64, k as f64);
    let q = 1.0 - x;
    if k == 0 {
        return (mf * (-x).ln_1p()).exp();
    }
    if k == m {
        return (mf * x.ln()).exp();
    }
    let lc = stirling_error(m) - stirling_error(k) - stirling_error(m - k)
        - bd0(kf, mf * x)
        - bd0(mf - kf, mf * q);
    let lf = (2.0 * std::f64::consts::PI).ln() + kf.ln() + (-kf / mf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// `exp(ln C + k ln x + (m - k) ln(1 - x))` for interior `x`.
#[inline]
pub(crate) fn basis_from_logs(ln_c: f64, m: usize, k: usize, ln_x: f64, ln_1mx: f64) -> f64 {
    (ln_c + k as f64 * ln_x + (m - k) as f64 * ln_1mx).exp()
}

/// All `m + 1` basis values at `x`.
pub fn eval_basis_row(m: usize, x: f64) -> Result<Vec<f64>> {
    check_x(x)?;
    let mut row = vec![0.0; m + 1];
    basis_row_into(m, x, &mut row);
    Ok(row)
}

/// Fills `out` (length `m + 1`) with `b_0(m, x) ..= b_m(m, x)`.
pub(crate) fn basis_row_into(m: usize, x: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), m + 1);
    if x <= 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    if x >= 1.0 {
        out.fill(0.0);
        out[m] = 1.0;
        return;
    }
    let ratio = x / (1.0 - x);
    let mode = (((m + 1) as f64 * x).floor() as usize).min(m);
    let mut start = 0;
    while start <= m {
        let end = (start + ROW_BLOCK - 1).min(m);
        // Anchor on the block entry nearest the mode and recurse away from it,
        // so values only ever shrink along the recurrence.
        let anchor = mode.clamp(start, end);
        out[anchor] = basis_unchecked(m, anchor, x);
        for k in anchor..end {
            out[k + 1] = out[k] * ratio * (m - k) as f64 / (k + 1) as f64;
        }
        for k in (start + 1..=anchor).rev() {
            out[k - 1] = out[k] * k as f64 / ((m - k + 1) as f64 * ratio);
        }
        start = end + 1;
    }
}

/// Index `k` of the half-open bin `(k/m, (k+1)/m]` containing `obs`, with
/// `obs = 0` assigned to the first bin. The comparison is made against the
/// same floating-point cut points `k as f64 / m as f64` an empirical CDF
/// would use, so bin counts agree exactly with `F_n` increments.
pub fn bin_index(obs: f64, m: usize) -> usize {
    debug_assert!(m >= 1);
    let mf = m as f64;
    let mut k = ((obs * mf).ceil() as isize - 1).clamp(0, m as isize - 1) as usize;
    if k > 0 && obs <= k as f64 / mf {
        k -= 1;
    } else if k + 1 < m && obs > (k + 1) as f64 / mf {
        k += 1;
    }
    k
}

/// Right-continuous empirical distribution function of a sample.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(observations: &[f64]) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptySample);
        }
        if observations.iter().any(|v| v.is_nan()) {
            return Err(domain("empirical CDF received a NaN observation"));
        }
        let mut sorted = observations.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `(1/n) #{i : X_i <= t}`.
    pub fn eval(&self, t: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= t);
        count as f64 / self.sorted.len() as f64
    }
}

/// Basis values tabulated at a fixed set of abscissas, cached per degree.
///
/// Layout of a table for degree `m`: entry `k * nodes.len() + j` holds
/// `b_k(m, nodes[j])`, so the values of one basis function over all nodes
/// are contiguous.
#[derive(Debug)]
pub struct BasisTable {
    nodes: Vec<f64>,
    cache: Mutex<HashMap<usize, Arc<[f64]>>>,
}

/// Upper bound on cached entries before the cache is flushed.
const TABLE_CACHE_ENTRIES: usize = 1 << 24;

impl BasisTable {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        for &x in &nodes {
            check_x(x)?;
        }
        Ok(Self {
            nodes,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn table(&self, degree: usize) -> Arc<[f64]> {
        if let Some(t) = self.cache.lock().expect("basis cache poisoned").get(&degree) {
            return t.clone();
        }
        let width = self.nodes.len();
        let mut data = vec![0.0; (degree + 1) * width];
        let mut row = vec![0.0; degree + 1];
        for (j, &x) in self.nodes.iter().enumerate() {
            basis_row_into(degree, x, &mut row);
            for (k, &v) in row.iter().enumerate() {
                data[k * width + j] = v;
            }
        }
        let table: Arc<[f64]> = data.into();
        let mut cache = self.cache.lock().expect("basis cache poisoned");
        let held: usize = cache.values().map(|t| t.len()).sum();
        if held + table.len() > TABLE_CACHE_ENTRIES {
            cache.clear();
        }
        cache.insert(degree, table.clone());
        table
    }

    /// `b_k(degree, x_j)` for every node.
    pub fn column(&self, degree: usize, k: usize) -> Vec<f64> {
        let t = self.table(degree);
        let w = self.nodes.len();
        t[k * w..(k + 1) * w].to_vec()
    }
}
