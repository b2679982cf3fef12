use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use crate::basis::{basis_from_logs, ln_choose, BasisTable};
use crate::error::{domain, Result};
use crate::quadrature::{GaussLegendre, DEFAULT_NODES};

/// Fixed abscissas on `[0, 1]` with quadrature weights.
///
/// The standard grid is the `n`-node Gauss–Legendre rule plus the endpoints 0
/// and 1 with weight zero: integrals of polynomials up to degree `2n - 1` are
/// exact, and the endpoint values are still available for inspection.
#[derive(Debug)]
pub struct EvalGrid {
    abscissas: Vec<f64>,
    weights: Vec<f64>,
    ln_x: Vec<f64>,
    ln_1mx: Vec<f64>,
    exact_degree: Option<usize>,
    table: BasisTable,
}

static SHARED: LazyLock<Mutex<HashMap<usize, Arc<EvalGrid>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

impl EvalGrid {
    pub fn gauss_legendre(nodes: usize) -> Self {
        let rule = GaussLegendre::shared(nodes);
        let mut abscissas = Vec::with_capacity(nodes + 2);
        let mut weights = Vec::with_capacity(nodes + 2);
        abscissas.push(0.0);
        weights.push(0.0);
        abscissas.extend_from_slice(rule.nodes());
        weights.extend_from_slice(rule.weights());
        abscissas.push(1.0);
        weights.push(0.0);
        Self::build(abscissas, weights, Some(2 * nodes - 1))
    }

    /// Process-wide Gauss–Legendre grid with `nodes` interior nodes.
    pub fn shared(nodes: usize) -> Arc<Self> {
        let mut cache = SHARED.lock().expect("grid cache poisoned");
        cache
            .entry(nodes)
            .or_insert_with(|| Arc::new(Self::gauss_legendre(nodes)))
            .clone()
    }

    /// The default 512-node grid.
    pub fn standard() -> Arc<Self> {
        Self::shared(DEFAULT_NODES)
    }

    /// Arbitrary strictly increasing abscissas in `[0, 1]`, integrated by the
    /// trapezoid rule over `[first, last]`.
    pub fn custom(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("grid needs at least one abscissa"));
        }
        if points.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(domain("grid abscissas must lie in [0, 1]"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("grid abscissas must be strictly increasing"));
        }
        let mut weights = vec![0.0; points.len()];
        for (i, w) in points.windows(2).enumerate() {
            let h = 0.5 * (w[1] - w[0]);
            weights[i] += h;
            weights[i + 1] += h;
        }
        Ok(Self::build(points, weights, None))
    }

    fn build(abscissas: Vec<f64>, weights: Vec<f64>, exact_degree: Option<usize>) -> Self {
        let ln_x = abscissas.iter().map(|x| x.ln()).collect();
        let ln_1mx = abscissas.iter().map(|x| (-x).ln_1p()).collect();
        let table = BasisTable::new(abscissas.clone()).expect("abscissas checked");
        Self {
            abscissas,
            weights,
            ln_x,
            ln_1mx,
            exact_degree,
            table,
        }
    }

    pub fn len(&self) -> usize {
        self.abscissas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissas.is_empty()
    }

    pub fn abscissas(&self) -> &[f64] {
        &self.abscissas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest polynomial degree integrated exactly, if any.
    pub fn exact_degree(&self) -> Option<usize> {
        self.exact_degree
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn basis_table(&self) -> &BasisTable {
        &self.table
    }

    /// `out[j] = b_k(degree, x_j)`, computed directly in `O(len)`.
    pub fn basis_column_into(&self, degree: usize, k: usize, out: &mut [f64]) {
        let ln_c = ln_choose(degree, k);
        for (j, o) in out.iter_mut().enumerate() {
            let x = self.abscissas[j];
            *o = if x <= 0.0 {
                (k == 0) as u8 as f64
            } else if x >= 1.0 {
                (k == degree) as u8 as f64
            } else {
                basis_from_logs(ln_c, degree, k, self.ln_x[j], self.ln_1mx[j])
            };
        }
    }

    /// Vitale's estimate `m Σ_k w_k b_k(m - 1, x_j)` at every abscissa, where
    /// `m = weights.len()`.
    pub fn vitale_values(&self, bin_weights: &[f64]) -> Vec<f64> {
        let m = bin_weights.len();
        let width = self.len();
        let table = self.table.table(m - 1);
        let mut out = vec![0.0; width];
        for (k, &w) in bin_weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let scale = m as f64 * w;
            for (o, &b) in out.iter_mut().zip(&table[k * width..(k + 1) * width]) {
                *o += scale * b;
            }
        }
        out
    }

    /// Piecewise-linear interpolation of grid values; constant beyond the
    /// outermost abscissas.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let xs = &self.abscissas;
        let i = xs.partition_point(|&a| a < x);
        if i == 0 {
            return values[0];
        }
        if i == xs.len() {
            return values[xs.len() - 1];
        }
        if xs[i] == x {
            return values[i];
        }
        let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        values[i - 1] + t * (values[i] - values[i - 1])
    }
}
