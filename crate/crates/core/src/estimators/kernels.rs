use crate::basis::{basis_unchecked, bin_index};
use crate::error::{domain, Result};

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(domain(format!("{name} = {v} is outside [0, 1]")))
    }
}

/// `T(x) = m b_k(m - 1, x)` with `k` the index of the bin `(k/m, (k+1)/m]`
/// holding `obs` (0 goes to the first bin, 1 to the last).
pub fn t_kernel(x: f64, obs: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(domain("kernel order m must be at least 1"));
    }
    check_unit("x", x)?;
    check_unit("observation", obs)?;
    Ok(m as f64 * basis_unchecked(m - 1, bin_index(obs, m), x))
}

/// `Z(x) = 2 T_m(x) - T_{m/2}(x)`; may be negative.
pub fn z_kernel(x: f64, obs: f64, m: usize) -> Result<f64> {
    if m < 2 || m % 2 != 0 {
        return Err(domain(format!("Z kernel order m = {m} must be even and at least 2")));
    }
    Ok(2.0 * t_kernel(x, obs, m)? - t_kernel(x, obs, m / 2)?)
}
