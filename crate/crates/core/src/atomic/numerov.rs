//! Radial dipole integrals in the Coulomb approximation.
//!
//! Wavefunctions are generated by inward Numerov integration of the radial
//! equation with the effective quantum number n* and a pure −1/r potential
//! (atomic units), on a uniform grid in x = √r with y(x) = R(r)·r^{3/4}:
//!
//!   y″ = g(x)·y,   g = −8E x² − 8 + (4l(l+1) + 3/4)/x²,   E = −1/(2 n*²).
//!
//! The √r grid resolves the fast inner oscillations and the slow outer tail
//! with a single step size. Integration starts in the classically forbidden
//! region beyond the outer turning point (r = 2n*²) and runs inward, which is
//! the numerically stable direction there.

use crate::error::{Error, Result};

const GRID_STEP: f64 = 0.008;
const R_INNER: f64 = 0.1;

struct RadialGrid {
    x: Vec<f64>,
    h: f64,
}

fn make_grid(r_outer: f64) -> RadialGrid {
    let x_in = R_INNER.sqrt();
    let x_out = r_outer.sqrt();
    let n = ((x_out - x_in) / GRID_STEP).ceil() as usize + 1;
    let h = (x_out - x_in) / (n - 1) as f64;
    let x = (0..n).map(|i| x_in + h * i as f64).collect();
    RadialGrid { x, h }
}

/// Scaled wavefunction y on the grid, normalized to ∫R² r² dr = 1.
fn radial_wavefunction(grid: &RadialGrid, n_star: f64, l: u32) -> Result<Vec<f64>> {
    let energy = -1.0 / (2.0 * n_star * n_star);
    let ll = (4 * l * (l + 1)) as f64 + 0.75;
    let n = grid.x.len();
    let h = grid.h;

    let g: Vec<f64> = grid
        .x
        .iter()
        .map(|&x| -8.0 * energy * x * x - 8.0 + ll / (x * x))
        .collect();
    let f: Vec<f64> = g.iter().map(|&gi| 1.0 - h * h * gi / 12.0).collect();

    let mut y = vec![0.0f64; n];
    y[n - 1] = 1e-10;
    y[n - 2] = 2e-10;
    for i in (0..n - 2).rev() {
        y[i] = ((12.0 - 10.0 * f[i + 1]) * y[i + 1] - f[i + 2] * y[i + 2]) / f[i];
    }

    // norm: ∫R² r² dr = 2 ∫ y² x² dx on the transformed grid
    let mut norm_sq = 0.0;
    for (i, (yi, xi)) in y.iter().zip(&grid.x).enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        norm_sq += w * yi * yi * xi * xi;
    }
    norm_sq *= 2.0 * h;
    let norm = norm_sq.sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Numerical(format!(
            "radial wavefunction for n* = {n_star}, l = {l} did not normalize \
             (norm^2 = {norm_sq}, {n} grid points, h = {h})"
        )));
    }
    for v in &mut y {
        *v /= norm;
    }
    Ok(y)
}

/// ∫ R_a(r) r R_b(r) r² dr in units of a₀, by effective quantum number.
///
/// Positive by convention; both states are evaluated on a common grid
/// extending past the larger state's outer turning point.
pub(crate) fn radial_integral_nstar(
    n_star_a: f64,
    l_a: u32,
    n_star_b: f64,
    l_b: u32,
) -> Result<f64> {
    if !(n_star_a > 0.0) || !(n_star_b > 0.0) {
        return Err(Error::Domain(format!(
            "effective quantum numbers must be positive, got {n_star_a}, {n_star_b}"
        )));
    }
    let ns_max = n_star_a.max(n_star_b);
    let grid = make_grid(2.0 * ns_max * (ns_max + 15.0));
    let ya = radial_wavefunction(&grid, n_star_a, l_a)?;
    let yb = radial_wavefunction(&grid, n_star_b, l_b)?;

    // ⟨a| r |b⟩ = 2 ∫ y_a y_b x⁴ dx
    let n = grid.x.len();
    let mut acc = 0.0;
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let x2 = grid.x[i] * grid.x[i];
        acc += w * ya[i] * yb[i] * x2 * x2;
    }
    Ok((2.0 * grid.h * acc).abs())
}
