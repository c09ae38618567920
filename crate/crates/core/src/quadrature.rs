//! Adaptive quadrature for semi-infinite, exponentially decaying integrands,
//! and convergence-checked series summation for Matsubara-type sums.
//!
//! Semi-infinite domains are compactified by x = s·u/(1−u), u ∈ [0,1), with s
//! the integrand's characteristic decay scale, then refined adaptively with a
//! Gauss-Kronrod 7-15 embedded pair. The error estimator follows the classic
//! QUADPACK scaling.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Tolerances and limits for one semi-infinite integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Relative tolerance, in (0, 1).
    pub rel_tol: f64,
    /// Absolute floor for the convergence test (≥ 0).
    pub abs_tol: f64,
    /// Maximum number of panel subdivisions.
    pub max_subdivisions: usize,
    /// Characteristic decay length of the integrand, in units of the
    /// integration variable (> 0). Sets the compactifying map.
    pub decay_scale: f64,
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, decay_scale: f64) -> Result<Self> {
        let cfg = QuadratureConfig {
            rel_tol,
            abs_tol: 0.0,
            max_subdivisions: 200,
            decay_scale,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "rel_tol must be in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::Config(format!(
                "abs_tol must be >= 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Config("max_subdivisions must be >= 1".into()));
        }
        if !(self.decay_scale > 0.0 && self.decay_scale.is_finite()) {
            return Err(Error::Config(format!(
                "decay_scale must be positive and finite, got {}",
                self.decay_scale
            )));
        }
        Ok(())
    }
}

/// Outcome of one integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

// Gauss-Kronrod 7-15 pair on [-1, 1]; abscissae and weights as in QUADPACK.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_207,
    0.949_107_912_342_758_524_526,
    0.864_864_423_359_769_072_789,
    0.741_531_185_599_394_439_864,
    0.586_087_235_467_691_130_294,
    0.405_845_151_377_397_166_907,
    0.207_784_955_007_898_467_601,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_964,
    0.063_092_092_629_978_553_291,
    0.104_790_010_322_250_183_839,
    0.140_653_259_715_525_918_745,
    0.169_004_726_639_267_902_827,
    0.190_350_578_064_785_409_913,
    0.204_432_940_075_298_892_414,
    0.209_482_141_084_727_828_013,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_271,
    0.279_705_391_489_276_667_901,
    0.381_830_050_505_118_944_950,
    0.417_959_183_673_469_387_755,
];

struct PanelEval {
    value: f64,
    error: f64,
    nan: bool,
}

/// One GK15 evaluation over [a, b].
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> PanelEval {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    let mut nan = !fc.is_finite();
    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        nan |= !f1.is_finite() || !f2.is_finite();
        fv[i] = f1;
        fv[14 - i] = f2;
    }

    let mut result_kronrod = WGK[7] * fc;
    let mut result_gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    for i in 0..7 {
        let sum = fv[i] + fv[14 - i];
        result_kronrod += WGK[i] * sum;
        resabs += WGK[i] * (fv[i].abs() + fv[14 - i].abs());
        if i % 2 == 1 {
            result_gauss += WG[i / 2] * sum;
        }
    }
    let mean = 0.5 * result_kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((fv[i] - mean).abs() + (fv[14 - i] - mean).abs());
    }

    let value = result_kronrod * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let raw = ((result_kronrod - result_gauss) * half).abs();
    let mut error = raw;
    if resasc != 0.0 && raw != 0.0 {
        error = resasc * (200.0 * raw / resasc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * resabs;
    if round_off > f64::MIN_POSITIVE && round_off > error {
        error = round_off;
    }

    PanelEval { value, error, nan }
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate f over (0, ∞).
///
/// The integrand must be finite on (0, ∞) and decay at least exponentially
/// beyond ~10 decay scales. Non-convergence within the subdivision budget is
/// reported through `converged = false`, not an error; a NaN from the
/// integrand is an immediate error.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    let s = cfg.decay_scale;
    let mapped = |u: f64| -> f64 {
        let om = 1.0 - u;
        let x = s * u / om;
        let fx = f(x);
        // an exactly-zero integrand short-circuits the (possibly huge) jacobian
        if fx == 0.0 {
            return 0.0;
        }
        fx * s / (om * om)
    };

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for (a, b) in [(0.0, 0.5), (0.5, 1.0)] {
        let e = gk15(&mapped, a, b);
        evaluations += 15;
        if e.nan {
            return Err(Error::Numerical(format!(
                "integrand returned a non-finite value in mapped interval [{a}, {b}]"
            )));
        }
        heap.push(Panel {
            a,
            b,
            value: e.value,
            error: e.error,
        });
    }

    let mut subdivisions = 0usize;
    loop {
        let total_value: f64 = heap.iter().map(|p| p.value).sum();
        let total_error: f64 = heap.iter().map(|p| p.error).sum();
        let tolerance = (cfg.rel_tol * total_value.abs()).max(cfg.abs_tol);
        if total_error <= tolerance {
            return Ok(QuadratureResult {
                value: total_value,
                error_estimate: total_error,
                evaluations,
                converged: true,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Ok(QuadratureResult {
                value: total_value,
                error_estimate: total_error,
                evaluations,
                converged: false,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let e = gk15(&mapped, a, b);
            evaluations += 15;
            if e.nan {
                return Err(Error::Numerical(format!(
                    "integrand returned a non-finite value in mapped interval [{a}, {b}]"
                )));
            }
            heap.push(Panel {
                a,
                b,
                value: e.value,
                error: e.error,
            });
        }
        subdivisions += 1;
    }
}

/// Controls for [`sum_until_converged`] and [`sum_blocks_parallel`].
#[derive(Debug, Clone, Copy)]
pub struct SumConfig {
    /// Per-term relative contribution below which a term counts as converged.
    pub rel_tol: f64,
    /// Terms always evaluated before the convergence test applies. Callers
    /// summing physical series set this from the known cutoff scale; the
    /// per-term test alone cannot see how long a slowly varying prefix lasts.
    pub min_terms: usize,
    /// Hard cap on the number of terms.
    pub term_cap: usize,
}

impl Default for SumConfig {
    fn default() -> Self {
        SumConfig {
            rel_tol: 1e-9,
            min_terms: 8,
            term_cap: 100_000_000,
        }
    }
}

const CONSECUTIVE_SMALL: usize = 3;

/// Sum term(j) for j ≥ 0 with the j = 0 term weighted ½.
///
/// Terminates once the last 3 consecutive terms each contribute less than
/// `rel_tol` of the running sum (after `min_terms`). Exceeding `term_cap`
/// is an error naming the cap.
pub fn sum_until_converged<F: Fn(usize) -> f64>(term: F, cfg: &SumConfig) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut small_run = 0usize;
    for j in 0..cfg.term_cap {
        let w = if j == 0 { 0.5 } else { 1.0 };
        let t = w * term(j);
        if !t.is_finite() {
            return Err(Error::Numerical(format!("series term {j} is not finite")));
        }
        sum += t;
        if t.abs() <= cfg.rel_tol * sum.abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if j + 1 >= cfg.min_terms && small_run >= CONSECUTIVE_SMALL {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!(
        "series did not converge within the {}-term cap",
        cfg.term_cap
    )))
}

/// Block-parallel variant of [`sum_until_converged`] with identical term
/// values and convergence semantics; blocks are evaluated with rayon and
/// accumulated in index order. May evaluate up to one block past the
/// sequential stopping point.
pub fn sum_blocks_parallel<F: Fn(usize) -> f64 + Sync>(term: F, cfg: &SumConfig) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut small_run = 0usize;
    let mut start = 0usize;
    let mut block = 256usize.min(cfg.term_cap.max(1));
    while start < cfg.term_cap {
        let end = (start + block).min(cfg.term_cap);
        let values: Vec<f64> = (start..end).into_par_iter().map(&term).collect();
        for (offset, v) in values.into_iter().enumerate() {
            let j = start + offset;
            let t = if j == 0 { 0.5 * v } else { v };
            if !t.is_finite() {
                return Err(Error::Numerical(format!("series term {j} is not finite")));
            }
            sum += t;
            if t.abs() <= cfg.rel_tol * sum.abs() {
                small_run += 1;
            } else {
                small_run = 0;
            }
            if j + 1 >= cfg.min_terms && small_run >= CONSECUTIVE_SMALL {
                return Ok(sum);
            }
        }
        start = end;
        block = (block * 2).min(65_536);
    }
    Err(Error::NonConvergence(format!(
        "series did not converge within the {}-term cap",
        cfg.term_cap
    )))
}
