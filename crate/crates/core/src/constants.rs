//! Physical constants (CODATA 2018) and the unit conversions used across the crate.
//!
//! All inter-module interfaces are SI. Atomic-unit conversions exist only for
//! dipole matrix elements, which enter and leave the atomic-structure module.

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant (J·s).
pub const H_PLANCK: f64 = 6.626_070_15e-34;
/// Vacuum permeability (N/A²).
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity (F/m).
pub const EPS_0: f64 = 8.854_187_812_8e-12;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;
/// Bohr radius (m).
pub const A_BOHR: f64 = 5.291_772_109_03e-11;
/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Fine-structure constant.
pub const ALPHA_FS: f64 = 7.297_352_569_3e-3;
/// Fine-structure constant rounded to 1/137, for table reproduction runs.
pub const ALPHA_FS_PAPER: f64 = 1.0 / 137.0;
/// Rydberg constant for infinite nuclear mass (1/m).
pub const RYDBERG_INF: f64 = 10_973_731.568_160;
/// Electron mass (kg).
pub const M_ELECTRON: f64 = 9.109_383_701_5e-31;
/// Atomic mass unit (kg).
pub const U_AMU: f64 = 1.660_539_066_60e-27;
/// Atomic mass of ⁸⁷Rb (u).
pub const M_RB87_U: f64 = 86.909_180_531;
/// Mass-corrected Rydberg constant for ⁸⁷Rb (1/m).
pub const RYDBERG_RB87: f64 = RYDBERG_INF / (1.0 + M_ELECTRON / (M_RB87_U * U_AMU));

/// Bundle of the constants a computation depends on.
///
/// A value type so that a "paper mode" (rounded α = 1/137) can be threaded
/// through table-reproduction runs without touching the CODATA defaults used
/// everywhere else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hbar: f64,
    pub mu0: f64,
    pub eps0: f64,
    pub kb: f64,
    pub a_bohr: f64,
    pub e_charge: f64,
    pub alpha_fs: f64,
    pub rydberg_rb: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values.
    pub const fn codata() -> Self {
        PhysicalConstants {
            c: C,
            hbar: HBAR,
            mu0: MU_0,
            eps0: EPS_0,
            kb: K_B,
            a_bohr: A_BOHR,
            e_charge: E_CHARGE,
            alpha_fs: ALPHA_FS,
            rydberg_rb: RYDBERG_RB87,
        }
    }

    /// CODATA values with the fine-structure constant rounded to 1/137.
    pub const fn paper_rounded() -> Self {
        let mut c = Self::codata();
        c.alpha_fs = ALPHA_FS_PAPER;
        c
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.c,
            self.hbar,
            self.mu0,
            self.eps0,
            self.kb,
            self.a_bohr,
            self.e_charge,
            self.alpha_fs,
            self.rydberg_rb,
        ];
        if fields.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Config(
                "physical constants must be strictly positive and finite".into(),
            ));
        }
        if (self.alpha_fs * 137.0 - 1.0).abs() > 1e-3 {
            return Err(Error::Config(format!(
                "fine-structure constant {} is not within 0.1% of 1/137",
                self.alpha_fs
            )));
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

/// Dipole matrix element from atomic units (e·a₀) to SI (C·m).
pub fn au_to_si_dipole(d_au: f64) -> f64 {
    d_au * E_CHARGE * A_BOHR
}

/// Dipole matrix element from SI (C·m) to atomic units (e·a₀).
pub fn si_to_au_dipole(d_si: f64) -> f64 {
    d_si / (E_CHARGE * A_BOHR)
}

/// Thermal wavelength λ_T = h·c/(k_B·T).
pub fn thermal_wavelength(temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "thermal wavelength requires T > 0, got {temperature} K"
        )));
    }
    Ok(H_PLANCK * C / (K_B * temperature))
}
