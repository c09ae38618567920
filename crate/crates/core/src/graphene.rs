//! Reflection coefficients of a free-standing graphene sheet in the
//! (2+1)-dimensional Dirac quasiparticle model, on the imaginary-frequency
//! axis and on the analytically continued evanescent branch.
//!
//! Imaginary axis (ξ ≥ 0, k₀ = ξ/c):
//!
//!   R_TM =  4πα √(k₀² + k∥²) / [4πα √(k₀² + k∥²) + 8 √(k₀² + ṽ²k∥²)]
//!   R_TE = −4πα √(k₀² + ṽ²k∥²) / [4πα √(k₀² + ṽ²k∥²) + 8 √(k₀² + k∥²)]
//!
//! Evanescent branch: k₀² → −ω²/c², parametrized by the decay constant κ of
//! the resonant integral through k∥² = κ² + ω²/c². The first root becomes κ
//! exactly; the second root √(ṽ²κ² − (1−ṽ²)ω²/c²) turns imaginary below
//! κc/ω = √(1−ṽ²)/ṽ, where the coefficients are evaluated on the principal
//! branch and their real part is returned. (The source model prints the
//! evanescent decay constant with a plus sign under its root; since κ itself
//! is the integration variable here, that sign choice never enters.)
//!
//! The linear Dirac dispersion underlying these coefficients holds below
//! about 2 eV; see [`GrapheneModel::DISPERSION_VALIDITY_EV`]. Callers that
//! integrate past that scale attach a diagnostic warning; the pure
//! coefficient functions stay side-effect free.

use crate::constants;
use crate::error::{Error, Result};

/// Dirac-model parameters of a free-standing graphene sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrapheneModel {
    /// Fermi velocity ratio ṽ = v_F/c.
    pub v_tilde: f64,
    /// Fine-structure constant used in the coefficients.
    pub alpha_fs: f64,
    /// Quasiparticle mass gap (eV). Only 0 is supported.
    pub mass_gap_ev: f64,
    /// Chemical potential (eV). Only 0 is supported.
    pub chem_potential_ev: f64,
}

impl GrapheneModel {
    /// Energy above which the linear-dispersion model is no longer valid (eV).
    pub const DISPERSION_VALIDITY_EV: f64 = 2.0;

    pub fn new(
        v_tilde: f64,
        alpha_fs: f64,
        mass_gap_ev: f64,
        chem_potential_ev: f64,
    ) -> Result<Self> {
        if !(v_tilde > 0.0 && v_tilde < 1.0) {
            return Err(Error::Config(format!(
                "Fermi velocity ratio must be in (0, 1), got {v_tilde}"
            )));
        }
        if !(alpha_fs > 0.0 && alpha_fs.is_finite()) {
            return Err(Error::Config(format!(
                "fine-structure constant must be positive, got {alpha_fs}"
            )));
        }
        if mass_gap_ev != 0.0 || chem_potential_ev != 0.0 {
            // perfect Dirac cone only; the m, μ ~ 0.01 eV correction is < 1%
            return Err(Error::UnsupportedModel(format!(
                "nonzero mass gap ({mass_gap_ev} eV) or chemical potential \
                 ({chem_potential_ev} eV) is not supported; only the perfect \
                 Dirac cone m = mu = 0 is implemented"
            )));
        }
        Ok(GrapheneModel {
            v_tilde,
            alpha_fs,
            mass_gap_ev,
            chem_potential_ev,
        })
    }

    /// CODATA fine-structure constant, ṽ = 1/300.
    pub fn codata() -> Self {
        GrapheneModel::new(1.0 / 300.0, constants::ALPHA_FS, 0.0, 0.0).unwrap()
    }

    /// Rounded constants α = 1/137, ṽ = 1/300 for table reproduction.
    pub fn paper_rounded() -> Self {
        GrapheneModel::new(1.0 / 300.0, constants::ALPHA_FS_PAPER, 0.0, 0.0).unwrap()
    }

    /// True when an angular frequency (rad/s) lies beyond the validity of the
    /// linear dispersion.
    pub fn exceeds_dispersion_validity(&self, omega: f64) -> bool {
        constants::HBAR * omega.abs() > Self::DISPERSION_VALIDITY_EV * constants::E_CHARGE
    }

    /// Near-field (k∥ ≫ k₀/ṽ) limit of R_TM: πα/(πα + 2ṽ).
    pub fn r_tm_near_field_limit(&self) -> f64 {
        let pa = std::f64::consts::PI * self.alpha_fs;
        pa / (pa + 2.0 * self.v_tilde)
    }

    /// Near-field limit of R_TE: −παṽ/(παṽ + 2).
    pub fn r_te_near_field_limit(&self) -> f64 {
        let pav = std::f64::consts::PI * self.alpha_fs * self.v_tilde;
        -pav / (pav + 2.0)
    }

    fn check_imag_args(&self, xi: f64, k_par: f64) -> Result<()> {
        if xi < 0.0 || k_par < 0.0 {
            return Err(Error::Domain(format!(
                "imaginary-axis reflection needs xi >= 0 and k_par >= 0, got ({xi}, {k_par})"
            )));
        }
        if xi == 0.0 && k_par == 0.0 {
            return Err(Error::Domain(
                "reflection coefficient indeterminate at xi = k_par = 0".into(),
            ));
        }
        Ok(())
    }

    /// TM reflection coefficient at imaginary frequency iξ.
    pub fn r_tm_imag(&self, xi: f64, k_par: f64) -> Result<f64> {
        self.check_imag_args(xi, k_par)?;
        let k0sq = (xi / constants::C) * (xi / constants::C);
        let root_full = (k0sq + k_par * k_par).sqrt();
        let root_fermi = (k0sq + self.v_tilde * self.v_tilde * k_par * k_par).sqrt();
        let num = 4.0 * std::f64::consts::PI * self.alpha_fs * root_full;
        Ok(num / (num + 8.0 * root_fermi))
    }

    /// TE reflection coefficient at imaginary frequency iξ.
    pub fn r_te_imag(&self, xi: f64, k_par: f64) -> Result<f64> {
        self.check_imag_args(xi, k_par)?;
        let k0sq = (xi / constants::C) * (xi / constants::C);
        let root_full = (k0sq + k_par * k_par).sqrt();
        let root_fermi = (k0sq + self.v_tilde * self.v_tilde * k_par * k_par).sqrt();
        let num = 4.0 * std::f64::consts::PI * self.alpha_fs * root_fermi;
        Ok(-num / (num + 8.0 * root_full))
    }

    fn check_evanescent_args(&self, omega: f64, kappa: f64) -> Result<()> {
        if !(omega > 0.0) || !(kappa > 0.0) {
            return Err(Error::Domain(format!(
                "evanescent branch needs omega > 0 and kappa > 0, got ({omega}, {kappa})"
            )));
        }
        Ok(())
    }

    /// Re R_TM at real frequency ω on the evanescent branch with decay
    /// constant κ.
    pub fn r_tm_evanescent(&self, omega: f64, kappa: f64) -> Result<f64> {
        self.check_evanescent_args(omega, kappa)?;
        let w_over_c = omega / constants::C;
        let arg = self.v_tilde * self.v_tilde * kappa * kappa
            - (1.0 - self.v_tilde * self.v_tilde) * w_over_c * w_over_c;
        let a = 4.0 * std::f64::consts::PI * self.alpha_fs * kappa;
        if arg >= 0.0 {
            let t = arg.sqrt();
            Ok(a / (a + 8.0 * t))
        } else {
            // root is i·s on the principal branch: Re[a/(a + 8is)]
            let s = (-arg).sqrt();
            Ok(a * a / (a * a + 64.0 * s * s))
        }
    }

    /// Re R_TE at real frequency ω on the evanescent branch.
    pub fn r_te_evanescent(&self, omega: f64, kappa: f64) -> Result<f64> {
        self.check_evanescent_args(omega, kappa)?;
        let w_over_c = omega / constants::C;
        let arg = self.v_tilde * self.v_tilde * kappa * kappa
            - (1.0 - self.v_tilde * self.v_tilde) * w_over_c * w_over_c;
        let four_pi_alpha = 4.0 * std::f64::consts::PI * self.alpha_fs;
        if arg >= 0.0 {
            let t = arg.sqrt();
            let num = four_pi_alpha * t;
            Ok(-num / (num + 8.0 * kappa))
        } else {
            // Re[-i u/(8κ + i u)] with u = 4πα s
            let s = (-arg).sqrt();
            let u = four_pi_alpha * s;
            Ok(-u * u / (64.0 * kappa * kappa + u * u))
        }
    }
}

impl Default for GrapheneModel {
    fn default() -> Self {
        GrapheneModel::codata()
    }
}
