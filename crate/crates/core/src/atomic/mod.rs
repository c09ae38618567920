//! Rubidium atomic structure: quantum-defect energies, dipole matrix
//! elements, transition tables, and the dynamic polarizability at imaginary
//! frequency.
//!
//! Interfaces are SI throughout; atomic units appear only inside the radial
//! integration and in the line-data file.
//!
//! The Coulomb approximation (wavefunctions from n* alone) is used for
//! Rydberg-Rydberg dipoles; it is accurate to a few percent for the
//! near-diagonal matrix elements that dominate here and is the leading
//! systematic when comparing absolute Rydberg forces against published
//! values. Ground-state (5S) transition data comes from the shipped line
//! file instead, where the Coulomb approximation would be invalid.

pub mod linedata;
mod numerov;

use std::sync::OnceLock;

use crate::constants::{self};
use crate::error::{Error, Result};
use linedata::{DefectRecord, LineRecord};

/// Supported atomic species.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    Rb87,
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Species::Rb87 => write!(f, "87Rb"),
        }
    }
}

const SERIES_LETTERS: [char; 4] = ['S', 'P', 'D', 'F'];

fn defect_table() -> &'static [DefectRecord] {
    static TABLE: OnceLock<Vec<DefectRecord>> = OnceLock::new();
    TABLE.get_or_init(|| {
        linedata::parse_defect_data(linedata::EMBEDDED_DEFECT_DATA, "embedded defect table")
            .expect("embedded defect table is well-formed")
    })
}

/// Rydberg-Ritz quantum defect δ = δ₀ + δ₂/(n − δ₀)² for the (l, j) series.
pub fn quantum_defect(l: u32, j: f64, n: u32) -> Result<f64> {
    let j2 = double_j(j)?;
    let rec = defect_table()
        .iter()
        .find(|d| d.l == l && d.j2 == j2)
        .ok_or_else(|| {
            Error::UnsupportedState(format!(
                "no quantum-defect data for series l = {l}, j = {j} (shipped: S, P, D)"
            ))
        })?;
    let dn = n as f64 - rec.delta0;
    Ok(rec.delta0 + rec.delta2 / (dn * dn))
}

fn double_j(j: f64) -> Result<u32> {
    let j2 = 2.0 * j;
    if j2 < 0.0 || (j2 - j2.round()).abs() > 1e-9 {
        return Err(Error::Domain(format!("j = {j} is not a half-integer")));
    }
    Ok(j2.round() as u32)
}

/// One bound state of ⁸⁷Rb with its quantum-defect energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicState {
    pub species: Species,
    pub n: u32,
    pub l: u32,
    /// Total angular momentum (half-integer).
    pub j: f64,
    /// Binding energy −h·c·Ry_Rb/(n*)² (J, negative). For low-lying states
    /// this is a 1-2% approximation; measured line data supplies exact
    /// transition frequencies where it matters.
    pub energy: f64,
}

impl AtomicState {
    pub fn new(n: u32, l: u32, j: f64) -> Result<Self> {
        if n < 5 {
            return Err(Error::UnsupportedState(format!(
                "principal quantum number must be >= 5, got {n}"
            )));
        }
        if l >= n {
            return Err(Error::UnsupportedState(format!(
                "l = {l} must be < n = {n}"
            )));
        }
        let j2 = double_j(j)?;
        let allowed = if l == 0 {
            j2 == 1
        } else {
            j2 == 2 * l - 1 || j2 == 2 * l + 1
        };
        if !allowed {
            return Err(Error::UnsupportedState(format!(
                "j = {j} is not |l ± 1/2| for l = {l}"
            )));
        }
        let n_star = n as f64 - quantum_defect(l, j, n)?;
        if !(n_star > 0.0) {
            return Err(Error::UnsupportedState(format!(
                "effective quantum number n* = {n_star} must be positive"
            )));
        }
        let energy =
            -constants::H_PLANCK * constants::C * constants::RYDBERG_RB87 / (n_star * n_star);
        Ok(AtomicState {
            species: Species::Rb87,
            n,
            l,
            j,
            energy,
        })
    }

    /// nS₁/₂ shortcut.
    pub fn rb87_ns(n: u32) -> Result<Self> {
        AtomicState::new(n, 0, 0.5)
    }

    pub fn effective_n(&self) -> f64 {
        self.n as f64 - quantum_defect(self.l, self.j, self.n).expect("state was validated")
    }

    /// Spectroscopic label such as "32S1/2".
    pub fn label(&self) -> String {
        let letter = SERIES_LETTERS.get(self.l as usize).copied().unwrap_or('?');
        format!(
            "{}{}{}/2",
            self.n,
            letter,
            double_j(self.j).expect("validated")
        )
    }

    pub fn multiplicity(&self) -> f64 {
        2.0 * self.j + 1.0
    }
}

/// Parse a label like "32S1/2" into (n, l, j).
pub fn parse_state_label(s: &str) -> Result<(u32, u32, f64)> {
    let s = s.trim();
    let digits_end = s
        .find(|c: char| !c.is_ascii_digit())
        .ok_or_else(|| Error::UnsupportedState(format!("bad state label {s:?}")))?;
    if digits_end == 0 {
        return Err(Error::UnsupportedState(format!("bad state label {s:?}")));
    }
    let n: u32 = s[..digits_end]
        .parse()
        .map_err(|_| Error::UnsupportedState(format!("bad principal number in {s:?}")))?;
    let rest = &s[digits_end..];
    let letter = rest
        .chars()
        .next()
        .ok_or_else(|| Error::UnsupportedState(format!("missing series letter in {s:?}")))?;
    let l = SERIES_LETTERS
        .iter()
        .position(|&c| c == letter.to_ascii_uppercase())
        .ok_or_else(|| Error::UnsupportedState(format!("unknown series {letter:?} in {s:?}")))?
        as u32;
    let jtxt = &rest[letter.len_utf8()..];
    let j2 = linedata::parse_half_integer_doubled(jtxt)
        .ok_or_else(|| Error::UnsupportedState(format!("bad j in state label {s:?}")))?;
    Ok((n, l, j2 as f64 / 2.0))
}

/// A dipole-allowed transition with positive frequency and the reduced
/// matrix element ⟨n‖d‖k⟩ in C·m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub lower: AtomicState,
    pub upper: AtomicState,
    /// Angular frequency (E_upper − E_lower)/ħ (rad/s, > 0). Data-file
    /// transitions use the measured wavelength instead of defect energies.
    pub omega: f64,
    /// Reduced dipole matrix element (C·m, ≥ 0).
    pub reduced_dipole: f64,
}

impl Transition {
    pub fn new(lower: AtomicState, upper: AtomicState, reduced_dipole: f64) -> Result<Self> {
        let omega = (upper.energy - lower.energy) / constants::HBAR;
        Self::with_frequency(lower, upper, omega, reduced_dipole)
    }

    pub fn with_frequency(
        lower: AtomicState,
        upper: AtomicState,
        omega: f64,
        reduced_dipole: f64,
    ) -> Result<Self> {
        check_selection_rules(&lower, &upper)?;
        if !(omega > 0.0) {
            return Err(Error::Domain(format!(
                "transition frequency must be positive, got {omega} rad/s for {} -> {}",
                lower.label(),
                upper.label()
            )));
        }
        if !(reduced_dipole >= 0.0) {
            return Err(Error::Domain("reduced dipole must be >= 0".into()));
        }
        Ok(Transition {
            lower,
            upper,
            omega,
            reduced_dipole,
        })
    }
}

fn check_selection_rules(a: &AtomicState, b: &AtomicState) -> Result<()> {
    let dl = a.l.abs_diff(b.l);
    if dl != 1 {
        return Err(Error::SelectionRule(format!(
            "|Δl| must be 1, got {dl} for {} -> {}",
            a.label(),
            b.label()
        )));
    }
    if (a.j - b.j).abs() > 1.0 + 1e-12 {
        return Err(Error::SelectionRule(format!(
            "|Δj| must be <= 1, got {} for {} -> {}",
            (a.j - b.j).abs(),
            a.label(),
            b.label()
        )));
    }
    Ok(())
}

/// All dipole partners of a center state.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    center: AtomicState,
    transitions: Vec<Transition>,
    truncation_window: u32,
}

impl TransitionTable {
    pub fn new(
        center: AtomicState,
        transitions: Vec<Transition>,
        truncation_window: u32,
    ) -> Result<Self> {
        if transitions.is_empty() {
            return Err(Error::Config(format!(
                "empty transition table for {}",
                center.label()
            )));
        }
        let mut partners: Vec<String> = Vec::with_capacity(transitions.len());
        for t in &transitions {
            let partner = if t.lower == center {
                &t.upper
            } else if t.upper == center {
                &t.lower
            } else {
                return Err(Error::Config(format!(
                    "transition {} -> {} does not involve center {}",
                    t.lower.label(),
                    t.upper.label(),
                    center.label()
                )));
            };
            let label = partner.label();
            if partners.contains(&label) {
                return Err(Error::Config(format!("duplicate partner state {label}")));
            }
            partners.push(label);
        }
        Ok(TransitionTable {
            center,
            transitions,
            truncation_window,
        })
    }

    pub fn center(&self) -> &AtomicState {
        &self.center
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn truncation_window(&self) -> u32 {
        self.truncation_window
    }

    /// (ω_kn, |⟨n‖d‖k⟩|²) for every partner k, with ω_kn = (E_k − E_n)/ħ
    /// signed relative to the center state n: positive for upward partners,
    /// negative for downward ones.
    pub fn signed_terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.transitions.iter().map(move |t| {
            let d2 = t.reduced_dipole * t.reduced_dipole;
            if t.lower == self.center {
                (t.omega, d2)
            } else {
                (-t.omega, d2)
            }
        })
    }

    /// |ω| of the transition with the largest dipole; sets integration scales.
    pub fn dominant_frequency(&self) -> f64 {
        self.transitions
            .iter()
            .max_by(|a, b| a.reduced_dipole.total_cmp(&b.reduced_dipole))
            .map(|t| t.omega)
            .expect("table is never empty")
    }

    pub fn has_downward_transitions(&self) -> bool {
        self.signed_terms().any(|(w, _)| w < 0.0)
    }
}

/// |⟨l_n j_n‖d‖l_k j_k⟩|² / (e·R)² for the supported alkali series, with the
/// center state on the n side.
fn angular_weight_sq(center: &AtomicState, partner: &AtomicState) -> Result<f64> {
    let key = (
        center.l,
        double_j(center.j)?,
        partner.l,
        double_j(partner.j)?,
    );
    match key {
        // S1/2 -> P1/2 and S1/2 -> P3/2
        (0, 1, 1, 1) => Ok(2.0 / 3.0),
        (0, 1, 1, 3) => Ok(4.0 / 3.0),
        _ => Err(Error::UnsupportedState(format!(
            "no angular reduction factor for {} -> {}; only nS1/2 center \
             states are supported",
            center.label(),
            partner.label()
        ))),
    }
}

/// Radial dipole matrix element ∫R_a r R_b r² dr in units of a₀ (Coulomb
/// approximation). Both states must be Rydberg (n ≥ 10) and dipole-coupled.
pub fn radial_matrix_element(a: &AtomicState, b: &AtomicState) -> Result<f64> {
    check_selection_rules(a, b)?;
    if a.n < 10 || b.n < 10 {
        return Err(Error::UnsupportedState(format!(
            "Coulomb-approximation radial integrals need n >= 10 on both \
             sides, got {} and {}; low-lying pairs come from the line-data \
             file",
            a.label(),
            b.label()
        )));
    }
    numerov::radial_integral_nstar(a.effective_n(), a.l, b.effective_n(), b.l)
}

/// Build the transition table for a center state using the embedded line
/// data (or the `GRAPHENE_CP_DATA` override) for the ground state.
pub fn build_transition_table(center: &AtomicState, window: u32) -> Result<TransitionTable> {
    let lines = linedata::load_line_data()?;
    build_transition_table_with_lines(center, window, &lines)
}

/// Build the transition table for a center state.
///
/// 5S₁/₂ tables come entirely from `lines`; Rydberg nS₁/₂ tables couple to
/// n′P₁/₂ and n′P₃/₂ with n′ ∈ [n − window, n + window], radial integrals
/// from the Coulomb approximation.
pub fn build_transition_table_with_lines(
    center: &AtomicState,
    window: u32,
    lines: &[LineRecord],
) -> Result<TransitionTable> {
    if center.l != 0 || double_j(center.j)? != 1 {
        return Err(Error::UnsupportedState(format!(
            "only nS1/2 center states are supported, got {}",
            center.label()
        )));
    }
    if window == 0 {
        return Err(Error::Config(
            "truncation window must be >= 1 (window = 0 makes an empty table)".into(),
        ));
    }

    if center.n == 5 {
        let label = center.label();
        let mut transitions = Vec::new();
        for rec in lines.iter().filter(|r| r.lower == label) {
            let (n_u, l_u, j_u) = parse_state_label(&rec.upper)?;
            let upper = AtomicState::new(n_u, l_u, j_u)?;
            let omega = 2.0 * std::f64::consts::PI * constants::C / (rec.wavelength_nm * 1e-9);
            let d_si = constants::au_to_si_dipole(rec.reduced_dipole_au);
            transitions.push(Transition::with_frequency(*center, upper, omega, d_si)?);
        }
        return TransitionTable::new(*center, transitions, window);
    }

    if center.n < 10 {
        return Err(Error::UnsupportedState(format!(
            "{} is neither 5S1/2 nor a Rydberg state (n >= 10)",
            center.label()
        )));
    }

    let mut transitions = Vec::new();
    let n_lo = center.n - window;
    let n_hi = center.n + window;
    for n_p in n_lo..=n_hi {
        for j2 in [1u32, 3u32] {
            let partner = AtomicState::new(n_p, 1, j2 as f64 / 2.0)?;
            let radial_a0 = radial_matrix_element(center, &partner)?;
            let weight = angular_weight_sq(center, &partner)?;
            let d_si = weight.sqrt() * constants::au_to_si_dipole(radial_a0);
            let (lower, upper) = if partner.energy > center.energy {
                (*center, partner)
            } else {
                (partner, *center)
            };
            transitions.push(Transition::new(lower, upper, d_si)?);
        }
    }
    TransitionTable::new(*center, transitions, window)
}

/// Isotropically averaged scalar polarizability α(iξ) in C·m²/V:
///
///   α(iξ) = 2/(3ħ(2j_n+1)) · Σ_k ω_kn |⟨n‖d‖k⟩|² / (ω_kn² + ξ²)
///
/// Downward partners enter with negative ω_kn, so excited-state α(iξ) can be
/// negative at low ξ. Requires ξ ≥ 0.
pub fn polarizability_imag_freq(table: &TransitionTable, xi: f64) -> f64 {
    debug_assert!(xi >= 0.0, "polarizability defined for xi >= 0");
    let mut acc = 0.0;
    for (omega_kn, d2) in table.signed_terms() {
        acc += omega_kn * d2 / (omega_kn * omega_kn + xi * xi);
    }
    2.0 * acc / (3.0 * constants::HBAR * table.center.multiplicity())
}
