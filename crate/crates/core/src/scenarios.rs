//! End-to-end reproduction drivers: per-state force/atom-count tables,
//! minimal-distance logic, and the calibrated n⁴ scaling law, with published
//! reference values carried alongside the computed ones.

use rayon::prelude::*;

use crate::atomic::{build_transition_table, AtomicState};
use crate::constants;
use crate::cp::{potential_total, CPQuery, CPSettings};
use crate::error::{Error, Result};
use crate::graphene::GrapheneModel;
use crate::membrane::{force_for_amplitude, MembraneSpec};

/// Published per-state reference data: force (N) and atom count for a 1 nm
/// ripple at 200 nm and at the state's minimal distance, for T = 0 and 300 K.
#[derive(Debug, Clone, Copy)]
pub struct Table1Reference {
    pub n: u32,
    pub f_t0_200nm: f64,
    pub atoms_t0_200nm: u64,
    pub f_300k_200nm: f64,
    pub atoms_300k_200nm: u64,
    pub f_t0_zmin: f64,
    pub atoms_t0_zmin: u64,
    pub f_300k_zmin: f64,
    pub atoms_300k_zmin: u64,
}

pub const TABLE1_REFERENCE: [Table1Reference; 4] = [
    Table1Reference {
        n: 26,
        f_t0_200nm: 2.29e-16,
        atoms_t0_200nm: 70,
        f_300k_200nm: -1.89e-15,
        atoms_300k_200nm: 9,
        f_t0_zmin: 8.88e-15,
        atoms_t0_zmin: 2,
        f_300k_zmin: -7.36e-14,
        atoms_300k_zmin: 1,
    },
    Table1Reference {
        n: 29,
        f_t0_200nm: 3.72e-16,
        atoms_t0_200nm: 43,
        f_300k_200nm: -4.08e-15,
        atoms_300k_200nm: 4,
        f_t0_zmin: 6.04e-15,
        atoms_t0_zmin: 3,
        f_300k_zmin: -6.65e-14,
        atoms_300k_zmin: 1,
    },
    Table1Reference {
        n: 32,
        f_t0_200nm: 5.72e-16,
        atoms_t0_200nm: 28,
        f_300k_200nm: -8.15e-15,
        atoms_300k_200nm: 2,
        f_t0_zmin: 4.25e-15,
        atoms_t0_zmin: 4,
        f_300k_zmin: -6.05e-14,
        atoms_300k_zmin: 1,
    },
    Table1Reference {
        n: 34,
        f_t0_200nm: 7.47e-16,
        atoms_t0_200nm: 22,
        f_300k_200nm: -1.25e-14,
        atoms_300k_200nm: 2,
        f_t0_zmin: 3.41e-15,
        atoms_t0_zmin: 5,
        f_300k_zmin: -5.69e-14,
        atoms_300k_zmin: 1,
    },
];

/// Published minimal-distance rows: (n, z_min, N_min).
pub const TABLE2_REFERENCE: [(u32, f64, u64); 4] = [
    (23, 62e-9, 1),
    (30, 106e-9, 3),
    (36, 153e-9, 6),
    (43, 218e-9, 12),
];

/// Reference state and distance behind the calibrated scaling law.
#[derive(Debug, Clone, Copy)]
pub struct ScalingReference {
    pub n: u32,
    pub z: f64,
    pub force: f64,
}

/// The published 32S, 200 nm, T = 0 anchor.
pub const SCALING_REFERENCE_32S: ScalingReference = ScalingReference {
    n: 32,
    z: 200e-9,
    force: 5.72e-16,
};

/// Atom-count rounding convention. Ceiling enforces a strict lower bound;
/// nearest matches some published minimal-count rows. Reports carry both
/// when they differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Ceiling,
    Nearest,
}

impl Rounding {
    pub fn apply(&self, x: f64) -> u64 {
        match self {
            Rounding::Ceiling => x.ceil() as u64,
            Rounding::Nearest => x.round() as u64,
        }
    }
}

impl std::fmt::Display for Rounding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rounding::Ceiling => write!(f, "ceiling"),
            Rounding::Nearest => write!(f, "nearest"),
        }
    }
}

/// Closest approach of an nS Rydberg atom before its wavefunction overlaps
/// the surface: z_min(n) = √5·n²·a_B, with the bare principal quantum
/// number. (The classical-radius argument could equally be read with the
/// effective n*, which would put 30S at 75 nm instead of the published
/// 106 nm; the bare-n form matches the published distances.)
pub fn min_distance(n: u32) -> f64 {
    let n = n as f64;
    5.0f64.sqrt() * n * n * constants::A_BOHR
}

/// Raw (unrounded) atom count from the F ∝ n⁴/z⁴ scaling law anchored at
/// `reference`: N = F_req / [F_ref (n/n_ref)⁴ (z_ref/z_min(n))⁴].
pub fn scaling_law_atoms_raw(n: u32, f_required: f64, reference: &ScalingReference) -> Result<f64> {
    if !(reference.force > 0.0) {
        return Err(Error::Domain(format!(
            "scaling-law reference force must be positive, got {}",
            reference.force
        )));
    }
    if !(f_required > 0.0) {
        return Err(Error::Domain(format!(
            "required force must be positive, got {f_required}"
        )));
    }
    let n_ratio = n as f64 / reference.n as f64;
    let z_ratio = reference.z / min_distance(n);
    let f_per_atom = reference.force * n_ratio.powi(4) * z_ratio.powi(4);
    Ok(f_required / f_per_atom)
}

/// Rounded scaling-law atom count.
pub fn scaling_law_atoms(
    n: u32,
    f_required: f64,
    reference: &ScalingReference,
    rounding: Rounding,
) -> Result<u64> {
    Ok(rounding.apply(scaling_law_atoms_raw(n, f_required, reference)?))
}

/// Coefficient c in N_min(n) = c·n⁴ implied by the scaling law; with the
/// published 32S anchor and the 1 nm ripple force this is ≈ 3.6×10⁻⁶.
pub fn scaling_law_prefactor(f_required: f64, reference: &ScalingReference) -> Result<f64> {
    let n = reference.n;
    Ok(scaling_law_atoms_raw(n, f_required, reference)? / (n as f64).powi(4))
}

/// Provenance of a report row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Reference,
}

/// One table row: computed values plus any published reference values.
#[derive(Debug, Clone)]
pub struct ScenarioRow {
    pub state: String,
    pub distance: f64,
    pub temperature: f64,
    pub u_nonres: Option<f64>,
    pub u_res: Option<f64>,
    pub u_total: Option<f64>,
    pub force_computed: Option<f64>,
    pub force_reference: Option<f64>,
    pub atoms_computed: Option<u64>,
    /// Atom count under the non-default rounding, when it differs.
    pub atoms_computed_alt: Option<u64>,
    pub atoms_reference: Option<u64>,
    pub distance_reference: Option<f64>,
    pub warnings: Vec<String>,
}

impl ScenarioRow {
    fn empty(state: String, distance: f64, temperature: f64) -> Self {
        ScenarioRow {
            state,
            distance,
            temperature,
            u_nonres: None,
            u_res: None,
            u_total: None,
            force_computed: None,
            force_reference: None,
            atoms_computed: None,
            atoms_computed_alt: None,
            atoms_reference: None,
            distance_reference: None,
            warnings: Vec::new(),
        }
    }
}

/// Report metadata: conventions, tolerances, and a generation timestamp
/// (the timestamp goes to the diagnostic stream, never into data payloads).
#[derive(Debug, Clone)]
pub struct ReportMeta {
    pub rounding: Rounding,
    pub ripple_amplitude: f64,
    pub f_required: f64,
    pub force_tolerance_note: String,
    pub timestamp_unix: u64,
}

/// Rows plus metadata, ordered by state then distance.
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub rows: Vec<ScenarioRow>,
    pub meta: ReportMeta,
}

/// Settings shared by the table drivers.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub graphene: GrapheneModel,
    pub membrane: MembraneSpec,
    pub ripple_amplitude: f64,
    pub window: u32,
    pub rounding: Rounding,
    pub settings: CPSettings,
    /// Also run the full CP computation for minimal-distance rows.
    pub full_cp_table2: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            graphene: GrapheneModel::paper_rounded(),
            membrane: MembraneSpec::reference_cantilever(),
            ripple_amplitude: 1e-9,
            window: 5,
            rounding: Rounding::Ceiling,
            settings: CPSettings::default(),
            full_cp_table2: false,
        }
    }
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// One point of a distance sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub z: f64,
    pub result: crate::cp::CPResult,
}

/// Evaluate a distance grid in parallel; points come back in grid order.
pub fn run_sweep(
    table: &crate::atomic::TransitionTable,
    graphene: &GrapheneModel,
    distances: &[f64],
    temperature: f64,
    settings: CPSettings,
) -> Result<Vec<SweepPoint>> {
    distances
        .par_iter()
        .map(|&z| {
            let query = CPQuery::new(table, graphene, z, temperature)?.with_settings(settings);
            Ok(SweepPoint {
                z,
                result: potential_total(&query)?,
            })
        })
        .collect()
}

fn count_with_conventions(
    f_required: f64,
    f_per_atom: f64,
    rounding: Rounding,
) -> (Option<u64>, Option<u64>) {
    if f_per_atom == 0.0 {
        return (None, None);
    }
    let raw = f_required / f_per_atom.abs();
    let primary = rounding.apply(raw).max(1);
    let other = match rounding {
        Rounding::Ceiling => Rounding::Nearest,
        Rounding::Nearest => Rounding::Ceiling,
    }
    .apply(raw)
    .max(1);
    let alt = if other != primary { Some(other) } else { None };
    (Some(primary), alt)
}

/// Compute force and atom count for the published state set
/// {26S, 29S, 32S, 34S} × {0 K, 300 K} × {200 nm, z_min(n)}, with reference
/// values attached. Rows are computed in parallel and assembled in a fixed
/// order (state, then distance block, then temperature).
pub fn reproduce_table1(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let f_required = force_for_amplitude(&cfg.membrane, cfg.ripple_amplitude)?;

    struct Job {
        n: u32,
        z: f64,
        temperature: f64,
        f_ref: f64,
        atoms_ref: u64,
    }
    let mut jobs = Vec::new();
    for r in &TABLE1_REFERENCE {
        let zmin = min_distance(r.n);
        jobs.push(Job {
            n: r.n,
            z: 200e-9,
            temperature: 0.0,
            f_ref: r.f_t0_200nm,
            atoms_ref: r.atoms_t0_200nm,
        });
        jobs.push(Job {
            n: r.n,
            z: 200e-9,
            temperature: 300.0,
            f_ref: r.f_300k_200nm,
            atoms_ref: r.atoms_300k_200nm,
        });
        jobs.push(Job {
            n: r.n,
            z: zmin,
            temperature: 0.0,
            f_ref: r.f_t0_zmin,
            atoms_ref: r.atoms_t0_zmin,
        });
        jobs.push(Job {
            n: r.n,
            z: zmin,
            temperature: 300.0,
            f_ref: r.f_300k_zmin,
            atoms_ref: r.atoms_300k_zmin,
        });
    }

    let rows: Result<Vec<ScenarioRow>> = jobs
        .par_iter()
        .map(|job| {
            let state = AtomicState::rb87_ns(job.n)?;
            let table = build_transition_table(&state, cfg.window)?;
            let query = CPQuery::new(&table, &cfg.graphene, job.z, job.temperature)?
                .with_settings(cfg.settings);
            let result = potential_total(&query)?;
            let (atoms, atoms_alt) =
                count_with_conventions(f_required, result.f_total, cfg.rounding);
            let mut row = ScenarioRow::empty(state.label(), job.z, job.temperature);
            row.u_nonres = Some(result.u_nonres);
            row.u_res = Some(result.u_res);
            row.u_total = Some(result.u_total);
            row.force_computed = Some(result.f_total);
            row.force_reference = Some(job.f_ref);
            row.atoms_computed = atoms;
            row.atoms_computed_alt = atoms_alt;
            row.atoms_reference = Some(job.atoms_ref);
            row.warnings = result.diagnostics.warnings;
            Ok(row)
        })
        .collect();

    Ok(ScenarioReport {
        rows: rows?,
        meta: ReportMeta {
            rounding: cfg.rounding,
            ripple_amplitude: cfg.ripple_amplitude,
            f_required,
            force_tolerance_note: "computed Rydberg forces carry the transition-data systematic; \
                 reference agreement is order-of-magnitude (factor ~2 at T = 0)"
                .into(),
            timestamp_unix: now_unix(),
        },
    })
}

/// Minimal-distance rows {23S, 30S, 36S, 43S} at T = 0 via the scaling law,
/// optionally with the full CP force alongside.
pub fn reproduce_table2(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let f_required = force_for_amplitude(&cfg.membrane, cfg.ripple_amplitude)?;
    let reference = SCALING_REFERENCE_32S;

    let rows: Result<Vec<ScenarioRow>> = TABLE2_REFERENCE
        .par_iter()
        .map(|&(n, zmin_ref, n_ref)| {
            let state = AtomicState::rb87_ns(n)?;
            let zmin = min_distance(n);
            let raw = scaling_law_atoms_raw(n, f_required, &reference)?;
            let primary = cfg.rounding.apply(raw).max(1);
            let other = match cfg.rounding {
                Rounding::Ceiling => Rounding::Nearest,
                Rounding::Nearest => Rounding::Ceiling,
            }
            .apply(raw)
            .max(1);
            let mut row = ScenarioRow::empty(state.label(), zmin, 0.0);
            row.atoms_computed = Some(primary);
            row.atoms_computed_alt = if other != primary { Some(other) } else { None };
            row.atoms_reference = Some(n_ref);
            row.distance_reference = Some(zmin_ref);
            if cfg.full_cp_table2 {
                let table = build_transition_table(&state, cfg.window)?;
                let query =
                    CPQuery::new(&table, &cfg.graphene, zmin, 0.0)?.with_settings(cfg.settings);
                let result = potential_total(&query)?;
                row.u_nonres = Some(result.u_nonres);
                row.u_res = Some(result.u_res);
                row.u_total = Some(result.u_total);
                row.force_computed = Some(result.f_total);
                row.warnings = result.diagnostics.warnings;
            }
            Ok(row)
        })
        .collect();

    Ok(ScenarioReport {
        rows: rows?,
        meta: ReportMeta {
            rounding: cfg.rounding,
            ripple_amplitude: cfg.ripple_amplitude,
            f_required,
            force_tolerance_note: "scaling-law counts anchored at the published 32S force".into(),
            timestamp_unix: now_unix(),
        },
    })
}
