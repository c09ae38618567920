//! Command-line interface: Casimir-Polder potentials/forces, distance
//! sweeps, reference-table reproduction, membrane mechanics, and
//! atom-number budgets, emitted as deterministic CSV or JSON.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical non-convergence,
//! 1 other runtime failure. Warnings and the run timestamp go to stderr.

// validation guards are written `!(v > 0.0)` so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use graphene_cp::atomic::{
    build_transition_table, parse_state_label, AtomicState, TransitionTable,
};
use graphene_cp::cp::{potential_total, CPQuery, CPResult};
use graphene_cp::error::Error as CoreError;
use graphene_cp::membrane::{
    atoms_needed, force_for_amplitude, fundamental_frequency, spring_constant,
};
use graphene_cp::scenarios::{
    reproduce_table1, reproduce_table2, run_sweep, Rounding, ScenarioConfig, ScenarioReport,
};

use config::{resolve, DistanceSpec, OutputFormat, Overrides, RunConfig, UsageError};
use output::{DataRow, MembraneReport, Meta};

#[derive(Parser, Debug)]
#[command(
    name = "graphene-cp",
    version,
    about = "Casimir-Polder forces between rubidium atoms and a graphene sheet",
    max_term_width = 100
)]
struct Cli {
    /// Flat key = value configuration file; flags override file keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    opts: CommonOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonOpts {
    /// Atomic state, e.g. 5S1/2 or 32S1/2.
    #[arg(long, global = true)]
    state: Option<String>,

    /// Distance in meters, or start:stop:points:lin|log for sweeps.
    #[arg(long, global = true)]
    distance: Option<String>,

    /// Temperature in kelvin (0 selects the zero-temperature path).
    #[arg(long, global = true)]
    temperature: Option<f64>,

    /// Transition-table truncation window (partner n' within ±window).
    #[arg(long, global = true)]
    window: Option<u32>,

    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Fermi velocity ratio v_F/c.
    #[arg(long = "v-tilde", global = true)]
    v_tilde: Option<f64>,

    /// Fine-structure constant used in the reflection coefficients.
    #[arg(long = "alpha-fs", global = true)]
    alpha_fs: Option<f64>,

    /// Use rounded constants (alpha = 1/137) as in the reference tables;
    /// --paper-constants=false selects CODATA alpha.
    #[arg(long = "paper-constants", global = true, action = ArgAction::Set, num_args = 0..=1, default_missing_value = "true")]
    paper_constants: Option<bool>,

    /// Membrane Young's modulus (Pa).
    #[arg(long = "youngs-modulus", global = true)]
    youngs_modulus: Option<f64>,

    /// Membrane density (kg/m^3).
    #[arg(long, global = true)]
    density: Option<f64>,

    /// Membrane thickness (m).
    #[arg(long, global = true)]
    thickness: Option<f64>,

    /// Membrane width (m).
    #[arg(long, global = true)]
    width: Option<f64>,

    /// Membrane suspended length (m).
    #[arg(long, global = true)]
    length: Option<f64>,

    /// Membrane tension (N).
    #[arg(long, global = true)]
    tension: Option<f64>,

    /// Clamping coefficient (1.03 doubly clamped, 0.162 cantilever).
    #[arg(long, global = true)]
    clamping: Option<f64>,

    /// Ripple amplitude (m) for membrane force and atom counts.
    #[arg(long, global = true)]
    amplitude: Option<f64>,

    /// Outer quadrature relative tolerance (inner runs 10x tighter).
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,

    /// Maximum quadrature panel subdivisions.
    #[arg(long = "max-subdivisions", global = true)]
    max_subdivisions: Option<usize>,

    /// Atom-count rounding: ceiling or nearest.
    #[arg(long, global = true)]
    rounding: Option<String>,

    /// Run the full potential computation for minimal-distance table rows.
    #[arg(long = "full-cp", global = true, action = ArgAction::SetTrue)]
    full_cp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Potential decomposition and force at one (state, distance, T) point.
    Cp,
    /// Force at one (state, distance, T) point.
    Force,
    /// Potential and force over a distance grid.
    Sweep,
    /// Per-state force/atom-count table at 200 nm and minimal distances,
    /// with published reference values.
    Table1,
    /// Minimal-distance atom counts from the n^4 scaling law.
    Table2,
    /// Membrane resonance, stiffness, and ripple force.
    Membrane,
    /// Atoms required for the target ripple at one (state, distance, T).
    AtomsNeeded,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cp => "cp",
            Command::Force => "force",
            Command::Sweep => "sweep",
            Command::Table1 => "table1",
            Command::Table2 => "table2",
            Command::Membrane => "membrane",
            Command::AtomsNeeded => "atoms-needed",
        }
    }
}

fn overrides_from_opts(o: &CommonOpts) -> Overrides {
    Overrides {
        state: o.state.clone(),
        distance: o.distance.clone(),
        temperature: o.temperature,
        window: o.window,
        format: o.format.clone(),
        output: o.output.clone(),
        v_tilde: o.v_tilde,
        alpha_fs: o.alpha_fs,
        paper_constants: o.paper_constants,
        youngs_modulus: o.youngs_modulus,
        density: o.density,
        thickness: o.thickness,
        width: o.width,
        length: o.length,
        tension: o.tension,
        clamping: o.clamping,
        amplitude: o.amplitude,
        rel_tol: o.rel_tol,
        max_subdivisions: o.max_subdivisions,
        rounding: o.rounding.clone(),
        full_cp: if o.full_cp { Some(true) } else { None },
    }
}

enum RunError {
    Usage(String),
    NonConvergence(String),
    Other(String),
}

impl From<UsageError> for RunError {
    fn from(e: UsageError) -> Self {
        RunError::Usage(e.0)
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonConvergence(_) | CoreError::Numerical(_) => {
                RunError::NonConvergence(e.to_string())
            }
            CoreError::Domain(_)
            | CoreError::UnsupportedState(_)
            | CoreError::SelectionRule(_)
            | CoreError::UnsupportedModel(_)
            | CoreError::Config(_) => RunError::Usage(e.to_string()),
            other => RunError::Other(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(RunError::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn meta_for(cfg: &RunConfig, command: &str, f_required: Option<f64>, note: Option<String>) -> Meta {
    Meta {
        schema_version: 1,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        rounding: cfg.rounding.to_string(),
        ripple_amplitude_m: cfg.amplitude,
        f_required_n: f_required,
        outer_rel_tol: cfg.settings.outer_rel_tol,
        inner_rel_tol: cfg.settings.inner_rel_tol,
        note,
    }
}

fn require_state(cfg: &RunConfig) -> Result<AtomicState, RunError> {
    let label = cfg
        .state
        .as_deref()
        .ok_or_else(|| RunError::Usage("--state is required for this command".into()))?;
    let (n, l, j) = parse_state_label(label).map_err(RunError::from)?;
    AtomicState::new(n, l, j).map_err(RunError::from)
}

fn require_distances(cfg: &RunConfig, allow_range: bool) -> Result<Vec<f64>, RunError> {
    let spec = cfg
        .distance
        .ok_or_else(|| RunError::Usage("--distance is required for this command".into()))?;
    match (spec, allow_range) {
        (DistanceSpec::Range { .. }, false) => Err(RunError::Usage(
            "this command takes a single distance, not a range".into(),
        )),
        _ => Ok(spec.grid()),
    }
}

fn build_table(cfg: &RunConfig, state: &AtomicState) -> Result<TransitionTable, RunError> {
    build_transition_table(state, cfg.window).map_err(RunError::from)
}

fn cp_row(
    cfg: &RunConfig,
    state: &AtomicState,
    table: &TransitionTable,
    z: f64,
    f_required: f64,
    warnings: &mut Vec<String>,
) -> Result<DataRow, RunError> {
    let query = CPQuery::new(table, &cfg.graphene, z, cfg.temperature)?.with_settings(cfg.settings);
    let result: CPResult = potential_total(&query)?;
    warnings.extend(result.diagnostics.warnings.iter().cloned());
    let atoms = atoms_needed(f_required, result.f_total)
        .map(|(count, _)| count)
        .ok();
    Ok(DataRow {
        state: state.label(),
        distance_m: z,
        temperature_k: cfg.temperature,
        u_nonres_j: Some(result.u_nonres),
        u_res_j: Some(result.u_res),
        u_total_j: Some(result.u_total),
        force_n: Some(result.f_total),
        n_atoms: atoms,
        flag: "computed".to_string(),
    })
}

fn report_rows(report: &ScenarioReport) -> Vec<DataRow> {
    let mut rows = Vec::new();
    for r in &report.rows {
        if r.force_computed.is_some() || r.atoms_computed.is_some() {
            rows.push(DataRow {
                state: r.state.clone(),
                distance_m: r.distance,
                temperature_k: r.temperature,
                u_nonres_j: r.u_nonres,
                u_res_j: r.u_res,
                u_total_j: r.u_total,
                force_n: r.force_computed,
                n_atoms: r.atoms_computed,
                flag: "computed".to_string(),
            });
        }
        if let Some(alt) = r.atoms_computed_alt {
            let alt_name = match report.meta.rounding {
                Rounding::Ceiling => "computed_nearest",
                Rounding::Nearest => "computed_ceiling",
            };
            rows.push(DataRow {
                state: r.state.clone(),
                distance_m: r.distance,
                temperature_k: r.temperature,
                u_nonres_j: None,
                u_res_j: None,
                u_total_j: None,
                force_n: r.force_computed,
                n_atoms: Some(alt),
                flag: alt_name.to_string(),
            });
        }
        if r.force_reference.is_some() || r.atoms_reference.is_some() {
            rows.push(DataRow {
                state: r.state.clone(),
                distance_m: r.distance_reference.unwrap_or(r.distance),
                temperature_k: r.temperature,
                u_nonres_j: None,
                u_res_j: None,
                u_total_j: None,
                force_n: r.force_reference,
                n_atoms: r.atoms_reference,
                flag: "reference".to_string(),
            });
        }
    }
    rows
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), RunError> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| RunError::Other(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_diagnostics(command: &str, warnings: &[String]) {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    eprintln!("# graphene-cp {command}: generated at unix {stamp}");
    let mut seen: Vec<&String> = Vec::new();
    for w in warnings {
        if !seen.contains(&w) {
            eprintln!("warning: {w}");
            seen.push(w);
        }
    }
}

fn scenario_config(cfg: &RunConfig) -> ScenarioConfig {
    ScenarioConfig {
        graphene: cfg.graphene,
        membrane: cfg.membrane,
        ripple_amplitude: cfg.amplitude,
        window: cfg.window,
        rounding: cfg.rounding,
        settings: cfg.settings,
        full_cp_table2: cfg.full_cp,
    }
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let cfg = resolve(overrides_from_opts(&cli.opts), cli.config.as_deref())?;
    let command = cli.command.name();
    let f_required = force_for_amplitude(&cfg.membrane, cfg.amplitude)?;
    let mut warnings: Vec<String> = Vec::new();

    let text = match cli.command {
        Command::Cp | Command::Force | Command::AtomsNeeded => {
            let state = require_state(&cfg)?;
            let z = require_distances(&cfg, false)?[0];
            let table = build_table(&cfg, &state)?;
            let row = cp_row(&cfg, &state, &table, z, f_required, &mut warnings)?;
            let meta = meta_for(&cfg, command, Some(f_required), None);
            output::render(&meta, &[row], cfg.format)
        }
        Command::Sweep => {
            let state = require_state(&cfg)?;
            let grid = require_distances(&cfg, true)?;
            let table = build_table(&cfg, &state)?;
            let points = run_sweep(&table, &cfg.graphene, &grid, cfg.temperature, cfg.settings)?;
            let rows: Vec<DataRow> = points
                .into_iter()
                .map(|p| {
                    warnings.extend(p.result.diagnostics.warnings.iter().cloned());
                    let atoms = atoms_needed(f_required, p.result.f_total)
                        .map(|(count, _)| count)
                        .ok();
                    DataRow {
                        state: state.label(),
                        distance_m: p.z,
                        temperature_k: cfg.temperature,
                        u_nonres_j: Some(p.result.u_nonres),
                        u_res_j: Some(p.result.u_res),
                        u_total_j: Some(p.result.u_total),
                        force_n: Some(p.result.f_total),
                        n_atoms: atoms,
                        flag: "computed".to_string(),
                    }
                })
                .collect();
            let meta = meta_for(&cfg, command, Some(f_required), None);
            output::render(&meta, &rows, cfg.format)
        }
        Command::Table1 => {
            let report = reproduce_table1(&scenario_config(&cfg))?;
            for r in &report.rows {
                warnings.extend(r.warnings.iter().cloned());
            }
            let meta = meta_for(
                &cfg,
                command,
                Some(report.meta.f_required),
                Some(report.meta.force_tolerance_note.clone()),
            );
            output::render(&meta, &report_rows(&report), cfg.format)
        }
        Command::Table2 => {
            let report = reproduce_table2(&scenario_config(&cfg))?;
            for r in &report.rows {
                warnings.extend(r.warnings.iter().cloned());
            }
            let meta = meta_for(
                &cfg,
                command,
                Some(report.meta.f_required),
                Some(report.meta.force_tolerance_note.clone()),
            );
            output::render(&meta, &report_rows(&report), cfg.format)
        }
        Command::Membrane => {
            let rep = MembraneReport {
                f0_hz: fundamental_frequency(&cfg.membrane),
                kappa_eff_n_per_m: spring_constant(&cfg.membrane),
                amplitude_m: cfg.amplitude,
                force_for_amplitude_n: f_required,
            };
            let meta = meta_for(&cfg, command, Some(f_required), None);
            match cfg.format {
                OutputFormat::Csv => output::membrane_to_csv(&meta, &rep),
                OutputFormat::Json => output::membrane_to_json(&meta, &rep),
            }
        }
    };

    emit(&cfg, &text)?;
    emit_diagnostics(command, &warnings);
    Ok(())
}
