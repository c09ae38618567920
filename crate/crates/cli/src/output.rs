//! Deterministic CSV and JSON emission.
//!
//! Data rows share one fixed schema:
//! `state,distance_m,temperature_K,u_nonres_J,u_res_J,u_total_J,force_N,n_atoms,flag`
//! with floats printed as C-style `%.6e`. Identical run configurations
//! produce byte-identical files; timestamps and warnings belong to the
//! diagnostic stream, never to data files.

use serde::Serialize;

use crate::config::OutputFormat;

pub const CSV_HEADER: &str =
    "state,distance_m,temperature_K,u_nonres_J,u_res_J,u_total_J,force_N,n_atoms,flag";

/// One output row; `None` fields print empty (CSV) or null (JSON).
#[derive(Debug, Clone, Serialize)]
pub struct DataRow {
    pub state: String,
    pub distance_m: f64,
    pub temperature_k: f64,
    pub u_nonres_j: Option<f64>,
    pub u_res_j: Option<f64>,
    pub u_total_j: Option<f64>,
    pub force_n: Option<f64>,
    pub n_atoms: Option<u64>,
    pub flag: String,
}

/// Meta block: versions, conventions, tolerances. No timestamps.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub rounding: String,
    pub ripple_amplitude_m: f64,
    pub f_required_n: Option<f64>,
    pub outer_rel_tol: f64,
    pub inner_rel_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport<'a> {
    pub meta: &'a Meta,
    pub rows: &'a [DataRow],
}

/// C-style `%.6e`: six fractional digits, two-or-more exponent digits.
pub fn fmt_e(x: f64) -> String {
    let s = format!("{x:.6e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.as_bytes()[0] {
                b'-' => ("-", &exp[1..]),
                _ => ("+", exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

fn csv_field(v: Option<f64>) -> String {
    v.map(fmt_e).unwrap_or_default()
}

pub fn rows_to_csv(meta: &Meta, rows: &[DataRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# schema_version: {}\n", meta.schema_version));
    out.push_str(&format!("# tool_version: {}\n", meta.tool_version));
    out.push_str(&format!("# command: {}\n", meta.command));
    out.push_str(&format!("# rounding: {}\n", meta.rounding));
    out.push_str(&format!(
        "# ripple_amplitude_m: {}\n",
        fmt_e(meta.ripple_amplitude_m)
    ));
    if let Some(f) = meta.f_required_n {
        out.push_str(&format!("# f_required_n: {}\n", fmt_e(f)));
    }
    out.push_str(&format!(
        "# quadrature_rel_tol: outer {} inner {}\n",
        fmt_e(meta.outer_rel_tol),
        fmt_e(meta.inner_rel_tol)
    ));
    if let Some(note) = &meta.note {
        out.push_str(&format!("# note: {note}\n"));
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.state,
            fmt_e(r.distance_m),
            fmt_e(r.temperature_k),
            csv_field(r.u_nonres_j),
            csv_field(r.u_res_j),
            csv_field(r.u_total_j),
            csv_field(r.force_n),
            r.n_atoms.map(|n| n.to_string()).unwrap_or_default(),
            r.flag
        ));
    }
    out
}

pub fn rows_to_json(meta: &Meta, rows: &[DataRow]) -> String {
    let mut s = serde_json::to_string_pretty(&JsonReport { meta, rows })
        .expect("report serialization cannot fail");
    s.push('\n');
    s
}

pub fn render(meta: &Meta, rows: &[DataRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => rows_to_csv(meta, rows),
        OutputFormat::Json => rows_to_json(meta, rows),
    }
}

/// Key-value report for the membrane command.
#[derive(Debug, Clone, Serialize)]
pub struct MembraneReport {
    pub f0_hz: f64,
    pub kappa_eff_n_per_m: f64,
    pub amplitude_m: f64,
    pub force_for_amplitude_n: f64,
}

pub fn membrane_to_csv(meta: &Meta, rep: &MembraneReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# schema_version: {}\n", meta.schema_version));
    out.push_str(&format!("# tool_version: {}\n", meta.tool_version));
    out.push_str(&format!("# command: {}\n", meta.command));
    out.push_str("quantity,value\n");
    out.push_str(&format!("f0_Hz,{}\n", fmt_e(rep.f0_hz)));
    out.push_str(&format!(
        "kappa_eff_N_per_m,{}\n",
        fmt_e(rep.kappa_eff_n_per_m)
    ));
    out.push_str(&format!("amplitude_m,{}\n", fmt_e(rep.amplitude_m)));
    out.push_str(&format!(
        "force_for_amplitude_N,{}\n",
        fmt_e(rep.force_for_amplitude_n)
    ));
    out
}

#[derive(Debug, Clone, Serialize)]
struct MembraneJson<'a> {
    meta: &'a Meta,
    membrane: &'a MembraneReport,
}

pub fn membrane_to_json(meta: &Meta, rep: &MembraneReport) -> String {
    let mut s = serde_json::to_string_pretty(&MembraneJson {
        meta,
        membrane: rep,
    })
    .expect("report serialization cannot fail");
    s.push('\n');
    s
}
