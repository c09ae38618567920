//! Parsers for the shipped atomic data files: principal-line data
//! (wavelengths and reduced dipoles) and Rydberg-Ritz quantum defects.
//!
//! Both formats are whitespace-separated columns with `#` comment lines.
//! Malformed rows are hard errors carrying the offending line number.
//!
//! The line-data path can be overridden with the `GRAPHENE_CP_DATA`
//! environment variable; the defect table always ships embedded.

use std::env;
use std::fs;

use crate::error::{Error, Result};

/// Default line data compiled into the library.
pub const EMBEDDED_LINE_DATA: &str = include_str!("../../data/rb87_lines.txt");
/// Default quantum-defect table compiled into the library.
pub const EMBEDDED_DEFECT_DATA: &str = include_str!("../../data/rb87_quantum_defects.txt");

/// Environment variable overriding the line-data file path.
pub const LINE_DATA_ENV: &str = "GRAPHENE_CP_DATA";

/// One measured transition: lower state, upper state, vacuum wavelength,
/// reduced dipole matrix element in e·a₀.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRecord {
    pub lower: String,
    pub upper: String,
    pub wavelength_nm: f64,
    pub reduced_dipole_au: f64,
}

/// Rydberg-Ritz coefficients for one (l, j) series; `j2` is 2j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectRecord {
    pub l: u32,
    pub j2: u32,
    pub delta0: f64,
    pub delta2: f64,
}

fn data_err(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::DataFile {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_f64(field: &str, what: &str, file: &str, line: usize) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| data_err(file, line, format!("cannot parse {what} from {field:?}")))
}

/// Parse line-data text. `source` names the origin for error messages.
pub fn parse_line_data(text: &str, source: &str) -> Result<Vec<LineRecord>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(data_err(
                source,
                lineno,
                format!("expected 4 columns, found {}", fields.len()),
            ));
        }
        let wavelength_nm = parse_f64(fields[2], "wavelength (nm)", source, lineno)?;
        let reduced_dipole_au = parse_f64(fields[3], "reduced dipole (e a0)", source, lineno)?;
        if !(wavelength_nm > 0.0) {
            return Err(data_err(source, lineno, "wavelength must be positive"));
        }
        if !(reduced_dipole_au >= 0.0) {
            return Err(data_err(source, lineno, "reduced dipole must be >= 0"));
        }
        out.push(LineRecord {
            lower: fields[0].to_string(),
            upper: fields[1].to_string(),
            wavelength_nm,
            reduced_dipole_au,
        });
    }
    if out.is_empty() {
        return Err(data_err(source, 0, "no data rows"));
    }
    Ok(out)
}

/// Load line data from `GRAPHENE_CP_DATA` when set, otherwise the embedded
/// default.
pub fn load_line_data() -> Result<Vec<LineRecord>> {
    match env::var(LINE_DATA_ENV) {
        Ok(path) if !path.is_empty() => {
            let text = fs::read_to_string(&path)?;
            parse_line_data(&text, &path)
        }
        _ => parse_line_data(EMBEDDED_LINE_DATA, "embedded rb87_lines.txt"),
    }
}

pub fn parse_defect_data(text: &str, source: &str) -> Result<Vec<DefectRecord>> {
    let mut out: Vec<DefectRecord> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(data_err(
                source,
                lineno,
                format!("expected 5 columns, found {}", fields.len()),
            ));
        }
        let l: u32 = fields[1]
            .parse()
            .map_err(|_| data_err(source, lineno, format!("bad l field {:?}", fields[1])))?;
        let j2 = parse_half_integer_doubled(fields[2])
            .ok_or_else(|| data_err(source, lineno, format!("bad j field {:?}", fields[2])))?;
        let delta0 = parse_f64(fields[3], "delta0", source, lineno)?;
        let delta2 = parse_f64(fields[4], "delta2", source, lineno)?;
        if out.iter().any(|d| d.l == l && d.j2 == j2) {
            return Err(data_err(source, lineno, "duplicate (l, j) series"));
        }
        out.push(DefectRecord {
            l,
            j2,
            delta0,
            delta2,
        });
    }
    if out.is_empty() {
        return Err(data_err(source, 0, "no data rows"));
    }
    Ok(out)
}

/// "1/2" → 1, "3/2" → 3, "2" → 4.
pub(crate) fn parse_half_integer_doubled(s: &str) -> Option<u32> {
    if let Some((num, den)) = s.split_once('/') {
        if den.trim() != "2" {
            return None;
        }
        num.trim().parse::<u32>().ok()
    } else {
        s.trim().parse::<u32>().ok().map(|v| 2 * v)
    }
}
