//! Run configuration: defaults, flat `key = value` config files, and CLI
//! flags, merged with flags > file > defaults. Unknown file keys are hard
//! errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use graphene_cp::cp::CPSettings;
use graphene_cp::graphene::GrapheneModel;
use graphene_cp::membrane::MembraneSpec;
use graphene_cp::scenarios::Rounding;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceSpec {
    Single(f64),
    Range {
        start: f64,
        stop: f64,
        points: usize,
        log: bool,
    },
}

impl DistanceSpec {
    /// "2e-7" or "start:stop:points:lin|log".
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.len() {
            1 => {
                let v: f64 = parts[0]
                    .parse()
                    .map_err(|_| UsageError(format!("bad distance {text:?}")))?;
                if !(v > 0.0) {
                    return Err(UsageError(format!("distance must be positive, got {v}")));
                }
                Ok(DistanceSpec::Single(v))
            }
            4 => {
                let start: f64 = parts[0]
                    .parse()
                    .map_err(|_| UsageError(format!("bad range start in {text:?}")))?;
                let stop: f64 = parts[1]
                    .parse()
                    .map_err(|_| UsageError(format!("bad range stop in {text:?}")))?;
                let points: usize = parts[2]
                    .parse()
                    .map_err(|_| UsageError(format!("bad range point count in {text:?}")))?;
                let log = match parts[3] {
                    "lin" => false,
                    "log" => true,
                    other => {
                        return Err(UsageError(format!(
                            "range spacing must be lin or log, got {other:?}"
                        )))
                    }
                };
                if !(start > 0.0) || !(stop > start) {
                    return Err(UsageError(format!(
                        "range needs 0 < start < stop, got {start}..{stop}"
                    )));
                }
                if points < 2 {
                    return Err(UsageError(format!(
                        "range needs at least 2 points, got {points}"
                    )));
                }
                Ok(DistanceSpec::Range {
                    start,
                    stop,
                    points,
                    log,
                })
            }
            _ => Err(UsageError(format!(
                "distance must be a value or start:stop:points:lin|log, got {text:?}"
            ))),
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        match *self {
            DistanceSpec::Single(z) => vec![z],
            DistanceSpec::Range {
                start,
                stop,
                points,
                log,
            } => {
                let n = points as f64 - 1.0;
                (0..points)
                    .map(|i| {
                        let t = i as f64 / n;
                        if log {
                            (start.ln() + t * (stop.ln() - start.ln())).exp()
                        } else {
                            start + t * (stop - start)
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Option values accepted both as CLI flags and config-file keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub state: Option<String>,
    pub distance: Option<String>,
    pub temperature: Option<f64>,
    pub window: Option<u32>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    pub v_tilde: Option<f64>,
    pub alpha_fs: Option<f64>,
    pub paper_constants: Option<bool>,
    pub youngs_modulus: Option<f64>,
    pub density: Option<f64>,
    pub thickness: Option<f64>,
    pub width: Option<f64>,
    pub length: Option<f64>,
    pub tension: Option<f64>,
    pub clamping: Option<f64>,
    pub amplitude: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
    pub rounding: Option<String>,
    pub full_cp: Option<bool>,
}

impl Overrides {
    fn merge_under(&mut self, fallback: Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if self.$field.is_none() { self.$field = fallback.$field; })*
            };
        }
        take!(
            state,
            distance,
            temperature,
            window,
            format,
            output,
            v_tilde,
            alpha_fs,
            paper_constants,
            youngs_modulus,
            density,
            thickness,
            width,
            length,
            tension,
            clamping,
            amplitude,
            rel_tol,
            max_subdivisions,
            rounding,
            full_cp
        );
    }
}

fn parse_bool(value: &str, key: &str) -> Result<bool, UsageError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(UsageError(format!("bad boolean for {key}: {value:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str, key: &str) -> Result<T, UsageError> {
    value
        .parse()
        .map_err(|_| UsageError(format!("bad value for {key}: {value:?}")))
}

/// Parse a flat `key = value` config file; `#` starts a comment, no nesting.
pub fn parse_config_file(path: &Path) -> Result<Overrides, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            UsageError(format!(
                "{}:{}: expected key = value, got {raw:?}",
                path.display(),
                idx + 1
            ))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(UsageError(format!(
                "{}:{}: duplicate key {key:?}",
                path.display(),
                idx + 1
            )));
        }
    }

    let mut over = Overrides::default();
    for (key, value) in map {
        match key.as_str() {
            "state" => over.state = Some(value),
            "distance" => over.distance = Some(value),
            "temperature" => over.temperature = Some(parse_num(&value, &key)?),
            "window" => over.window = Some(parse_num(&value, &key)?),
            "format" => over.format = Some(value),
            "output" => over.output = Some(PathBuf::from(value)),
            "v-tilde" => over.v_tilde = Some(parse_num(&value, &key)?),
            "alpha-fs" => over.alpha_fs = Some(parse_num(&value, &key)?),
            "paper-constants" => over.paper_constants = Some(parse_bool(&value, &key)?),
            "youngs-modulus" => over.youngs_modulus = Some(parse_num(&value, &key)?),
            "density" => over.density = Some(parse_num(&value, &key)?),
            "thickness" => over.thickness = Some(parse_num(&value, &key)?),
            "width" => over.width = Some(parse_num(&value, &key)?),
            "length" => over.length = Some(parse_num(&value, &key)?),
            "tension" => over.tension = Some(parse_num(&value, &key)?),
            "clamping" => over.clamping = Some(parse_num(&value, &key)?),
            "amplitude" => over.amplitude = Some(parse_num(&value, &key)?),
            "rel-tol" => over.rel_tol = Some(parse_num(&value, &key)?),
            "max-subdivisions" => over.max_subdivisions = Some(parse_num(&value, &key)?),
            "rounding" => over.rounding = Some(value),
            "full-cp" => over.full_cp = Some(parse_bool(&value, &key)?),
            _ => {
                return Err(UsageError(format!(
                    "unknown config key {key:?} in {}",
                    path.display()
                )))
            }
        }
    }
    Ok(over)
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub state: Option<String>,
    pub distance: Option<DistanceSpec>,
    pub temperature: f64,
    pub window: u32,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub graphene: GrapheneModel,
    pub membrane: MembraneSpec,
    pub amplitude: f64,
    pub settings: CPSettings,
    pub rounding: Rounding,
    pub full_cp: bool,
}

pub fn resolve(mut flags: Overrides, config_path: Option<&Path>) -> Result<RunConfig, UsageError> {
    if let Some(path) = config_path {
        flags.merge_under(parse_config_file(path)?);
    }
    let over = flags;

    let temperature = over.temperature.unwrap_or(0.0);
    if !(temperature >= 0.0) {
        return Err(UsageError(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    let window = over.window.unwrap_or(5);

    let format = match over.format.as_deref().unwrap_or("csv") {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => return Err(UsageError(format!("unknown format {other:?}"))),
    };

    let rounding = match over.rounding.as_deref().unwrap_or("ceiling") {
        "ceiling" => Rounding::Ceiling,
        "nearest" => Rounding::Nearest,
        other => return Err(UsageError(format!("unknown rounding {other:?}"))),
    };

    let paper = over.paper_constants.unwrap_or(true);
    let base = if paper {
        GrapheneModel::paper_rounded()
    } else {
        GrapheneModel::codata()
    };
    let graphene = GrapheneModel::new(
        over.v_tilde.unwrap_or(base.v_tilde),
        over.alpha_fs.unwrap_or(base.alpha_fs),
        0.0,
        0.0,
    )
    .map_err(|e| UsageError(e.to_string()))?;

    let reference = MembraneSpec::reference_cantilever();
    let membrane = MembraneSpec::new(
        over.youngs_modulus.unwrap_or(reference.youngs_modulus),
        over.density.unwrap_or(reference.density),
        over.thickness.unwrap_or(reference.thickness),
        over.width.unwrap_or(reference.width),
        over.length.unwrap_or(reference.length),
        over.tension.unwrap_or(reference.tension),
        reference.clamping,
    )
    .and_then(|m| match over.clamping {
        Some(c) => m.with_clamping_override(c),
        None => Ok(m),
    })
    .map_err(|e| UsageError(e.to_string()))?;

    let amplitude = over.amplitude.unwrap_or(1e-9);
    if !(amplitude > 0.0) {
        return Err(UsageError(format!(
            "amplitude must be positive, got {amplitude}"
        )));
    }

    let mut settings = CPSettings::default();
    if let Some(rel) = over.rel_tol {
        if !(rel > 0.0 && rel < 1.0) {
            return Err(UsageError(format!("rel-tol must be in (0,1), got {rel}")));
        }
        settings.outer_rel_tol = rel;
        settings.inner_rel_tol = rel / 10.0;
    }
    if let Some(m) = over.max_subdivisions {
        if m < 1 {
            return Err(UsageError("max-subdivisions must be >= 1".into()));
        }
        settings.max_subdivisions = m;
    }

    let distance = over
        .distance
        .as_deref()
        .map(DistanceSpec::parse)
        .transpose()?;

    Ok(RunConfig {
        state: over.state,
        distance,
        temperature,
        window,
        format,
        output: over.output,
        graphene,
        membrane,
        amplitude,
        settings,
        rounding,
        full_cp: over.full_cp.unwrap_or(false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_specs() {
        assert_eq!(
            DistanceSpec::parse("2e-7").unwrap(),
            DistanceSpec::Single(2e-7)
        );
        let r = DistanceSpec::parse("1e-8:5e-7:50:log").unwrap();
        match r {
            DistanceSpec::Range {
                start,
                stop,
                points,
                log,
            } => {
                assert_eq!((start, stop, points, log), (1e-8, 5e-7, 50, true));
            }
            _ => panic!("expected range"),
        }
        assert!(DistanceSpec::parse("5e-7:1e-8:50:log").is_err());
        assert!(DistanceSpec::parse("1e-8:5e-7:1:lin").is_err());
        assert!(DistanceSpec::parse("1e-8:5e-7:10:cubic").is_err());
        assert!(DistanceSpec::parse("abc").is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = DistanceSpec::parse("1e-8:1e-7:10:lin").unwrap().grid();
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1e-8).abs() < 1e-20);
        assert!((g[9] - 1e-7).abs() < 1e-20);
        let gl = DistanceSpec::parse("1e-8:1e-7:3:log").unwrap().grid();
        assert!((gl[1] - (1e-8f64 * 1e-7f64).sqrt()).abs() < 1e-17);
    }

    #[test]
    fn defaults_resolve() {
        let cfg = resolve(Overrides::default(), None).unwrap();
        assert_eq!(cfg.temperature, 0.0);
        assert_eq!(cfg.window, 5);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.rounding, Rounding::Ceiling);
        assert!((cfg.amplitude - 1e-9).abs() < 1e-21);
    }
}
