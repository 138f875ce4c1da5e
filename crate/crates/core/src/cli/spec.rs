//! Run settings: `key = value` spec files overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use crate::cli::output::Format;
use crate::cli::CliError;
use crate::numerics::QuadratureSpec;

/// Environment variable overriding the relative quadrature tolerance.
pub const RTOL_ENV: &str = "QBM_QUAD_RTOL";

/// Every key accepted in a spec file; flags use the same names.
pub const KEYS: &[&str] = &[
    "gamma",
    "cutoff",
    "omega0",
    "mass",
    "temp",
    "temp-range",
    "n-max",
    "samples",
    "seed",
    "rel-tol",
    "format",
    "out",
    "state",
    "n-bar",
    "tune-energy",
    "tune-occupation",
    "delta",
    "bath-size",
    "diagonal",
];

/// Parses `start:stop:count`, `start:stop:count:log` or a comma list.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty value".into());
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if !(parts.len() == 3 || (parts.len() == 4 && parts[3] == "log")) {
            return Err(format!("range `{text}` is not start:stop:count[:log]"));
        }
        let start = parse_number(parts[0])?;
        let stop = parse_number(parts[1])?;
        let count: usize =
            parts[2].parse().map_err(|_| format!("range count `{}` is not a positive integer", parts[2]))?;
        if count == 0 {
            return Err("range count must be at least 1".into());
        }
        let log = parts.len() == 4;
        if log && !(start > 0.0 && stop > 0.0) {
            return Err("logarithmic range needs positive bounds".into());
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = 1.0 / (count - 1) as f64;
        return Ok((0..count)
            .map(|i| {
                let s = i as f64 * step;
                if i == count - 1 {
                    stop
                } else if log {
                    (start.ln() + s * (stop.ln() - start.ln())).exp()
                } else {
                    start + s * (stop - start)
                }
            })
            .collect());
    }
    text.split(',').map(|v| parse_number(v.trim())).collect()
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_spec_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            return Err(format!("line {}: unknown key `{k}`", i + 1));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

/// Merged settings. Values from flags replace values from the spec file.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    from_flags: BTreeMap<String, bool>,
}

impl Settings {
    pub fn load(spec: Option<&Path>, flags: BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut values = match spec {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::parameter(format!("cannot read spec file {}: {e}", path.display())))?;
                parse_spec_file(&text).map_err(|e| CliError::parameter(format!("{}: {e}", path.display())))?
            }
            None => BTreeMap::new(),
        };
        let mut from_flags = BTreeMap::new();
        for (k, v) in flags {
            from_flags.insert(k.clone(), true);
            values.insert(k, v);
        }
        Ok(Settings { values, from_flags })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn bad(key: &str, msg: impl std::fmt::Display) -> CliError {
        CliError::parameter(format!("{key}: {msg}"))
    }

    pub fn number(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.optional_number(key).map(|v| v.unwrap_or(default))
    }

    pub fn optional_number(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => parse_number(s.trim()).map(Some).map_err(|e| Self::bad(key, e)),
        }
    }

    pub fn list(&self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        parse_values(self.raw(key).unwrap_or(default)).map_err(|e| Self::bad(key, e))
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.optional_count(key).map(|v| v.unwrap_or(default))
    }

    pub fn optional_count(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => {
                s.trim().parse().map(Some).map_err(|_| Self::bad(key, format!("`{s}` is not a non-negative integer")))
            }
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key).map(str::trim) {
            None | Some("false") | Some("0") | Some("no") => Ok(false),
            Some("true") | Some("1") | Some("yes") | Some("") => Ok(true),
            Some(other) => Err(Self::bad(key, format!("`{other}` is not a boolean"))),
        }
    }

    /// Temperatures from `temp` or `temp-range`. When both are present the
    /// one given on the command line is used.
    pub fn temperatures(&self, default: &str) -> Result<Vec<f64>, CliError> {
        let key = match (self.raw("temp"), self.raw("temp-range")) {
            (Some(_), Some(_)) => {
                let t = self.from_flags.contains_key("temp");
                let r = self.from_flags.contains_key("temp-range");
                match (t, r) {
                    (true, false) => "temp",
                    (false, true) => "temp-range",
                    _ => return Err(CliError::parameter("give either temp or temp-range, not both")),
                }
            }
            (Some(_), None) => "temp",
            (None, Some(_)) => "temp-range",
            (None, None) => return parse_values(default).map_err(|e| Self::bad("temp", e)),
        };
        let values = self.list(key, default)?;
        if values.iter().any(|t| *t < 0.0) {
            return Err(Self::bad(key, "temperatures must be non-negative"));
        }
        Ok(values)
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.raw("format").map(str::trim) {
            None | Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => Err(Self::bad("format", format!("`{other}` is neither csv nor json"))),
        }
    }

    /// Quadrature settings. Precedence for the relative tolerance:
    /// `--rel-tol` flag, then the environment, then the spec file.
    pub fn quadrature(&self, env: Option<&str>) -> Result<QuadratureSpec, CliError> {
        let flag = self.from_flags.contains_key("rel-tol");
        let text = match (flag, env) {
            (true, _) => self.raw("rel-tol"),
            (false, Some(e)) => Some(e),
            (false, None) => self.raw("rel-tol"),
        };
        let mut spec = QuadratureSpec::default();
        if let Some(t) = text {
            let r = parse_number(t.trim()).map_err(|e| Self::bad("rel-tol", e))?;
            if !(r > 0.0 && r <= 1e-2) {
                return Err(Self::bad("rel-tol", format!("{r} is outside (0, 1e-2]")));
            }
            spec = spec.with_rel_tol(r);
        }
        Ok(spec)
    }
}
