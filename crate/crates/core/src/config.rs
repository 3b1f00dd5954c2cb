//! Run parameters and the flat `key = value` configuration format.
//!
//! Keys are the parameter names `c, L, Nz, Nt, V1, V2, omega, D, W1, W2, t0,
//! t1, well_shape, sample_stride`. Numeric values accept a unit suffix:
//! lengths take `le` (Compton wavelengths, `1/c`), energies and `omega` take
//! `c2` (multiples of `c²`), durations take `/c2`. Suffixes are resolved with
//! the final value of `c`, wherever `c` appears in the file. `#` starts a
//! comment.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT: f64 = 137.036;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WellShape {
    TwoSided,
    OneSided,
}

impl WellShape {
    pub fn as_str(self) -> &'static str {
        match self {
            WellShape::TwoSided => "two_sided",
            WellShape::OneSided => "one_sided",
        }
    }
}

impl FromStr for WellShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "two_sided" => Ok(WellShape::TwoSided),
            "one_sided" => Ok(WellShape::OneSided),
            other => Err(Error::config(
                "well_shape",
                format!("expected two_sided or one_sided, got {other:?}"),
            )),
        }
    }
}

/// All physical and numerical parameters of one run, in atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub c: f64,
    /// Box length `L`.
    pub box_length: f64,
    pub nz: usize,
    pub nt: usize,
    /// Static well depth `V1`.
    pub v1: f64,
    /// Oscillating amplitude `V2`.
    pub v2: f64,
    pub omega: f64,
    /// Well width `D`.
    pub well_width: f64,
    /// Right-edge width.
    pub w1: f64,
    /// Left-edge width.
    pub w2: f64,
    /// Ramp duration.
    pub t0: f64,
    /// Oscillation duration.
    pub t1: f64,
    pub well_shape: WellShape,
    pub sample_stride: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self::with_speed_of_light(SPEED_OF_LIGHT)
    }
}

const KEYS: [&str; 14] = [
    "c",
    "L",
    "Nz",
    "Nt",
    "V1",
    "V2",
    "omega",
    "D",
    "W1",
    "W2",
    "t0",
    "t1",
    "well_shape",
    "sample_stride",
];

#[derive(Clone, Copy)]
enum Unit {
    Length,
    Energy,
    Duration,
    Count,
    Plain,
    Shape,
}

fn unit_of(key: &str) -> Unit {
    match key {
        "L" | "D" | "W1" | "W2" => Unit::Length,
        "V1" | "V2" | "omega" => Unit::Energy,
        "t0" | "t1" => Unit::Duration,
        "Nz" | "Nt" | "sample_stride" => Unit::Count,
        "well_shape" => Unit::Shape,
        _ => Unit::Plain,
    }
}

impl SimulationConfig {
    /// Default parameter set for a given `c`: `V1 = V2 = 2c² − 10000`,
    /// `ω = 2.1c²`, `D = 10λ_e`, `W1 = W2 = 0.3λ_e`, `t0 = 5/c²`,
    /// `t1 = 20π/c²`, `L = 2`, `Nz = 2048`, `Nt = 10000`.
    pub fn with_speed_of_light(c: f64) -> Self {
        let c2 = c * c;
        let lambda_e = 1.0 / c;
        let nt = 10_000;
        Self {
            c,
            box_length: 2.0,
            nz: 2048,
            nt,
            v1: 2.0 * c2 - 10_000.0,
            v2: 2.0 * c2 - 10_000.0,
            omega: 2.1 * c2,
            well_width: 10.0 * lambda_e,
            w1: 0.3 * lambda_e,
            w2: 0.3 * lambda_e,
            t0: 5.0 / c2,
            t1: 20.0 * std::f64::consts::PI / c2,
            well_shape: WellShape::TwoSided,
            sample_stride: default_stride(nt),
        }
    }

    /// Compton wavelength `1/c`.
    pub fn lambda_e(&self) -> f64 {
        1.0 / self.c
    }

    pub fn c2(&self) -> f64 {
        self.c * self.c
    }

    /// `T = 2 t0 + t1`.
    pub fn total_time(&self) -> f64 {
        2.0 * self.t0 + self.t1
    }

    pub fn dt(&self) -> f64 {
        self.total_time() / self.nt as f64
    }

    /// Checks every hard invariant. Returns soft warnings (currently only the
    /// light-cone check `c·T < L/2`).
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.nz < 2 || !self.nz.is_power_of_two() {
            return Err(Error::config(
                "Nz",
                format!("must be a power of two >= 2, got {}", self.nz),
            ));
        }
        if self.nt < 1 {
            return Err(Error::config("Nt", "must be >= 1"));
        }
        if self.sample_stride < 1 {
            return Err(Error::config("sample_stride", "must be >= 1"));
        }
        let positive = [
            ("c", self.c),
            ("L", self.box_length),
            ("D", self.well_width),
            ("W1", self.w1),
            ("W2", self.w2),
            ("t0", self.t0),
            ("t1", self.t1),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(key, format!("must be > 0, got {value}")));
            }
        }
        for (key, value) in [("V1", self.v1), ("V2", self.v2), ("omega", self.omega)] {
            if !value.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        let mut warnings = Vec::new();
        let reach = self.c * self.total_time();
        if reach >= 0.5 * self.box_length {
            warnings.push(format!(
                "c*T = {reach} >= L/2 = {}: created wavepackets can wrap around the box",
                0.5 * self.box_length
            ));
        }
        Ok(warnings)
    }

    /// Parses configuration text, applies `overrides` (same syntax as file
    /// entries, later entries win) and validates the result.
    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                reason: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Parse {
                    line: idx + 1,
                    reason: format!("unknown key {key:?}"),
                });
            }
            entries.push((key.to_string(), value.trim().to_string()));
        }
        for (key, value) in overrides {
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::config(key, "unknown key"));
            }
            entries.push((key.clone(), value.trim().to_string()));
        }
        Self::from_entries(&entries)
    }

    fn from_entries(entries: &[(String, String)]) -> Result<Self> {
        let lookup = |key: &str| {
            entries
                .iter()
                .rev()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        };
        let c = match lookup("c") {
            Some(v) => parse_number("c", v, Unit::Plain, f64::NAN)?,
            None => SPEED_OF_LIGHT,
        };
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::config("c", format!("must be > 0, got {c}")));
        }
        let mut cfg = Self::with_speed_of_light(c);
        let mut stride_set = false;
        for key in KEYS.iter().skip(1) {
            let Some(value) = lookup(key) else { continue };
            let unit = unit_of(key);
            match unit {
                Unit::Shape => cfg.well_shape = value.parse()?,
                Unit::Count => {
                    let n: usize = value
                        .parse()
                        .map_err(|_| Error::config(key, format!("expected an integer, got {value:?}")))?;
                    match *key {
                        "Nz" => cfg.nz = n,
                        "Nt" => cfg.nt = n,
                        _ => {
                            cfg.sample_stride = n;
                            stride_set = true;
                        }
                    }
                }
                _ => {
                    let x = parse_number(key, value, unit, c)?;
                    match *key {
                        "L" => cfg.box_length = x,
                        "V1" => cfg.v1 = x,
                        "V2" => cfg.v2 = x,
                        "omega" => cfg.omega = x,
                        "D" => cfg.well_width = x,
                        "W1" => cfg.w1 = x,
                        "W2" => cfg.w2 = x,
                        "t0" => cfg.t0 = x,
                        "t1" => cfg.t1 = x,
                        _ => unreachable!("unhandled key {key}"),
                    }
                }
            }
        }
        if !stride_set {
            cfg.sample_stride = default_stride(cfg.nt);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fully resolved configuration in the same `key = value` format.
    /// Floats use the shortest round-trip representation, so parsing the
    /// output reproduces `self` exactly.
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "c = {:?}", self.c);
        let _ = writeln!(s, "L = {:?}", self.box_length);
        let _ = writeln!(s, "Nz = {}", self.nz);
        let _ = writeln!(s, "Nt = {}", self.nt);
        let _ = writeln!(s, "V1 = {:?}", self.v1);
        let _ = writeln!(s, "V2 = {:?}", self.v2);
        let _ = writeln!(s, "omega = {:?}", self.omega);
        let _ = writeln!(s, "D = {:?}", self.well_width);
        let _ = writeln!(s, "W1 = {:?}", self.w1);
        let _ = writeln!(s, "W2 = {:?}", self.w2);
        let _ = writeln!(s, "t0 = {:?}", self.t0);
        let _ = writeln!(s, "t1 = {:?}", self.t1);
        let _ = writeln!(s, "well_shape = {}", self.well_shape.as_str());
        let _ = writeln!(s, "sample_stride = {}", self.sample_stride);
        s
    }
}

fn default_stride(nt: usize) -> usize {
    (nt / 50).max(1)
}

fn parse_number(key: &str, value: &str, unit: Unit, c: f64) -> Result<f64> {
    let v = value.trim();
    let (digits, scale) = match unit {
        Unit::Length if v.ends_with("le") => (&v[..v.len() - 2], 1.0 / c),
        Unit::Energy if v.ends_with("c2") => (&v[..v.len() - 2], c * c),
        Unit::Duration if v.ends_with("/c2") => (&v[..v.len() - 3], 1.0 / (c * c)),
        _ => (v, 1.0),
    };
    let x: f64 = digits
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse {value:?} as a number")))?;
    Ok(x * scale)
}
