//! `key = value` scenario files.
//!
//! ```text
//! # ring, middle dot attached
//! geometry = ring
//! gamma = 0.3
//! E2 = 0.5
//! tc = 0.5
//! t3 = 0.5
//! v1 = 0
//! v2 = 0.5
//! ```
//!
//! `t0` defaults to 1, `E0` to 0 and the grid to 2001 points with spacing
//! `t0 / 502`, which keeps the band edges out and puts `ω = 0, ±t0/2, ±t0` on
//! samples. `t3` is required for rings and must be absent or zero for chains.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{build_chain, build_ring, DotSystem, Geometry, LeadAttachment, ModelError};

pub const DEFAULT_POINTS: usize = 2001;
/// Default sweep half-width in units of `t0`: 1000 steps of `1/502`.
pub const DEFAULT_HALF_WIDTH: f64 = 1000.0 / 502.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("configuration is empty")]
    Empty,
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("a chain has no t3 coupling, got t3 = {0}")]
    ChainWithT3(f64),
}

pub const KEYS: [&str; 12] = [
    "geometry",
    "t0",
    "E0",
    "gamma",
    "E2",
    "tc",
    "t3",
    "v1",
    "v2",
    "omega_min",
    "omega_max",
    "n_points",
];

/// One fully specified calculation: molecule, leads and energy grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: Geometry,
    pub t0: f64,
    pub e0: f64,
    pub gamma: f64,
    pub e2: f64,
    pub tc: f64,
    pub t3: f64,
    pub v1: f64,
    pub v2: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
}

impl ScenarioConfig {
    pub fn system(&self) -> DotSystem {
        match self.geometry {
            Geometry::Chain => build_chain(self.e0, self.gamma, self.e2, self.tc),
            Geometry::Ring => build_ring(self.e0, self.gamma, self.e2, self.tc, self.t3),
        }
    }

    pub fn leads(&self) -> Result<LeadAttachment, ModelError> {
        for (name, v) in [
            ("E0", self.e0),
            ("gamma", self.gamma),
            ("E2", self.e2),
            ("tc", self.tc),
            ("t3", self.t3),
            ("omega_min", self.omega_min),
            ("omega_max", self.omega_max),
        ] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        LeadAttachment::symmetric(self.t0, self.v1, self.v2)
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        ScenarioConfig {
            gamma,
            ..self.clone()
        }
    }

    /// Serialise back to the text format. Numbers use the shortest
    /// representation that parses to the same value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    pub(crate) fn entries(&self) -> Vec<(&'static str, String)> {
        let mut e = vec![
            ("geometry", self.geometry.as_str().to_string()),
            ("t0", self.t0.to_string()),
            ("E0", self.e0.to_string()),
            ("gamma", self.gamma.to_string()),
            ("E2", self.e2.to_string()),
            ("tc", self.tc.to_string()),
        ];
        if self.geometry == Geometry::Ring {
            e.push(("t3", self.t3.to_string()));
        }
        e.extend([
            ("v1", self.v1.to_string()),
            ("v2", self.v2.to_string()),
            ("omega_min", self.omega_min.to_string()),
            ("omega_max", self.omega_max.to_string()),
            ("n_points", self.n_points.to_string()),
        ]);
        e
    }
}

/// Parse a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let pairs = parse_pairs(text.lines().enumerate().map(|(i, l)| (i + 1, l)))?;
    if pairs.is_empty() {
        return Err(ConfigError::Empty);
    }
    from_pairs(&pairs)
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub(crate) fn parse_pairs<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    for (line, raw) in lines {
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: body.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: body.to_string(),
            });
        }
        if pairs.iter().any(|(_, k, _)| k == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        pairs.push((line, key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

pub(crate) fn from_pairs(pairs: &[(usize, String, String)]) -> Result<ScenarioConfig, ConfigError> {
    if let Some((line, key, _)) = pairs.iter().find(|(_, k, _)| !KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey {
            line: *line,
            key: key.clone(),
        });
    }
    let lookup = |key: &str| pairs.iter().find(|(_, k, _)| k == key);
    let bad = |(line, key, value): &(usize, String, String)| ConfigError::BadValue {
        line: *line,
        key: key.clone(),
        value: value.clone(),
    };
    let number = |key: &'static str| -> Result<Option<f64>, ConfigError> {
        match lookup(key) {
            None => Ok(None),
            Some(p) => p.2.parse::<f64>().map(Some).map_err(|_| bad(p)),
        }
    };
    let required = |key: &'static str| number(key)?.ok_or(ConfigError::Missing(key));

    let geometry = match lookup("geometry") {
        None => return Err(ConfigError::Missing("geometry")),
        Some(p) => p.2.parse::<Geometry>().map_err(|_| bad(p))?,
    };
    let t3 = match geometry {
        Geometry::Ring => required("t3")?,
        Geometry::Chain => match number("t3")? {
            Some(t3) if t3 != 0.0 => return Err(ConfigError::ChainWithT3(t3)),
            _ => 0.0,
        },
    };
    let t0 = number("t0")?.unwrap_or(1.0);
    let n_points = match lookup("n_points") {
        None => DEFAULT_POINTS,
        Some(p) => p.2.parse::<usize>().map_err(|_| bad(p))?,
    };

    Ok(ScenarioConfig {
        geometry,
        t0,
        e0: number("E0")?.unwrap_or(0.0),
        gamma: required("gamma")?,
        e2: required("E2")?,
        tc: required("tc")?,
        t3,
        v1: required("v1")?,
        v2: required("v2")?,
        omega_min: number("omega_min")?.unwrap_or(-DEFAULT_HALF_WIDTH * t0),
        omega_max: number("omega_max")?.unwrap_or(DEFAULT_HALF_WIDTH * t0),
        n_points,
    })
}
