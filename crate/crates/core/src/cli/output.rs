//! CSV rendering and reproduction manifests.

use std::fmt::Write as _;

use thiserror::Error;

use crate::spectra::{unwrap_phase, Spectrum};

use super::config::{from_pairs, parse_pairs, ConfigError};
use super::presets::{Curve, Figure, OutputKind};

pub const SPECTRUM_HEADER: &str = "omega,T,re_tau,im_tau,phase,T11,T13,T31,T33,singular";
pub const PATHS_HEADER: &str = "omega,phase11,phase13,phase31,phase33,T11,T13,T31,T33";
pub const PHASE_HEADER: &str = "omega,T,phase,wrapped_phase";

const CORNERS: [(usize, usize); 4] = [(0, 0), (0, 2), (2, 0), (2, 2)];

/// `%.12g`: twelve significant digits, trailing zeros dropped, exponent form
/// outside `1e-4 ≤ |x| < 1e12`.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    } else {
        let decimals = (11 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row(out: &mut String, cells: &[String]) {
    let _ = writeln!(out, "{}", cells.join(","));
}

pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = format!("{SPECTRUM_HEADER}\n");
    for s in &spectrum.samples {
        let mut cells = vec![
            format_g12(s.omega),
            format_g12(s.transmission),
            format_g12(s.tau.re),
            format_g12(s.tau.im),
            format_g12(s.phase_unwrapped),
        ];
        cells.extend(CORNERS.iter().map(|&ij| format_g12(s.tau_paths[ij].norm_sqr())));
        cells.push(u8::from(s.singular).to_string());
        row(&mut out, &cells);
    }
    out
}

pub fn paths_csv(spectrum: &Spectrum) -> String {
    let phases: Vec<Vec<f64>> = CORNERS
        .iter()
        .map(|&ij| {
            let wrapped: Vec<f64> = spectrum.samples.iter().map(|s| s.tau_paths[ij].arg()).collect();
            unwrap_phase(&wrapped)
        })
        .collect();
    let mut out = format!("{PATHS_HEADER}\n");
    for (k, s) in spectrum.samples.iter().enumerate() {
        let mut cells = vec![format_g12(s.omega)];
        cells.extend(phases.iter().map(|p| format_g12(p[k])));
        cells.extend(CORNERS.iter().map(|&ij| format_g12(s.tau_paths[ij].norm_sqr())));
        row(&mut out, &cells);
    }
    out
}

pub fn phase_csv(spectrum: &Spectrum) -> String {
    let mut out = format!("{PHASE_HEADER}\n");
    for s in &spectrum.samples {
        row(
            &mut out,
            &[
                format_g12(s.omega),
                format_g12(s.transmission),
                format_g12(s.phase_unwrapped),
                format_g12(s.tau.arg()),
            ],
        );
    }
    out
}

pub fn render(kind: OutputKind, spectrum: &Spectrum) -> String {
    match kind {
        OutputKind::Spectrum => spectrum_csv(spectrum),
        OutputKind::Paths => paths_csv(spectrum),
        OutputKind::Phase => phase_csv(spectrum),
    }
}

/// Everything needed to regenerate the files of one `reproduce` run.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub figure: String,
    pub curves: Vec<Curve>,
}

impl From<&Figure> for Manifest {
    fn from(f: &Figure) -> Self {
        Manifest {
            figure: f.id.to_string(),
            curves: f.curves.clone(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifestError {
    #[error("manifest has no `figure` entry")]
    MissingFigure,
    #[error("line {line}: unexpected `{text}`")]
    Syntax { line: usize, text: String },
    #[error("section [{file}]: missing or unknown kind")]
    Kind { file: String },
    #[error("section [{file}]: {source}")]
    Config {
        file: String,
        #[source]
        source: ConfigError,
    },
}

pub fn write_manifest(m: &Manifest) -> String {
    let mut out = String::from("# tridot reproduce manifest\n");
    let _ = writeln!(out, "figure = {}", m.figure);
    for c in &m.curves {
        let _ = write!(out, "\n[{}]\nkind = {}\n", c.file, c.kind.as_str());
        out.push_str(&c.config.to_text());
    }
    out
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let mut figure = None;
    let mut sections: Vec<(String, Vec<(usize, &str)>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = super::config::strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            sections.push((name.trim().to_string(), Vec::new()));
        } else if let Some((_, lines)) = sections.last_mut() {
            lines.push((line, raw));
        } else {
            match body.split_once('=') {
                Some((k, v)) if k.trim() == "figure" => figure = Some(v.trim().to_string()),
                _ => {
                    return Err(ManifestError::Syntax {
                        line,
                        text: body.to_string(),
                    })
                }
            }
        }
    }

    let figure = figure.ok_or(ManifestError::MissingFigure)?;
    let mut curves = Vec::new();
    for (file, lines) in sections {
        let config_err = |source| ManifestError::Config {
            file: file.clone(),
            source,
        };
        let mut pairs = parse_pairs(lines.into_iter()).map_err(config_err)?;
        let kind = pairs
            .iter()
            .position(|(_, k, _)| k == "kind")
            .map(|i| pairs.remove(i))
            .and_then(|(_, _, v)| OutputKind::parse(&v))
            .ok_or_else(|| ManifestError::Kind { file: file.clone() })?;
        let config = from_pairs(&pairs).map_err(config_err)?;
        curves.push(Curve { file, kind, config });
    }
    Ok(Manifest { figure, curves })
}
