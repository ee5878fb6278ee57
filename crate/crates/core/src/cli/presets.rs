//! Parameter sets behind the reproducible figures.
//!
//! Every preset has `tc = 0.5`, `t0 = 1`, `E0 = 0` and the default 2001-point
//! grid.

use crate::model::Geometry;

use super::config::{ScenarioConfig, DEFAULT_HALF_WIDTH, DEFAULT_POINTS};

/// What a figure file contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputKind {
    /// `omega,T,re_tau,im_tau,phase,T11,T13,T31,T33,singular`
    Spectrum,
    /// Unwrapped phase and weight of each non-trivial path amplitude.
    Paths,
    /// Total transmission phase, unwrapped and wrapped.
    Phase,
}

impl OutputKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputKind::Spectrum => "spectrum",
            OutputKind::Paths => "paths",
            OutputKind::Phase => "phase",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "spectrum" => Some(OutputKind::Spectrum),
            "paths" => Some(OutputKind::Paths),
            "phase" => Some(OutputKind::Phase),
            _ => None,
        }
    }
}

/// One output file of a figure.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub file: String,
    pub kind: OutputKind,
    pub config: ScenarioConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub id: &'static str,
    pub title: &'static str,
    pub curves: Vec<Curve>,
}

struct Preset {
    id: &'static str,
    title: &'static str,
    geometry: Geometry,
    e2: f64,
    t3: f64,
    v1: f64,
    v2: f64,
    gammas: &'static [f64],
    kinds: &'static [OutputKind],
}

const GAMMAS: &[f64] = &[0.0, 0.1, 0.3, 0.5];
const GAMMAS_WIDE: &[f64] = &[0.0, 0.1, 0.3, 0.5, 0.8];
const GAMMAS_GAIN: &[f64] = &[0.0, 0.4, 0.8, 1.2];
const SPECTRUM: &[OutputKind] = &[OutputKind::Spectrum];

const fn chain(id: &'static str, title: &'static str, e2: f64, v1: f64, v2: f64, gammas: &'static [f64]) -> Preset {
    Preset {
        id,
        title,
        geometry: Geometry::Chain,
        e2,
        t3: 0.0,
        v1,
        v2,
        gammas,
        kinds: SPECTRUM,
    }
}

const fn ring(id: &'static str, title: &'static str, t3: f64, v1: f64, v2: f64, gammas: &'static [f64]) -> Preset {
    Preset {
        id,
        title,
        geometry: Geometry::Ring,
        e2: 0.5,
        t3,
        v1,
        v2,
        gammas,
        kinds: SPECTRUM,
    }
}

const PRESETS: &[Preset] = &[
    chain("fig2a", "chain, middle dot coupled, E2 = 0", 0.0, 0.0, 0.5, GAMMAS_WIDE),
    chain("fig2b", "chain, middle dot coupled, E2 = 0.5", 0.5, 0.0, 0.5, GAMMAS_WIDE),
    chain("fig2c", "chain, terminal dots coupled, E2 = 0", 0.0, 0.5, 0.0, GAMMAS),
    chain("fig2d", "chain, terminal dots coupled, E2 = 0.5", 0.5, 0.5, 0.0, GAMMAS),
    chain("fig3a", "chain, all dots coupled, E2 = 0", 0.0, 0.5, 0.5, GAMMAS),
    chain("fig3b", "chain, all dots coupled, E2 = 0.5", 0.5, 0.5, 0.5, GAMMAS_WIDE),
    ring("fig4a", "ring, middle dot coupled, t3 = 0.3", 0.3, 0.0, 0.5, GAMMAS),
    ring("fig4b", "ring, middle dot coupled, t3 = 0.5", 0.5, 0.0, 0.5, GAMMAS),
    ring("fig4c", "ring, middle dot coupled, t3 = 0.8", 0.8, 0.0, 0.5, GAMMAS),
    ring("fig5a", "ring, terminal dots coupled, t3 = 0.3", 0.3, 0.5, 0.0, GAMMAS_GAIN),
    ring("fig5b", "ring, terminal dots coupled, t3 = 0.5", 0.5, 0.5, 0.0, GAMMAS_GAIN),
    ring("fig5c", "ring, terminal dots coupled, t3 = 0.8", 0.8, 0.5, 0.0, GAMMAS_GAIN),
    ring("fig6", "ring path amplitudes, terminal dots coupled", 0.5, 0.5, 0.0, GAMMAS),
    Preset {
        kinds: &[OutputKind::Paths, OutputKind::Phase],
        ..ring("fig7", "ring path and total phases, terminal dots coupled", 0.5, 0.5, 0.0, GAMMAS)
    },
    ring("fig8a", "ring phase, middle dot coupled", 0.5, 0.0, 0.5, GAMMAS),
    chain("fig8b", "chain phase, middle dot coupled", 0.5, 0.0, 0.5, GAMMAS),
    ring("fig8c", "ring phase, all dots coupled", 0.5, 0.5, 0.5, GAMMAS),
    chain("fig8d", "chain phase, all dots coupled", 0.5, 0.5, 0.5, GAMMAS),
];

/// All known figure identifiers.
pub fn figure_ids() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.id).collect()
}

fn preset(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}

impl Preset {
    fn config(&self, gamma: f64) -> ScenarioConfig {
        ScenarioConfig {
            geometry: self.geometry,
            t0: 1.0,
            e0: 0.0,
            gamma,
            e2: self.e2,
            tc: 0.5,
            t3: self.t3,
            v1: self.v1,
            v2: self.v2,
            omega_min: -DEFAULT_HALF_WIDTH,
            omega_max: DEFAULT_HALF_WIDTH,
            n_points: DEFAULT_POINTS,
        }
    }
}

/// Configuration of a figure at one loss/gain rate; the first plotted
/// value when `gamma` is `None`.
pub fn preset_config(id: &str, gamma: Option<f64>) -> Option<ScenarioConfig> {
    let p = preset(id)?;
    Some(p.config(gamma.unwrap_or(p.gammas[0])))
}

pub fn figure(id: &str) -> Option<Figure> {
    let p = preset(id)?;
    let mut curves = Vec::new();
    for &gamma in p.gammas {
        for &kind in p.kinds {
            let suffix = match kind {
                OutputKind::Spectrum => String::new(),
                k => format!("_{}", k.as_str()),
            };
            curves.push(Curve {
                file: format!("{}_gamma{}{}.csv", p.id, gamma, suffix),
                kind,
                config: p.config(gamma),
            });
        }
    }
    Some(Figure {
        id: p.id,
        title: p.title,
        curves,
    })
}
