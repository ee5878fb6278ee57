//! Energy sweeps and their post-processing: zero finding, phase unwrapping
//! and π-jump detection.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::closedform::{self, ZeroCondition};
use crate::leads::{self, OutOfBand};
use crate::linalg::Mat3;
use crate::model::{DotSystem, LeadAttachment};
use crate::negf;

/// Refined minima below this transmission count as exact zeros.
pub const ZERO_THRESHOLD: f64 = 1e-12;
/// Target bracket width of the golden-section refinement.
pub const REFINE_WIDTH: f64 = 1e-10;
/// Allowed deviation of a phase jump from π.
pub const PHASE_JUMP_TOLERANCE: f64 = 0.2;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    OutOfBand(#[from] OutOfBand),
    #[error("sweep range must satisfy omega_min < omega_max, got [{0}, {1}]")]
    EmptyRange(f64, f64),
    #[error("a sweep needs at least 2 points, got {0}")]
    TooFewPoints(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub omega: f64,
    pub transmission: f64,
    pub tau: Complex64,
    pub tau_paths: Mat3,
    pub phase_unwrapped: f64,
    pub singular: bool,
}

/// Uniformly sampled spectrum of one configuration.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub system: DotSystem,
    pub leads: LeadAttachment,
    pub samples: Vec<Sample>,
}

impl Spectrum {
    pub fn spacing(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) if self.samples.len() > 1 => {
                (b.omega - a.omega) / (self.samples.len() - 1) as f64
            }
            _ => 0.0,
        }
    }

    pub fn omega_range(&self) -> (f64, f64) {
        let first = self.samples.first().map_or(f64::NAN, |s| s.omega);
        let last = self.samples.last().map_or(f64::NAN, |s| s.omega);
        (first, last)
    }
}

/// `n` points from `lo` to `hi` inclusive. Written as a lerp so the endpoints
/// are exact and symmetric ranges put the midpoint exactly on zero.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let s = i as f64 / last;
            lo * (1.0 - s) + hi * s
        })
        .collect()
}

/// Principal-value phase continued through the nearest branch.
pub fn unwrap_phase(wrapped: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(wrapped.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in wrapped {
        if let Some(q) = prev {
            let d = p - q;
            if d > PI {
                offset -= 2.0 * PI;
            } else if d < -PI {
                offset += 2.0 * PI;
            }
        }
        prev = Some(p);
        out.push(p + offset);
    }
    out
}

/// Wrap an angle difference into `(-π, π]`.
fn wrap_angle(d: f64) -> f64 {
    let r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

pub fn sweep(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega_min: f64,
    omega_max: f64,
    n_points: usize,
) -> Result<Spectrum, SpectraError> {
    if n_points < 2 {
        return Err(SpectraError::TooFewPoints(n_points));
    }
    leads::check_in_band(omega_min, leads.t0())?;
    leads::check_in_band(omega_max, leads.t0())?;
    if omega_min >= omega_max {
        return Err(SpectraError::EmptyRange(omega_min, omega_max));
    }

    let grid = uniform_grid(omega_min, omega_max, n_points);
    let points = grid
        .par_iter()
        .map(|&omega| negf::evaluate(sys, leads, omega))
        .collect::<Result<Vec<_>, _>>()?;

    let wrapped: Vec<f64> = points.iter().map(|p| p.tau.arg()).collect();
    let unwrapped = unwrap_phase(&wrapped);
    let samples = points
        .into_iter()
        .zip(unwrapped)
        .map(|(p, phase)| Sample {
            omega: p.omega,
            transmission: p.transmission,
            tau: p.tau,
            tau_paths: p.paths,
            phase_unwrapped: phase,
            singular: p.singular,
        })
        .collect();

    Ok(Spectrum {
        system: sys.clone(),
        leads: leads.clone(),
        samples,
    })
}

/// Golden-section minimisation of `f` on `[a, b]` down to bracket width `tol`.
/// Returns the best abscissa seen and its value.
pub fn golden_section_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };

    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

/// Sub-intervals scanned before golden section, so that a bracket holding
/// both a narrow zero and its Fano peak is not mistaken for a unimodal one.
const REFINE_SCAN: usize = 24;
/// Level whose two crossings centre a zero.
const POLISH_LEVEL: f64 = 1e-20;

/// Minimum of `T` in `[lo, hi]`, never worse than the seed sample.
fn refine_minimum(spectrum: &Spectrum, lo: f64, hi: f64, seed: (f64, f64)) -> (f64, f64) {
    let (sys, leads) = (&spectrum.system, &spectrum.leads);
    let t = |w: f64| negf::transmission(sys, leads, w).unwrap_or(f64::INFINITY);

    let xs = uniform_grid(lo, hi, REFINE_SCAN + 1);
    let ts: Vec<f64> = xs.iter().map(|&x| t(x)).collect();
    let k = (0..ts.len()).min_by(|&i, &j| ts[i].total_cmp(&ts[j])).unwrap_or(0);
    let (a, b) = (xs[k.saturating_sub(1)], xs[(k + 1).min(REFINE_SCAN)]);
    let mut best = golden_section_min(t, a, b, REFINE_WIDTH);
    for cand in [(xs[k], ts[k]), seed] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    if best.1 < POLISH_LEVEL {
        if let Some(centre) = polish_zero(t, lo, hi, best.0) {
            // A seed sample already this deep sits on the zero itself.
            best = if centre.1 <= seed.1 { centre } else { seed };
        }
    }
    best
}

/// Re-centre a zero on the midpoint of the interval where `T < POLISH_LEVEL`.
/// Golden section alone places an even-order zero only to about `ε^(1/4)`.
fn polish_zero(t: impl Fn(f64) -> f64, lo: f64, hi: f64, inside: f64) -> Option<(f64, f64)> {
    if !(t(lo) > POLISH_LEVEL && t(hi) > POLISH_LEVEL) {
        return None;
    }
    let crossing = |mut outside: f64, mut inside: f64| {
        loop {
            let m = 0.5 * (outside + inside);
            if m == outside || m == inside {
                return m;
            }
            if t(m) > POLISH_LEVEL {
                outside = m;
            } else {
                inside = m;
            }
        }
    };
    let mid = 0.5 * (crossing(lo, inside) + crossing(hi, inside));
    let tm = t(mid);
    (tm < POLISH_LEVEL).then_some((mid, tm))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericZero {
    pub omega: f64,
    /// Transmission at the refined location.
    pub transmission: f64,
    /// `τ` changes sign across the zero (odd order). Even-order zeros, such
    /// as a coalesced pair, carry no π jump.
    pub simple: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroMatch {
    pub numeric: f64,
    pub analytic: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroReport {
    pub numeric_zeros: Vec<NumericZero>,
    /// The closed-form condition, when the coupling pattern has one.
    pub analytic: Option<ZeroCondition>,
    pub matched: Vec<ZeroMatch>,
    pub unmatched_numeric: Vec<f64>,
    /// Analytic antiresonances inside the swept range with no numeric partner.
    pub unmatched_analytic: Vec<f64>,
    /// Grid spacing of the spectrum the report came from.
    pub spacing: f64,
}

/// Greedy nearest-first pairing of two sorted sets under a distance cap.
fn pair_sets(a: &[f64], b: &[f64], cap: f64) -> (Vec<(usize, usize)>, Vec<usize>, Vec<usize>) {
    let mut candidates: Vec<(f64, usize, usize)> = a
        .iter()
        .enumerate()
        .flat_map(|(i, x)| b.iter().enumerate().map(move |(j, y)| ((x - y).abs(), i, j)))
        .filter(|(d, _, _)| *d < cap)
        .collect();
    candidates.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort();
    let rest_a = (0..a.len()).filter(|&i| !used_a[i]).collect();
    let rest_b = (0..b.len()).filter(|&j| !used_b[j]).collect();
    (pairs, rest_a, rest_b)
}

/// Probe distances for the order of a zero.
const ORDER_PROBES: [f64; 5] = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
/// Smallest `|τ|` a probe may see and still have a meaningful phase.
const ORDER_FLOOR: f64 = 1e-13;

/// Whether `τ` changes sign across `omega`. Probes shrink towards the zero so
/// that a resonance lying close by cannot hide the sign change; the first probe
/// pair that shows a π turn decides.
fn odd_order(sys: &DotSystem, leads: &LeadAttachment, omega: f64) -> bool {
    ORDER_PROBES.iter().any(|&eta| {
        let (Ok(a), Ok(b)) = (
            negf::amplitude(sys, leads, omega - eta),
            negf::amplitude(sys, leads, omega + eta),
        ) else {
            return false;
        };
        a.norm() > ORDER_FLOOR
            && b.norm() > ORDER_FLOOR
            && (wrap_angle(b.arg() - a.arg()).abs() - PI).abs() < PHASE_JUMP_TOLERANCE
    })
}

/// Locate transmission zeros in a spectrum and compare them with the
/// closed-form antiresonances.
///
/// Every interior local minimum of the sampled `T` is refined by golden
/// section on its two neighbouring grid intervals; minima whose refined value
/// falls below [`ZERO_THRESHOLD`] are zeros.
pub fn find_zeros(spectrum: &Spectrum) -> ZeroReport {
    let s = &spectrum.samples;
    let spacing = spectrum.spacing();
    let mut numeric_zeros: Vec<NumericZero> = Vec::new();

    for i in 1..s.len().saturating_sub(1) {
        let (prev, here, next) = (&s[i - 1], &s[i], &s[i + 1]);
        if !(here.transmission < prev.transmission && here.transmission <= next.transmission) {
            continue;
        }
        let (omega, t) = refine_minimum(
            spectrum,
            prev.omega,
            next.omega,
            (here.omega, here.transmission),
        );
        if t >= ZERO_THRESHOLD {
            continue;
        }
        if numeric_zeros.iter().any(|z| (z.omega - omega).abs() < 1e-9) {
            continue;
        }
        numeric_zeros.push(NumericZero {
            omega,
            transmission: t,
            simple: odd_order(&spectrum.system, &spectrum.leads, omega),
        });
    }

    let analytic = closedform::analytic_zeros(&spectrum.system, &spectrum.leads);
    let (lo, hi) = spectrum.omega_range();
    let predicted: Vec<f64> = analytic
        .as_ref()
        .map(|z| {
            z.antiresonances()
                .into_iter()
                .filter(|r| *r >= lo && *r <= hi)
                .collect()
        })
        .unwrap_or_default();

    let found: Vec<f64> = numeric_zeros.iter().map(|z| z.omega).collect();
    let (pairs, rest_numeric, rest_analytic) = pair_sets(&found, &predicted, 2.0 * spacing);
    ZeroReport {
        matched: pairs
            .into_iter()
            .map(|(i, j)| ZeroMatch {
                numeric: found[i],
                analytic: predicted[j],
                distance: (found[i] - predicted[j]).abs(),
            })
            .collect(),
        unmatched_numeric: rest_numeric.into_iter().map(|i| found[i]).collect(),
        unmatched_analytic: rest_analytic.into_iter().map(|j| predicted[j]).collect(),
        numeric_zeros,
        analytic,
        spacing,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseJump {
    /// Transmission minimum inside the interval where the jump happened.
    pub omega: f64,
    /// Signed change of the wrapped phase across the interval, ≈ ±π.
    pub jump: f64,
    pub interval: (f64, f64),
}

/// Sub-intervals per subdivision step of an under-resolved grid interval.
const SUBDIVISIONS: usize = 8;
/// Width below which a sub-interval is judged as it stands.
const MIN_SUBINTERVAL: f64 = 1e-9;

/// Intervals across which the wrapped phase of `τ` changes by π (within
/// [`PHASE_JUMP_TOLERANCE`]).
///
/// Samples whose transmission is below [`ZERO_THRESHOLD`] have no usable
/// phase and are stepped over, so a zero landing on a grid point is still
/// seen as one jump between its neighbours. A grid step whose phase turns by
/// π/2 or more is under-resolved; it is subdivided until every step either
/// turns by less than π/2 or has shrunk to [`MIN_SUBINTERVAL`], and only the
/// surviving steps are tested for a π jump.
pub fn detect_phase_jumps(spectrum: &Spectrum) -> Vec<PhaseJump> {
    let (sys, leads) = (&spectrum.system, &spectrum.leads);
    let defined: Vec<&Sample> = spectrum
        .samples
        .iter()
        .filter(|s| s.transmission >= ZERO_THRESHOLD)
        .collect();
    let mut jumps = Vec::new();
    for pair in defined.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mut steps = Vec::new();
        resolve_steps(sys, leads, (a.omega, a.tau), (b.omega, b.tau), &mut steps);
        for (lo, hi, jump) in steps {
            let t = |w: f64| negf::transmission(sys, leads, w).unwrap_or(f64::INFINITY);
            let (t_lo, t_hi) = (t(lo), t(hi));
            let seed = if t_lo <= t_hi { (lo, t_lo) } else { (hi, t_hi) };
            let (omega, _) = refine_minimum(spectrum, lo, hi, seed);
            jumps.push(PhaseJump {
                omega,
                jump,
                interval: (a.omega, b.omega),
            });
        }
    }
    jumps
}

fn resolve_steps(
    sys: &DotSystem,
    leads: &LeadAttachment,
    a: (f64, Complex64),
    b: (f64, Complex64),
    out: &mut Vec<(f64, f64, f64)>,
) {
    let turn = wrap_angle(b.1.arg() - a.1.arg());
    if turn.abs() < FRAC_PI_2 {
        return;
    }
    let judge = |out: &mut Vec<(f64, f64, f64)>| {
        if (turn.abs() - PI).abs() < PHASE_JUMP_TOLERANCE {
            out.push((a.0, b.0, turn));
        }
    };
    if b.0 - a.0 <= MIN_SUBINTERVAL {
        return judge(out);
    }
    let xs = uniform_grid(a.0, b.0, SUBDIVISIONS + 1);
    let mut points = vec![a];
    for &x in &xs[1..SUBDIVISIONS] {
        if let Ok(p) = negf::evaluate(sys, leads, x) {
            if p.transmission >= ZERO_THRESHOLD {
                points.push((x, p.tau));
            }
        }
    }
    if points.len() == 1 {
        return judge(out);
    }
    points.push(b);
    for w in points.windows(2) {
        resolve_steps(sys, leads, w[0], w[1], out);
    }
}

/// Pairing of π jumps with simple numeric zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Coincidence {
    pub pairs: Vec<(PhaseJump, NumericZero)>,
    pub unpaired_jumps: Vec<PhaseJump>,
    /// Simple zeros with no jump nearby.
    pub unpaired_zeros: Vec<NumericZero>,
}

impl Coincidence {
    pub fn is_exact(&self) -> bool {
        self.unpaired_jumps.is_empty() && self.unpaired_zeros.is_empty()
    }
}

/// Pair detected π jumps with the simple zeros of a report, within
/// `max_distance`. Even-order zeros are left out; they carry no jump.
pub fn phase_zero_coincidence(
    jumps: &[PhaseJump],
    report: &ZeroReport,
    max_distance: f64,
) -> Coincidence {
    let simple: Vec<NumericZero> = report.numeric_zeros.iter().copied().filter(|z| z.simple).collect();
    let a: Vec<f64> = jumps.iter().map(|j| j.omega).collect();
    let b: Vec<f64> = simple.iter().map(|z| z.omega).collect();
    let (pairs, rest_a, rest_b) = pair_sets(&a, &b, max_distance);
    Coincidence {
        pairs: pairs.into_iter().map(|(i, j)| (jumps[i], simple[j])).collect(),
        unpaired_jumps: rest_a.into_iter().map(|i| jumps[i]).collect(),
        unpaired_zeros: rest_b.into_iter().map(|j| simple[j]).collect(),
    }
}
