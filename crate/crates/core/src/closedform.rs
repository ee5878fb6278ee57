//! Closed-form transmission amplitudes and antiresonance conditions for the
//! mirror-symmetric coupling pattern `v_L = v_R = (v1, v2, v1)`.
//!
//! With `u = ω - E0`, `δ = E2 - E0` and `Γ_n = v_n² ρ0`, the amplitude is a
//! ratio whose numerator
//!
//! ```text
//! 2Γ1 (ω - E2)(u + t3) + Γ2 (u² + γ² - t3²) + 4 sqrt(Γ1 Γ2)(u + t3) tc
//! ```
//!
//! is quadratic in `ω`, and whose denominator is `det(ω - H_c - Σ)` written
//! out by cofactors. Setting `t3 = 0` gives the chain.
//!
//! Dividing the numerator by `Γ1` and writing `x = Γ2/Γ1` gives
//! `(2+x) u² + 2B u + C = 0` with `B = t3 - δ + 2 sqrt(x) tc` and
//! `C = x(γ² - t3²) - 2 t3 (δ - 2 sqrt(x) tc)`, so the zeros are
//! `ω = E0 - (B ∓ sqrt(Δ)) / (2+x)` with `Δ = B² - (2+x) C`.
//!
//! A numerator root is only a transmission zero if the closed molecule has no
//! decoupled eigenstate there: at such an energy `det(ω - H_c)` vanishes too
//! and the two zeros cancel. Those roots are kept in
//! [`ZeroCondition::decoupled`].

use num_complex::Complex64;
use thiserror::Error;

use crate::leads::{self, OutOfBand};
use crate::model::{DotSystem, Geometry, LeadAttachment};

/// Ratio between the negf amplitude `2 ρ0 v_Lᵀ Gʳ v_R` and the bare
/// closed-form ratio built from `Γ_n = v_n² ρ0`. Fixed by calibration against
/// the trace formula (see the `calibrated_constant_is_two` test).
pub const AMPLITUDE_CONSTANT: f64 = 2.0;

/// Discriminants this small relative to the quadratic's terms count as zero.
const DEGENERATE_TOLERANCE: f64 = 1e-12;
/// Relative tolerance for deciding that `det(ω - H_c)` vanishes at a root.
const DECOUPLING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum ClosedFormError {
    #[error(transparent)]
    OutOfBand(#[from] OutOfBand),
    #[error("closed forms need both leads coupled as (v1, v2, v1)")]
    NotSymmetricPattern,
    #[error("chain closed form requested for a system with t3 = {0}")]
    NotAChain(f64),
    #[error("v1 = 0 makes x = v2²/v1² infinite; use zeros_limit")]
    TerminalCouplingZero,
}

/// Outcome of solving the antiresonance condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCondition {
    /// `Γ2 / Γ1 = v2² / v1²`; `+∞` for the `v1 = 0` limit.
    pub x: f64,
    /// `E2 - E0`.
    pub delta: f64,
    /// Discriminant of the (normalised) numerator quadratic.
    pub discriminant: f64,
    /// Real numerator roots in ascending order; empty iff `Δ < 0`.
    pub roots: Vec<f64>,
    /// `Δ = 0`: a single double root.
    pub degenerate: bool,
    /// Roots cancelled by a decoupled molecular state (no transmission zero).
    pub decoupled: Vec<f64>,
}

impl ZeroCondition {
    /// Roots at which the transmission actually vanishes.
    pub fn antiresonances(&self) -> Vec<f64> {
        self.roots
            .iter()
            .copied()
            .filter(|r| !self.decoupled.contains(r))
            .collect()
    }
}

/// Which coupling vanishes in a limiting case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitCase {
    /// Only the middle dot is attached.
    V1Zero,
    /// Only the terminal dots are attached.
    V2Zero,
}

/// Scalar parameters entering the zero conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroParams {
    pub v1: f64,
    pub v2: f64,
    pub e0: f64,
    pub e2: f64,
    pub tc: f64,
    pub t3: f64,
    pub gamma: f64,
}

impl ZeroParams {
    pub fn from_system(sys: &DotSystem, leads: &LeadAttachment) -> Option<Self> {
        let (v1, v2) = leads.symmetric_pattern()?;
        Some(ZeroParams {
            v1,
            v2,
            e0: sys.e0(),
            e2: sys.e2(),
            tc: sys.tc(),
            t3: sys.t3(),
            gamma: sys.gamma(),
        })
    }

    fn delta(&self) -> f64 {
        self.e2 - self.e0
    }
}

fn amplitude_terms(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
    t3: f64,
) -> Result<Complex64, ClosedFormError> {
    let (v1, v2) = leads
        .symmetric_pattern()
        .ok_or(ClosedFormError::NotSymmetricPattern)?;
    let g = leads::surface_green(omega, leads.t0())?;
    let (e0, e2, gamma, tc) = (sys.e0(), sys.e2(), sys.gamma(), sys.tc());
    let u = omega - e0;

    let gamma1 = leads::dot_width(v1, &g);
    let gamma2 = leads::dot_width(v2, &g);
    let cross = v1 * v2 * g.rho0;
    let numerator = 2.0 * gamma1 * (omega - e2) * (u + t3)
        + gamma2 * (u * u + gamma * gamma - t3 * t3)
        + 4.0 * cross * (u + t3) * tc;

    // Σ = Σ_L + Σ_R = 2 g0 v vᵀ for identical leads.
    let v = [v1, v2, v1];
    let sigma = |j: usize, l: usize| g.g0 * (2.0 * v[j] * v[l]);
    let z = Complex64::new(omega, 0.0);
    let d1 = z - Complex64::new(e0, -gamma) - sigma(0, 0);
    let d2 = z - e2 - sigma(1, 1);
    let d3 = z - Complex64::new(e0, gamma) - sigma(2, 2);
    let o12 = tc + sigma(0, 1);
    let o23 = tc + sigma(1, 2);
    let o13 = t3 + sigma(0, 2);
    let denominator =
        d1 * d2 * d3 - 2.0 * o12 * o23 * o13 - o12 * o12 * d3 - o13 * o13 * d2 - o23 * o23 * d1;

    Ok(numerator * AMPLITUDE_CONSTANT / denominator)
}

/// Chain amplitude (`t3 = 0`).
pub fn tau_chain(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<Complex64, ClosedFormError> {
    if sys.t3() != 0.0 {
        return Err(ClosedFormError::NotAChain(sys.t3()));
    }
    amplitude_terms(sys, leads, omega, 0.0)
}

/// Ring amplitude; reduces to [`tau_chain`] as `t3 → 0`.
pub fn tau_ring(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<Complex64, ClosedFormError> {
    amplitude_terms(sys, leads, omega, sys.t3())
}

/// The simplified amplitudes for a vanishing coupling, in their factored
/// continued-fraction form. The coupling that is not zero is read from `leads`.
///
/// * `V1Zero`: `Γ2 / (ω - E2 - Σ22 - 2 (u + t3) tc² / (u² + γ² - t3²))`
/// * `V2Zero`: `2Γ1 (ω - E2)(u + t3) / (D' (ω - E2) - 2 tc² (u + t3))`
///   with `D' = u² + γ² - t3² - (Σ11 + Σ33)(u + t3)`
pub fn tau_limit(
    case: LimitCase,
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<Complex64, ClosedFormError> {
    let (v1, v2) = leads
        .symmetric_pattern()
        .ok_or(ClosedFormError::NotSymmetricPattern)?;
    let g = leads::surface_green(omega, leads.t0())?;
    let (e2, gamma, tc, t3) = (sys.e2(), sys.gamma(), sys.tc(), sys.t3());
    let u = omega - sys.e0();
    let bare = u * u + gamma * gamma - t3 * t3;
    let tau = match case {
        LimitCase::V1Zero => {
            let sigma22 = g.g0 * (2.0 * v2 * v2);
            let gamma2 = leads::dot_width(v2, &g);
            gamma2 / (omega - e2 - sigma22 - 2.0 * tc * tc * (u + t3) / bare)
        }
        LimitCase::V2Zero => {
            let sigma_sum = g.g0 * (4.0 * v1 * v1);
            let gamma1 = leads::dot_width(v1, &g);
            let d_prime = bare - sigma_sum * (u + t3);
            2.0 * gamma1 * (omega - e2) * (u + t3)
                / (d_prime * (omega - e2) - 2.0 * tc * tc * (u + t3))
        }
    };
    Ok(tau * AMPLITUDE_CONSTANT)
}

/// Characteristic polynomial `det(ω - H_c)` of the PT-symmetric molecule
/// and its derivative, in `u = ω - E0`. Real for real `u`.
fn closed_determinant(p: &ZeroParams, u: f64) -> (f64, f64) {
    let d = p.delta();
    let bare = u * u + p.gamma * p.gamma - p.t3 * p.t3;
    let value = (u - d) * bare - 2.0 * p.tc * p.tc * (u + p.t3);
    let slope = bare + 2.0 * u * (u - d) - 2.0 * p.tc * p.tc;
    (value, slope)
}

/// Solve `a u² + 2 b u + c = 0` and classify each root against the
/// decoupled states of the molecule.
fn solve_numerator(p: &ZeroParams, x: f64, a: f64, b: f64, c: f64) -> ZeroCondition {
    let raw = b * b - a * c;
    let scale = (b * b).max((a * c).abs()).max(f64::MIN_POSITIVE);
    let degenerate = raw.abs() <= DEGENERATE_TOLERANCE * scale;
    let discriminant = if degenerate { 0.0 } else { raw };

    let mut roots = if degenerate {
        vec![p.e0 - b / a]
    } else if discriminant > 0.0 {
        let s = discriminant.sqrt();
        vec![p.e0 - (b + s) / a, p.e0 - (b - s) / a]
    } else {
        Vec::new()
    };
    roots.sort_by(f64::total_cmp);

    let numerator_multiplicity = if degenerate { 2 } else { 1 };
    let param_scale = [p.e0, p.e2, p.tc, p.t3, p.gamma]
        .iter()
        .fold(1f64, |m, v| m.max(v.abs()));
    let decoupled = roots
        .iter()
        .copied()
        .filter(|&r| {
            let u = r - p.e0;
            let s = param_scale.max(u.abs());
            let (value, slope) = closed_determinant(p, u);
            let mut pole_multiplicity = 0;
            if value.abs() <= DECOUPLING_TOLERANCE * s.powi(3) {
                pole_multiplicity = 1;
                if slope.abs() <= DECOUPLING_TOLERANCE * s.powi(2) {
                    pole_multiplicity = 2;
                }
            }
            pole_multiplicity >= numerator_multiplicity
        })
        .collect();

    ZeroCondition {
        x,
        delta: p.delta(),
        discriminant,
        roots,
        degenerate,
        decoupled,
    }
}

fn zeros_general(p: &ZeroParams) -> Result<ZeroCondition, ClosedFormError> {
    if p.v1 == 0.0 {
        return Err(ClosedFormError::TerminalCouplingZero);
    }
    let sqrt_x = p.v2 / p.v1;
    let x = sqrt_x * sqrt_x;
    let d = p.delta();
    let b = p.t3 - d + 2.0 * sqrt_x * p.tc;
    let c = x * (p.gamma * p.gamma - p.t3 * p.t3) - 2.0 * p.t3 * (d - 2.0 * sqrt_x * p.tc);
    Ok(solve_numerator(p, x, 2.0 + x, b, c))
}

/// Antiresonance condition of the chain. For the chain
/// `Δ = (δ - 2 sqrt(x) tc)² - x (x + 2) γ²`.
pub fn zeros_chain(
    v1: f64,
    v2: f64,
    e0: f64,
    e2: f64,
    tc: f64,
    gamma: f64,
) -> Result<ZeroCondition, ClosedFormError> {
    zeros_general(&ZeroParams {
        v1,
        v2,
        e0,
        e2,
        tc,
        t3: 0.0,
        gamma,
    })
}

/// Antiresonance condition of the ring,
/// `Δ = (t3 - δ + 2 sqrt(x) tc)² - (x + 2)[x (γ² - t3²) - 2 t3 (δ - 2 sqrt(x) tc)]`.
pub fn zeros_ring(
    v1: f64,
    v2: f64,
    e0: f64,
    e2: f64,
    tc: f64,
    t3: f64,
    gamma: f64,
) -> Result<ZeroCondition, ClosedFormError> {
    zeros_general(&ZeroParams {
        v1,
        v2,
        e0,
        e2,
        tc,
        t3,
        gamma,
    })
}

/// Zero conditions with one coupling switched off. The coupling named by
/// `case` is ignored; `t3` is forced to zero for the chain.
///
/// | case | antiresonances |
/// |---|---|
/// | chain, `v1 = 0` | `{E0}` if `γ = 0`, else none |
/// | chain, `v2 = 0` | `{E2}` if `γ = 0`, else `{E0, E2}` |
/// | ring, `v1 = 0` | `E0 ± sqrt(t3² - γ²)` for `0 < γ < t3`, `{E0}` at `γ = t3`, `{E0 + t3}` at `γ = 0` |
/// | ring, `v2 = 0` | `{E2}` if `γ = 0`, else `{E0 - t3, E2}` |
pub fn zeros_limit(geometry: Geometry, case: LimitCase, params: &ZeroParams) -> ZeroCondition {
    let mut p = *params;
    if geometry == Geometry::Chain {
        p.t3 = 0.0;
    }
    let (t3, d) = (p.t3, p.delta());
    match case {
        // numerator ∝ u² + γ² - t3²
        LimitCase::V1Zero => solve_numerator(&p, f64::INFINITY, 1.0, 0.0, p.gamma * p.gamma - t3 * t3),
        // numerator ∝ (u - δ)(u + t3) = u² + (t3 - δ) u - δ t3
        LimitCase::V2Zero => solve_numerator(&p, 0.0, 1.0, 0.5 * (t3 - d), -d * t3),
    }
}

/// The zero condition that applies to a system, if its leads follow the
/// symmetric pattern and at least one coupling is nonzero.
pub fn analytic_zeros(sys: &DotSystem, leads: &LeadAttachment) -> Option<ZeroCondition> {
    let p = ZeroParams::from_system(sys, leads)?;
    match (p.v1 == 0.0, p.v2 == 0.0) {
        (true, true) => None,
        (true, false) => Some(zeros_limit(sys.geometry(), LimitCase::V1Zero, &p)),
        (false, true) => Some(zeros_limit(sys.geometry(), LimitCase::V2Zero, &p)),
        (false, false) => zeros_general(&p).ok(),
    }
}
