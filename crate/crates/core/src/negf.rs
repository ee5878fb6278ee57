//! Retarded Green function of the open molecule and the Landauer transmission.
//!
//! `[Gʳ]⁻¹ = ω - H_c - Σ_L - Σ_R` is assembled entry by entry and inverted
//! directly. `T = Tr[Γ^L Gᵃ Γ^R Gʳ]` with `Gᵃ = (Gʳ)†`. Both broadenings are
//! rank one, so `T = |τ|²` with `τ = 2 ρ0 v_Lᵀ Gʳ v_R`, and that is what gets
//! computed; [`trace_transmission`] evaluates the trace itself.

use num_complex::Complex64;
use thiserror::Error;

use crate::leads::{self, OutOfBand, SurfaceGreen};
use crate::linalg::{Mat3, ZERO};
use crate::model::{DotSystem, LeadAttachment};

/// Relative determinant threshold below which `[Gʳ]⁻¹` is treated as singular.
pub const SINGULAR_DET_THRESHOLD: f64 = 1e-12;

/// Offset used to take the two-sided limit at a singular energy.
pub const SINGULAR_OFFSET: f64 = 1e-8;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum NegfError {
    #[error(transparent)]
    OutOfBand(#[from] OutOfBand),
    /// A molecular state decoupled from both leads sits exactly at this energy.
    #[error("inverse Green matrix is singular at omega = {omega} (|det| = {det_abs:e})")]
    SingularPoint { omega: f64, det_abs: f64 },
}

/// Retarded Green matrix at one energy, plus the lead matrices used to build it.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenResult {
    pub omega: f64,
    pub surface: SurfaceGreen,
    pub retarded: Mat3,
    pub sigma_left: Mat3,
    pub sigma_right: Mat3,
    pub gamma_left: Mat3,
    pub gamma_right: Mat3,
    /// Determinant of `[Gʳ]⁻¹`.
    pub det_inverse: Complex64,
}

impl GreenResult {
    pub fn advanced(&self) -> Mat3 {
        self.retarded.adjoint()
    }
}

/// Everything the spectra layer records at one energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointEvaluation {
    pub omega: f64,
    /// Trace-formula transmission.
    pub transmission: f64,
    pub tau: Complex64,
    /// `τ_jl = 2 ρ0 v_L,j Gʳ_jl v_R,l`.
    pub paths: Mat3,
    /// The energy hit a decoupled state; values are two-sided limits.
    pub singular: bool,
}

fn lead_terms(
    leads: &LeadAttachment,
    omega: f64,
) -> Result<(SurfaceGreen, Mat3, Mat3), OutOfBand> {
    let g = leads::surface_green(omega, leads.t0())?;
    let sigma_l = leads::self_energy(leads.left(), &g);
    let sigma_r = leads::self_energy(leads.right(), &g);
    Ok((g, sigma_l, sigma_r))
}

/// `z I - H_c - Σ_L - Σ_R` at `z = ω`.
pub fn assemble_inverse_green(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<Mat3, OutOfBand> {
    let (_, sigma_l, sigma_r) = lead_terms(leads, omega)?;
    Ok(inverse_green_from(sys, omega, &sigma_l, &sigma_r))
}

fn inverse_green_from(sys: &DotSystem, omega: f64, sigma_l: &Mat3, sigma_r: &Mat3) -> Mat3 {
    let h = sys.hamiltonian();
    let z = Complex64::new(omega, 0.0);
    let mut m = Mat3::zeros();
    for j in 0..3 {
        for l in 0..3 {
            let diag = if j == l { z } else { ZERO };
            m[(j, l)] = diag - h[(j, l)] - sigma_l[(j, l)] - sigma_r[(j, l)];
        }
    }
    m
}

fn singular_scale(sys: &DotSystem, omega: f64) -> f64 {
    1f64.max(omega.abs()).max(sys.hamiltonian().norm())
}

pub fn green_retarded(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<GreenResult, NegfError> {
    let (surface, sigma_left, sigma_right) = lead_terms(leads, omega)?;
    let inv = inverse_green_from(sys, omega, &sigma_left, &sigma_right);
    let (det, retarded) = inv.det_and_inverse();
    let threshold = SINGULAR_DET_THRESHOLD * singular_scale(sys, omega).powi(3);
    let retarded = match retarded {
        Some(g) if det.norm() >= threshold => g,
        _ => {
            return Err(NegfError::SingularPoint {
                omega,
                det_abs: det.norm(),
            })
        }
    };
    Ok(GreenResult {
        omega,
        surface,
        retarded,
        gamma_left: leads::broadening(&sigma_left),
        gamma_right: leads::broadening(&sigma_right),
        sigma_left,
        sigma_right,
        det_inverse: det,
    })
}

/// `Tr[Γ^L Gᵃ Γ^R Gʳ]` for an already inverted point.
pub fn trace_transmission(g: &GreenResult) -> f64 {
    let prod = g.gamma_left * g.advanced() * g.gamma_right * g.retarded;
    prod.trace().re.max(0.0)
}

fn paths_from(g: &GreenResult, leads: &LeadAttachment) -> Mat3 {
    let (vl, vr) = (leads.left(), leads.right());
    let mut paths = Mat3::zeros();
    for j in 0..3 {
        for l in 0..3 {
            paths[(j, l)] = g.retarded[(j, l)] * (2.0 * g.surface.rho0 * vl[j] * vr[l]);
        }
    }
    paths
}

/// `τ_t = Σ_jl τ_jl`, summed row by row.
pub fn path_sum(paths: &Mat3) -> Complex64 {
    paths.0.iter().flatten().sum()
}

fn evaluate_regular(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<PointEvaluation, NegfError> {
    let g = green_retarded(sys, leads, omega)?;
    let paths = paths_from(&g, leads);
    let tau = path_sum(&paths);
    Ok(PointEvaluation {
        omega,
        // Γ is rank one, so the trace equals |τ|²; the trace loses digits
        // to cancellation near antiresonances next to a resonance.
        transmission: tau.norm_sqr(),
        tau,
        paths,
        singular: false,
    })
}

/// Transmission, amplitude and path amplitudes at one energy.
///
/// At a singular point the two neighbours `ω ± 1e-8` are evaluated and
/// averaged; the result is flagged `singular`. Near a band edge only the
/// inward neighbour is used.
pub fn evaluate(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<PointEvaluation, OutOfBand> {
    match evaluate_regular(sys, leads, omega) {
        Ok(p) => Ok(p),
        Err(NegfError::OutOfBand(e)) => Err(e),
        Err(NegfError::SingularPoint { .. }) => {
            let mut sides = Vec::with_capacity(2);
            for h in [-SINGULAR_OFFSET, SINGULAR_OFFSET] {
                // Offsets that leave the band or land on another singular
                // point are skipped; the surviving side carries the limit.
                if let Ok(p) = evaluate_regular(sys, leads, omega + h) {
                    sides.push(p);
                }
            }
            if sides.is_empty() {
                // Give up on a limit and report the closed-system value 0.
                return Ok(PointEvaluation {
                    omega,
                    transmission: 0.0,
                    tau: ZERO,
                    paths: Mat3::zeros(),
                    singular: true,
                });
            }
            let n = sides.len() as f64;
            let transmission = sides.iter().map(|p| p.transmission).sum::<f64>() / n;
            let paths = sides
                .iter()
                .fold(Mat3::zeros(), |acc, p| acc + p.paths)
                .scale(Complex64::new(1.0 / n, 0.0));
            let tau = path_sum(&paths);
            Ok(PointEvaluation {
                omega,
                transmission,
                tau,
                paths,
                singular: true,
            })
        }
    }
}

pub fn transmission(sys: &DotSystem, leads: &LeadAttachment, omega: f64) -> Result<f64, OutOfBand> {
    evaluate(sys, leads, omega).map(|p| p.transmission)
}

/// `τ = 2 ρ0 v_Lᵀ Gʳ v_R`, normalised so that `|τ|² = T`.
pub fn amplitude(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<Complex64, OutOfBand> {
    evaluate(sys, leads, omega).map(|p| p.tau)
}

/// Matrix of the nine dot-to-dot path amplitudes; their sum is [`amplitude`].
pub fn path_decomposition(
    sys: &DotSystem,
    leads: &LeadAttachment,
    omega: f64,
) -> Result<Mat3, OutOfBand> {
    evaluate(sys, leads, omega).map(|p| p.paths)
}
