//! Semi-infinite uniform tight-binding leads.
//!
//! The end-site Green function of a half-infinite chain with hopping `t0` is
//! known in closed form inside the band `|ω| < 2 t0`:
//!
//! ```text
//! g0 = ω / (2 t0²) - i ρ0,    ρ0 = sqrt(4 t0² - ω²) / (2 t0²)
//! ```
//!
//! A lead attached through the coupling vector `v` then adds the rank-one
//! self-energy `Σ = g0 v vᵀ` to the molecule, with broadening `Γ = 2 ρ0 v vᵀ`.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{Mat3, I};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("energy {omega} lies outside the open lead band (-{band_edge}, {band_edge})")]
pub struct OutOfBand {
    pub omega: f64,
    pub band_edge: f64,
}

/// End-site Green function of one lead at a single in-band energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceGreen {
    pub omega: f64,
    pub g0: Complex64,
    pub rho0: f64,
}

/// Rejects energies on or outside the band edges `±2 t0`.
pub fn check_in_band(omega: f64, t0: f64) -> Result<(), OutOfBand> {
    let band_edge = 2.0 * t0;
    if omega.is_finite() && omega.abs() < band_edge {
        Ok(())
    } else {
        Err(OutOfBand { omega, band_edge })
    }
}

pub fn surface_green(omega: f64, t0: f64) -> Result<SurfaceGreen, OutOfBand> {
    check_in_band(omega, t0)?;
    let t0_sq = t0 * t0;
    let rho0 = (4.0 * t0_sq - omega * omega).sqrt() / (2.0 * t0_sq);
    Ok(SurfaceGreen {
        omega,
        g0: Complex64::new(omega / (2.0 * t0_sq), -rho0),
        rho0,
    })
}

/// `Σ[j][l] = v_j v_l g0` for a real coupling vector.
pub fn self_energy(coupling: &[f64; 3], g: &SurfaceGreen) -> Mat3 {
    Mat3::outer(coupling, coupling).scale(g.g0)
}

/// `Γ = i (Σ - Σ†)`.
pub fn broadening(sigma: &Mat3) -> Mat3 {
    (*sigma - sigma.adjoint()).scale(I)
}

/// Scalar width `v² ρ0` of a single dot-lead bond, as used by the closed forms.
pub fn dot_width(v: f64, g: &SurfaceGreen) -> f64 {
    v * v * g.rho0
}
