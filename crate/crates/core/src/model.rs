//! The central triple-dot molecule and its couplings to the two leads.
//!
//! Dot 1 carries the loss level `E0 - iγ`, dot 3 the gain level `E0 + iγ`,
//! dot 2 sits at the real level `E2`. Nearest neighbours are joined by `tc`,
//! and the ring closes with the dot 1 ↔ dot 3 hopping `t3`.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::Mat3;

/// Absolute tolerance of the PT check.
pub const PT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("lead hopping t0 must be positive and finite, got {0}")]
    NonPositiveLeadHopping(f64),
    #[error("hopping H[{row}][{col}] = {value} is not real")]
    ComplexHopping {
        row: usize,
        col: usize,
        value: Complex64,
    },
    #[error("hopping H[{row}][{col}] differs from its transpose partner")]
    AsymmetricHopping { row: usize, col: usize },
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Chain,
    Ring,
}

impl Geometry {
    pub fn as_str(self) -> &'static str {
        match self {
            Geometry::Chain => "chain",
            Geometry::Ring => "ring",
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "chain" => Ok(Geometry::Chain),
            "ring" => Ok(Geometry::Ring),
            other => Err(format!("unknown geometry `{other}` (expected chain or ring)")),
        }
    }
}

/// Closed Hamiltonian of the three dots. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct DotSystem {
    geometry: Geometry,
    e0: f64,
    gamma: f64,
    e2: f64,
    tc: f64,
    t3: f64,
    hamiltonian: Mat3,
}

/// Triple-dot chain: `t3 = 0`, levels `(E0 - iγ, E2, E0 + iγ)`.
pub fn build_chain(e0: f64, gamma: f64, e2: f64, tc: f64) -> DotSystem {
    DotSystem::new(Geometry::Chain, e0, gamma, e2, tc, 0.0)
}

/// Triple-dot ring: as [`build_chain`] plus the dot 1 ↔ dot 3 hopping `t3`.
pub fn build_ring(e0: f64, gamma: f64, e2: f64, tc: f64, t3: f64) -> DotSystem {
    DotSystem::new(Geometry::Ring, e0, gamma, e2, tc, t3)
}

impl DotSystem {
    fn new(geometry: Geometry, e0: f64, gamma: f64, e2: f64, tc: f64, t3: f64) -> Self {
        let levels = [
            Complex64::new(e0, -gamma),
            Complex64::new(e2, 0.0),
            Complex64::new(e0, gamma),
        ];
        let mut h = Mat3::diagonal(levels);
        let tc_c = Complex64::new(tc, 0.0);
        let t3_c = Complex64::new(t3, 0.0);
        h[(0, 1)] = tc_c;
        h[(1, 0)] = tc_c;
        h[(1, 2)] = tc_c;
        h[(2, 1)] = tc_c;
        h[(0, 2)] = t3_c;
        h[(2, 0)] = t3_c;
        DotSystem {
            geometry,
            e0,
            gamma,
            e2,
            tc,
            t3,
            hamiltonian: h,
        }
    }

    /// Wrap an arbitrary central Hamiltonian. Hoppings must be real and
    /// symmetric; the on-site levels may be any complex numbers, so this is
    /// the way to build deliberately PT-broken systems.
    ///
    /// The scalar parameters are read back from the matrix: `E0` and `γ` from
    /// the mean and antisymmetric imaginary part of the terminal levels, `tc`
    /// as the mean of the two nearest-neighbour hoppings.
    pub fn from_hamiltonian(h: Mat3) -> Result<Self, ModelError> {
        if h.0.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ModelError::NonFinite("hamiltonian"));
        }
        for (row, col) in [(0, 1), (1, 2), (0, 2)] {
            let a = h[(row, col)];
            let b = h[(col, row)];
            if a.im != 0.0 {
                return Err(ModelError::ComplexHopping { row, col, value: a });
            }
            if b.im != 0.0 {
                return Err(ModelError::ComplexHopping {
                    row: col,
                    col: row,
                    value: b,
                });
            }
            if a.re != b.re {
                return Err(ModelError::AsymmetricHopping { row, col });
            }
        }
        let t3 = h[(0, 2)].re;
        Ok(DotSystem {
            geometry: if t3 == 0.0 {
                Geometry::Chain
            } else {
                Geometry::Ring
            },
            e0: 0.5 * (h[(0, 0)].re + h[(2, 2)].re),
            gamma: 0.5 * (h[(2, 2)].im - h[(0, 0)].im),
            e2: h[(1, 1)].re,
            tc: 0.5 * (h[(0, 1)].re + h[(1, 2)].re),
            t3,
            hamiltonian: h,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn e2(&self) -> f64 {
        self.e2
    }

    /// Detuning of the middle dot, `E2 - E0`.
    pub fn delta(&self) -> f64 {
        self.e2 - self.e0
    }

    pub fn tc(&self) -> f64 {
        self.tc
    }

    pub fn t3(&self) -> f64 {
        self.t3
    }

    pub fn hamiltonian(&self) -> &Mat3 {
        &self.hamiltonian
    }

    pub fn is_hermitian(&self) -> bool {
        self.hamiltonian.max_abs_diff(&self.hamiltonian.adjoint()) == 0.0
    }

    /// Same molecule with a different gain/loss strength.
    pub fn with_gamma(&self, gamma: f64) -> Self {
        DotSystem::new(self.geometry, self.e0, gamma, self.e2, self.tc, self.t3)
    }
}

/// Couplings of the molecule to the left and right leads.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadAttachment {
    t0: f64,
    left: [f64; 3],
    right: [f64; 3],
}

impl LeadAttachment {
    pub fn new(t0: f64, left: [f64; 3], right: [f64; 3]) -> Result<Self, ModelError> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(ModelError::NonPositiveLeadHopping(t0));
        }
        if left.iter().chain(right.iter()).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("dot-lead coupling"));
        }
        Ok(LeadAttachment { t0, left, right })
    }

    /// Both leads couple as `(v1, v2, v1)`.
    pub fn symmetric(t0: f64, v1: f64, v2: f64) -> Result<Self, ModelError> {
        Self::new(t0, [v1, v2, v1], [v1, v2, v1])
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn left(&self) -> &[f64; 3] {
        &self.left
    }

    pub fn right(&self) -> &[f64; 3] {
        &self.right
    }

    /// Leads exchanged.
    pub fn swapped(&self) -> Self {
        LeadAttachment {
            t0: self.t0,
            left: self.right,
            right: self.left,
        }
    }

    /// `(v1, v2)` when both leads use the mirror-symmetric pattern `(v1, v2, v1)`.
    pub fn symmetric_pattern(&self) -> Option<(f64, f64)> {
        let [a, b, c] = self.left;
        (a == c && self.left == self.right).then_some((a, b))
    }
}

/// PT invariance of the whole open system: `P conj(H) P = H` for the site
/// mirror `P`, and the right-lead couplings are the mirror of the left ones.
pub fn check_pt_symmetry(sys: &DotSystem, leads: &LeadAttachment) -> bool {
    let h = sys.hamiltonian();
    let hamiltonian_ok = h.conj().mirrored().max_abs_diff(h) <= PT_TOLERANCE;
    let (l, r) = (leads.left(), leads.right());
    let couplings_ok = (0..3).all(|j| (l[j] - r[2 - j]).abs() <= PT_TOLERANCE);
    hamiltonian_ok && couplings_ok
}
