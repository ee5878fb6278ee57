//! Fixed-size 3×3 complex matrices.
//!
//! Everything in this crate lives on the three-site scattering region, so a
//! stack-allocated array type is enough; no BLAS/LAPACK backend is pulled in.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense 3×3 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[Complex64; 3]; 3]);

impl Default for Mat3 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl Mat3 {
    pub fn zeros() -> Self {
        Mat3([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diagonal([ONE; 3])
    }

    pub fn diagonal(d: [Complex64; 3]) -> Self {
        let mut m = Self::zeros();
        for (k, v) in d.into_iter().enumerate() {
            m.0[k][k] = v;
        }
        m
    }

    /// Real outer product `a bᵀ`.
    pub fn outer(a: &[f64; 3], b: &[f64; 3]) -> Self {
        let mut m = Self::zeros();
        for j in 0..3 {
            for l in 0..3 {
                m.0[j][l] = Complex64::new(a[j] * b[l], 0.0);
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z = f(*z));
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for j in 0..3 {
            for l in 0..3 {
                m.0[l][j] = self.0[j][l];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Bilinear form `aᵀ M b` (no conjugation).
    pub fn bilinear(&self, a: &[f64; 3], b: &[f64; 3]) -> Complex64 {
        let mut acc = ZERO;
        for j in 0..3 {
            for l in 0..3 {
                acc += self.0[j][l] * (a[j] * b[l]);
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Complex64; 3]) -> [Complex64; 3] {
        let mut out = [ZERO; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|l| self.0[j][l] * v[l]).sum();
        }
        out
    }

    /// Anti-diagonal conjugation `P M P` with `P` the site mirror `l ↔ 2 - l`.
    pub fn mirrored(&self) -> Self {
        let mut m = Self::zeros();
        for j in 0..3 {
            for l in 0..3 {
                m.0[j][l] = self.0[2 - j][2 - l];
            }
        }
        m
    }

    /// LU factorisation with partial pivoting. Returns the determinant and
    /// the inverse, or `None` for the inverse when a pivot is exactly zero.
    pub fn det_and_inverse(&self) -> (Complex64, Option<Mat3>) {
        let mut a = self.0;
        let mut inv = Mat3::identity().0;
        let mut det = ONE;

        for col in 0..3 {
            let pivot = (col..3)
                .max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()))
                .unwrap_or(col);
            if a[pivot][col] == ZERO {
                return (ZERO, None);
            }
            if pivot != col {
                a.swap(pivot, col);
                inv.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col];
            det *= p;
            let rp = p.inv();
            for k in 0..3 {
                a[col][k] *= rp;
                inv[col][k] *= rp;
            }
            for row in 0..3 {
                if row == col {
                    continue;
                }
                let f = a[row][col];
                if f == ZERO {
                    continue;
                }
                for k in 0..3 {
                    a[row][k] -= f * a[col][k];
                    inv[row][k] -= f * inv[col][k];
                }
            }
        }
        (det, Some(Mat3(inv)))
    }

    pub fn inverse(&self) -> Option<Mat3> {
        self.det_and_inverse().1
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = Complex64;
    fn index(&self, (j, l): (usize, usize)) -> &Complex64 {
        &self.0[j][l]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (j, l): (usize, usize)) -> &mut Complex64 {
        &mut self.0[j][l]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut m = self;
        for j in 0..3 {
            for l in 0..3 {
                m.0[j][l] += rhs.0[j][l];
            }
        }
        m
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut m = self;
        for j in 0..3 {
            for l in 0..3 {
                m.0[j][l] -= rhs.0[j][l];
            }
        }
        m
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut m = Mat3::zeros();
        for j in 0..3 {
            for l in 0..3 {
                m.0[j][l] = (0..3).map(|k| self.0[j][k] * rhs.0[k][l]).sum();
            }
        }
        m
    }
}
