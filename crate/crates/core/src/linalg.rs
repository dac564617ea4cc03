//! 2×2 complex matrices, the unitary newtype and the closed-form exponential
//! of a Hermitian generator.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Unitarity tolerance enforced by [`Unitary2::new`].
pub const UNITARITY_TOL: f64 = 1e-9;

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn sigma_x() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Mat2::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Self {
        Mat2::new(ONE, ZERO, ZERO, -ONE)
    }

    /// `[[diag, off·e^{-iφ}], [off·e^{iφ}, -diag]]`, the traceless drive form
    /// shared by every Hamiltonian in this crate.
    pub fn drive(diag: f64, off: f64, phi: f64) -> Self {
        let e = Complex64::from_polar(1.0, phi);
        Mat2::new(
            Complex64::new(diag, 0.0),
            off * e.conj(),
            off * e,
            Complex64::new(-diag, 0.0),
        )
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2::new(s * m[0][0], s * m[0][1], s * m[1][0], s * m[1][1])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.0;
        let d0 = m[0][0].im.abs();
        let d1 = m[1][1].im.abs();
        let off = (m[0][1] - m[1][0].conj()).norm();
        d0.max(d1).max(off)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// `exp(-i·H·dt)` for Hermitian `H`, via `H = a·I + b·σ`.
    pub fn expm_hermitian(h: &Mat2, dt: f64) -> Mat2 {
        let m = &h.0;
        let a = 0.5 * (m[0][0].re + m[1][1].re);
        let bz = 0.5 * (m[0][0].re - m[1][1].re);
        let bx = m[0][1].re;
        let by = -m[0][1].im;
        let b = (bx * bx + by * by + bz * bz).sqrt();
        let theta = b * dt;
        let (s, c) = theta.sin_cos();
        // sin(θ)/|b| as a smooth function near b = 0.
        let sinc = if b > 0.0 { s / b } else { dt };
        let phase = Complex64::from_polar(1.0, -a * dt);
        let u00 = Complex64::new(c, -sinc * bz);
        let u11 = Complex64::new(c, sinc * bz);
        let u01 = Complex64::new(-sinc * by, -sinc * bx);
        let u10 = Complex64::new(sinc * by, -sinc * bx);
        Mat2::new(u00, u01, u10, u11).scale(phase)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{:.6}, {:.6}], [{:.6}, {:.6}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// `‖u†u − I‖_F`.
pub fn unitarity_defect(u: &Mat2) -> f64 {
    (u.adjoint() * *u - Mat2::identity()).frobenius_norm()
}

/// A 2×2 matrix that passed the unitarity check at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(Mat2);

impl Unitary2 {
    pub fn new(m: Mat2) -> Result<Self> {
        Self::with_tolerance(m, UNITARITY_TOL)
    }

    pub fn with_tolerance(m: Mat2, limit: f64) -> Result<Self> {
        let defect = unitarity_defect(&m);
        if defect.is_finite() && defect < limit {
            Ok(Unitary2(m))
        } else {
            Err(Error::NotUnitary { defect, limit })
        }
    }

    /// Canonical SU(2)-form `[[u11, -u21*], [u21, u11*]]`; requires
    /// `|u11|² + |u21|² = 1`.
    pub fn from_su2(u11: Complex64, u21: Complex64) -> Result<Self> {
        Self::new(Mat2::new(u11, -u21.conj(), u21, u11.conj()))
    }

    pub fn identity() -> Self {
        Unitary2(Mat2::identity())
    }

    /// Skip the check; callers guarantee unitarity by construction.
    pub(crate) fn assume(m: Mat2) -> Self {
        Unitary2(m)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat2 {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Unitary2(self.0.adjoint())
    }

    pub fn defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }

    pub fn u11(&self) -> Complex64 {
        self.0.get(0, 0)
    }

    pub fn u21(&self) -> Complex64 {
        self.0.get(1, 0)
    }

    /// `exp(-i·angle/2·σ_x)`
    pub fn rx(angle: f64) -> Self {
        Unitary2(Mat2::expm_hermitian(&Mat2::sigma_x(), 0.5 * angle))
    }

    /// `exp(-i·angle/2·σ_z)`
    pub fn rz(angle: f64) -> Self {
        Unitary2(Mat2::expm_hermitian(&Mat2::sigma_z(), 0.5 * angle))
    }

    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Unitary2(Mat2::new(
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
        ))
    }

    pub fn not() -> Self {
        Unitary2(Mat2::sigma_x())
    }

    pub fn s_gate() -> Self {
        Unitary2(Mat2::new(ONE, ZERO, ZERO, I))
    }

    pub fn t_gate() -> Self {
        Unitary2(Mat2::new(
            ONE,
            ZERO,
            ZERO,
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        ))
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;
    fn mul(self, rhs: Unitary2) -> Unitary2 {
        Unitary2(self.0 * rhs.0)
    }
}

impl fmt::Display for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `min_γ ‖a − e^{iγ}·b‖_F`.
pub fn phase_aligned_distance(a: &Mat2, b: &Mat2) -> f64 {
    let overlap = (a.adjoint() * *b).trace();
    let norm = overlap.norm();
    let align = if norm > 0.0 { overlap.conj() / norm } else { ONE };
    (*a - b.scale(align)).frobenius_norm()
}
