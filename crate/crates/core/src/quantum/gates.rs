//! Single-qubit unitaries.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::Mul;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 unitary matrix acting on one qubit, in the `{|0⟩, |1⟩}` basis.
#[derive(Clone, Copy, PartialEq)]
pub struct Unitary2(Matrix2<Complex64>);

/// Bloch-sphere rotation axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Unitary2 {
    /// Builds a unitary from row-major entries, rejecting non-unitary input.
    pub fn new(rows: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = Self::from_rows_unchecked(rows);
        let dev = u.unitarity_deviation();
        if dev > 1e-12 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub(crate) fn from_rows_unchecked(rows: [[Complex64; 2]; 2]) -> Self {
        Unitary2(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
    }

    pub fn identity() -> Self {
        Self::from_rows_unchecked([[C1, C0], [C0, C1]])
    }

    pub fn pauli_x() -> Self {
        Self::from_rows_unchecked([[C0, C1], [C1, C0]])
    }

    pub fn pauli_y() -> Self {
        Self::from_rows_unchecked([[C0, -CI], [CI, C0]])
    }

    pub fn pauli_z() -> Self {
        Self::from_rows_unchecked([[C1, C0], [C0, -C1]])
    }

    pub fn pauli(axis: Axis) -> Self {
        match axis {
            Axis::X => Self::pauli_x(),
            Axis::Y => Self::pauli_y(),
            Axis::Z => Self::pauli_z(),
        }
    }

    /// `exp(-i θ/2 n·σ)`: rotation of the Bloch sphere by `angle` about the
    /// unit vector `axis`. The axis is normalized here; a zero axis yields the
    /// identity.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Self {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if norm == 0.0 {
            return Self::identity();
        }
        let (nx, ny, nz) = (axis[0] / norm, axis[1] / norm, axis[2] / norm);
        let (s, c) = (angle / 2.0).sin_cos();
        // cos(θ/2) I - i sin(θ/2) (nx X + ny Y + nz Z)
        let a = Complex64::new(c, -s * nz);
        let b = Complex64::new(-s * ny, -s * nx);
        let cc = Complex64::new(s * ny, -s * nx);
        let d = Complex64::new(c, s * nz);
        Self::from_rows_unchecked([[a, b], [cc, d]])
    }

    /// Rotation by π/2 about a coordinate axis, `exp(-i (π/4) σ_a)`.
    pub fn quarter_turn(axis: Axis) -> Self {
        let v = match axis {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        };
        Self::rotation(v, FRAC_PI_2)
    }

    /// `q0 I - i (q1 X + q2 Y + q3 Z)` for a unit quaternion `q`.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [q0, q1, q2, q3] = q.map(|x| x / n);
        Self::from_rows_unchecked([
            [Complex64::new(q0, -q3), Complex64::new(-q2, -q1)],
            [Complex64::new(q2, -q1), Complex64::new(q0, q3)],
        ])
    }

    /// Inverse of [`Unitary2::from_quaternion`] after removing the global
    /// phase; `q0 ≥ 0`.
    pub fn to_quaternion(&self) -> [f64; 4] {
        let det = self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)];
        let m = self.0 / det.sqrt();
        let q = [
            (m[(0, 0)].re + m[(1, 1)].re) / 2.0,
            -(m[(0, 1)].im + m[(1, 0)].im) / 2.0,
            (m[(1, 0)].re - m[(0, 1)].re) / 2.0,
            (m[(1, 1)].im - m[(0, 0)].im) / 2.0,
        ];
        if q[0] < 0.0 {
            q.map(|x| -x)
        } else {
            q
        }
    }

    pub fn scaled(&self, phase: Complex64) -> Self {
        Unitary2(self.0 * phase)
    }

    pub fn adjoint(&self) -> Self {
        Unitary2(self.0.adjoint())
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[(0, 0)] * v[0] + self.0[(0, 1)] * v[1],
            self.0[(1, 0)] * v[0] + self.0[(1, 1)] * v[1],
        ]
    }

    /// `max |(U†U - I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.0.adjoint() * self.0 - Matrix2::identity();
        p.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Elementwise distance after removing the best global phase.
    pub fn phase_distance(&self, other: &Unitary2) -> f64 {
        let tr = (self.0.adjoint() * other.0).trace();
        let phase = if tr.norm() > 1e-15 { tr / tr.norm() } else { C1 };
        (self.0 * phase - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise deviation, phase included.
    pub fn max_abs_diff(&self, other: &Unitary2) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;
    fn mul(self, rhs: Unitary2) -> Unitary2 {
        Unitary2(self.0 * rhs.0)
    }
}

impl Mul for &Unitary2 {
    type Output = Unitary2;
    fn mul(self, rhs: &Unitary2) -> Unitary2 {
        Unitary2(self.0 * rhs.0)
    }
}

impl fmt::Debug for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = |r, c| {
            let z: Complex64 = self.0[(r, c)];
            format!("{:+.6}{:+.6}i", z.re, z.im)
        };
        write!(f, "Unitary2[[{}, {}], [{}, {}]]", e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}
