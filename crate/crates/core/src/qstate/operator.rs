use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use super::direction::Direction;
use super::ket::{QubitKet, C64, ONE, ZERO};

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn pauli_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        let i = C64::new(0.0, 1.0);
        Mat2([[ZERO, -i], [i, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &QubitKet, b: &QubitKet) -> Self {
        let a = a.amplitudes();
        let b = b.amplitudes();
        Mat2([
            [a[0] * b[0].conj(), a[0] * b[1].conj()],
            [a[1] * b[0].conj(), a[1] * b[1].conj()],
        ])
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// `⟨ψ|M|ψ⟩`.
    pub fn sandwich(&self, psi: &QubitKet) -> C64 {
        let a = psi.amplitudes();
        let ma = self.apply(a);
        a[0].conj() * ma[0] + a[1].conj() * ma[1]
    }

    /// Largest entrywise distance.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += rhs.0[i][j];
            }
        }
        Mat2(out)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// Spin component `n̂·σ` in units of ħ/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinOperator {
    matrix: Mat2,
}

impl SpinOperator {
    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// `⟨ψ|n̂·σ|ψ⟩`, real for a Hermitian operator.
    pub fn expectation(&self, psi: &QubitKet) -> f64 {
        self.matrix.sandwich(psi).re
    }

    pub fn apply(&self, psi: &QubitKet) -> [C64; 2] {
        self.matrix.apply(psi.amplitudes())
    }
}

/// `n_x σ_x + n_y σ_y + n_z σ_z`.
pub fn spin_operator(axis: &Direction) -> SpinOperator {
    let [nx, ny, nz] = axis.unit_vector();
    let off = C64::new(nx, -ny);
    SpinOperator {
        matrix: Mat2([
            [C64::new(nz, 0.0), off],
            [off.conj(), C64::new(-nz, 0.0)],
        ]),
    }
}

/// Eigenket of `n̂·σ` with eigenvalue `sign` (any positive value selects +1).
///
/// Phases: `|↑_n⟩ = (cos θ/2, e^{iφ} sin θ/2)` and
/// `|↓_n⟩ = (sin θ/2, −e^{iφ} cos θ/2)`, which makes
/// `|↑_z⟩ = cos θ/2 |↑_n⟩ + sin θ/2 |↓_n⟩` hold exactly in the `φ = 0` plane.
pub fn spin_eigenstate(axis: &Direction, sign: i8) -> QubitKet {
    let (s, c) = (axis.theta() / 2.0).sin_cos();
    let phase = C64::from_polar(1.0, axis.phi());
    if sign > 0 {
        QubitKet::from_normalized(C64::new(c, 0.0), phase * s)
    } else {
        QubitKet::from_normalized(C64::new(s, 0.0), -phase * c)
    }
}

/// `[|↑_n⟩, |↓_n⟩]`.
pub fn eigenbasis(axis: &Direction) -> [QubitKet; 2] {
    [spin_eigenstate(axis, 1), spin_eigenstate(axis, -1)]
}

/// Components `(⟨↑_n|ψ⟩, ⟨↓_n|ψ⟩)` of `state` in the eigenbasis of `axis`.
pub fn express_in_basis(state: &QubitKet, axis: &Direction) -> (C64, C64) {
    let [up, down] = eigenbasis(axis);
    (up.inner(state), down.inner(state))
}
