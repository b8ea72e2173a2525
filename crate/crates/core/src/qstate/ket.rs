use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Amplitudes smaller than this are treated as zero when fixing the global phase.
pub const PHASE_CUTOFF: f64 = 1e-9;

fn normalize<const N: usize>(amps: [C64; N]) -> Result<[C64; N]> {
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if !norm_sqr.is_finite() || norm_sqr == 0.0 {
        return Err(Error::InvalidState(format!(
            "amplitudes {amps:?} cannot be normalized"
        )));
    }
    let norm = norm_sqr.sqrt();
    Ok(amps.map(|a| a / norm))
}

fn inner<const N: usize>(bra: &[C64; N], ket: &[C64; N]) -> C64 {
    bra.iter().zip(ket.iter()).map(|(b, k)| b.conj() * k).sum()
}

fn canonical_phase<const N: usize>(amps: [C64; N]) -> [C64; N] {
    match amps.iter().find(|a| a.norm() > PHASE_CUTOFF) {
        Some(lead) => {
            let rot = lead.conj() / lead.norm();
            amps.map(|a| a * rot)
        }
        None => amps,
    }
}

/// `b = e^{iχ} a` up to `tol` in every amplitude, with the phase read off the overlap.
fn eq_up_to_phase<const N: usize>(a: &[C64; N], b: &[C64; N], tol: f64) -> bool {
    let overlap = inner(a, b);
    let rot = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter().zip(b.iter()).all(|(x, y)| (x * rot - y).norm() <= tol)
}

/// Normalized single-qubit ket `(c_up, c_down)` in the z basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitKet {
    amps: [C64; 2],
}

impl QubitKet {
    /// Normalizes the given amplitudes.
    pub fn new(up: C64, down: C64) -> Result<Self> {
        Ok(Self {
            amps: normalize([up, down])?,
        })
    }

    /// Caller guarantees unit norm.
    pub(crate) const fn from_normalized(up: C64, down: C64) -> Self {
        Self { amps: [up, down] }
    }

    pub fn up() -> Self {
        Self::from_normalized(ONE, ZERO)
    }

    pub fn down() -> Self {
        Self::from_normalized(ZERO, ONE)
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amps
    }

    pub fn c_up(&self) -> C64 {
        self.amps[0]
    }

    pub fn c_down(&self) -> C64 {
        self.amps[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitKet) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn scaled(&self, phase: C64) -> Self {
        Self::from_normalized(self.amps[0] * phase, self.amps[1] * phase)
    }

    /// Copy with the first non-negligible amplitude made real and nonnegative.
    pub fn canonical(&self) -> Self {
        Self {
            amps: canonical_phase(self.amps),
        }
    }

    pub fn approx_eq_up_to_phase(&self, other: &QubitKet, tol: f64) -> bool {
        eq_up_to_phase(&self.amps, &other.amps, tol)
    }
}

/// Normalized two-qubit ket, amplitudes ordered `(↑↑, ↑↓, ↓↑, ↓↓)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitKet {
    amps: [C64; 4],
}

impl TwoQubitKet {
    /// Normalizes the given amplitudes.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        Ok(Self {
            amps: normalize(amps)?,
        })
    }

    pub fn from_real(amps: [f64; 4]) -> Result<Self> {
        Self::new(amps.map(|a| C64::new(a, 0.0)))
    }

    pub(crate) const fn from_normalized(amps: [C64; 4]) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `C[i][j]` with `ψ = Σ C[i][j] |i⟩|j⟩`.
    pub fn coefficient_matrix(&self) -> [[C64; 2]; 2] {
        [[self.amps[0], self.amps[1]], [self.amps[2], self.amps[3]]]
    }

    pub fn inner(&self, other: &TwoQubitKet) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn canonical(&self) -> Self {
        Self {
            amps: canonical_phase(self.amps),
        }
    }

    pub fn approx_eq_up_to_phase(&self, other: &TwoQubitKet, tol: f64) -> bool {
        eq_up_to_phase(&self.amps, &other.amps, tol)
    }

    /// Amplitudes `⟨u_i ⊗ v_j | ψ⟩` for local bases `u` (particle 1) and `v`
    /// (particle 2), ordered like the z-basis amplitudes.
    pub fn amplitudes_in_bases(&self, u: &[QubitKet; 2], v: &[QubitKet; 2]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                out[2 * i + j] = tensor_product(ui, vj).inner(self);
            }
        }
        out
    }
}

/// `(|↑↓⟩ − |↓↑⟩)/√2`.
pub fn singlet() -> TwoQubitKet {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    TwoQubitKet::from_normalized([ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO])
}

/// Kronecker product; particle 1 is the high-order index.
pub fn tensor_product(a: &QubitKet, b: &QubitKet) -> TwoQubitKet {
    let [a0, a1] = a.amps;
    let [b0, b1] = b.amps;
    TwoQubitKet::from_normalized([a0 * b0, a0 * b1, a1 * b0, a1 * b1])
}
