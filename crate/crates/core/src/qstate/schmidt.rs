use serde::{Deserialize, Serialize};

use super::ket::{QubitKet, TwoQubitKet, C64, ZERO};
use super::operator::Mat2;

/// Eigenvalue splittings of the reduced state below this count as degenerate;
/// the decomposition then uses the z basis for particle 1.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Terms with weight below this are dropped.
pub const WEIGHT_CUTOFF: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    One,
    Two,
}

/// `ψ = Σ_k √w_k φ_k ⊗ ξ_k` with orthonormal `φ_k` and `ξ_k`, weights descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDecomposition {
    weights: Vec<f64>,
    basis_a: Vec<QubitKet>,
    basis_b: Vec<QubitKet>,
    degenerate: bool,
}

impl SchmidtDecomposition {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis_a(&self) -> &[QubitKet] {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &[QubitKet] {
        &self.basis_b
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    /// True when the weights coincide and the local bases were fixed by convention.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &QubitKet, &QubitKet)> {
        self.weights
            .iter()
            .zip(self.basis_a.iter().zip(self.basis_b.iter()))
            .map(|(w, (a, b))| (*w, a, b))
    }

    /// `Σ_k √w_k φ_k ⊗ ξ_k`, without renormalization.
    pub fn reconstruct(&self) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (w, a, b) in self.terms() {
            let sw = w.sqrt();
            let a = a.amplitudes();
            let b = b.amplitudes();
            for i in 0..2 {
                for j in 0..2 {
                    out[2 * i + j] += a[i] * b[j] * sw;
                }
            }
        }
        out
    }

    /// `Σ_k w_k |φ_k⟩⟨φ_k|` or `Σ_k w_k |ξ_k⟩⟨ξ_k|`.
    pub fn reduced_state(&self, subsystem: Subsystem) -> Mat2 {
        let basis = match subsystem {
            Subsystem::One => &self.basis_a,
            Subsystem::Two => &self.basis_b,
        };
        self.weights
            .iter()
            .zip(basis.iter())
            .fold(Mat2::zero(), |acc, (w, k)| {
                acc + Mat2::outer(k, k).scale(C64::new(*w, 0.0))
            })
    }
}

fn orthogonal_complement(k: &QubitKet) -> QubitKet {
    let [a, b] = k.amplitudes();
    QubitKet::from_normalized(-b.conj(), a.conj())
}

/// `η_j = Σ_i conj(φ_i) C_ij`, the particle-2 factor paired with `φ`.
fn partner(c: &[[C64; 2]; 2], phi: &QubitKet) -> [C64; 2] {
    let p = phi.amplitudes();
    [
        p[0].conj() * c[0][0] + p[1].conj() * c[1][0],
        p[0].conj() * c[0][1] + p[1].conj() * c[1][1],
    ]
}

/// Schmidt decomposition of a two-qubit ket via the closed-form eigensystem of
/// the particle-1 reduced state.
///
/// Particle-1 kets are phase-canonical. For degenerate weights (e.g. the
/// singlet) the particle-1 basis is the z basis.
pub fn schmidt_decompose(psi: &TwoQubitKet) -> SchmidtDecomposition {
    let c = psi.coefficient_matrix();
    let rho = reduced_state(psi, Subsystem::One).0;
    let a = rho[0][0].re;
    let d = rho[1][1].re;
    let b = rho[0][1];
    let half = 0.5 * (a - d);
    let split = (half * half + b.norm_sqr()).sqrt();
    let top = 0.5 * (a + d) + split;

    let degenerate = split <= DEGENERACY_TOL;
    let phi1 = if degenerate {
        QubitKet::up()
    } else if a >= d {
        QubitKet::new(C64::new(top - d, 0.0), b.conj()).expect("nonzero eigenvector")
    } else {
        QubitKet::new(b, C64::new(top - a, 0.0)).expect("nonzero eigenvector")
    }
    .canonical();
    let phi2 = orthogonal_complement(&phi1).canonical();

    let eta1 = partner(&c, &phi1);
    let w1 = eta1[0].norm_sqr() + eta1[1].norm_sqr();
    let n1 = w1.sqrt();
    let xi1 = QubitKet::from_normalized(eta1[0] / n1, eta1[1] / n1);

    let mut weights = vec![w1];
    let mut basis_a = vec![phi1];
    let mut basis_b = vec![xi1];

    // ξ₂ is the exact complement of ξ₁, carrying the phase of the actual partner of φ₂.
    let eta2 = partner(&c, &phi2);
    let xi2 = orthogonal_complement(&xi1);
    let overlap = xi2.amplitudes()[0].conj() * eta2[0] + xi2.amplitudes()[1].conj() * eta2[1];
    let w2 = overlap.norm_sqr();
    if w2 >= WEIGHT_CUTOFF {
        weights.push(w2);
        basis_a.push(phi2);
        basis_b.push(xi2.scaled(overlap / overlap.norm()));
    }

    SchmidtDecomposition {
        weights,
        basis_a,
        basis_b,
        degenerate,
    }
}

/// Partial trace by index contraction: `ρ₁ = C C†`, `ρ₂ = Cᵀ C*`.
pub fn reduced_state(psi: &TwoQubitKet, subsystem: Subsystem) -> Mat2 {
    let c = psi.coefficient_matrix();
    let mut rho = [[ZERO; 2]; 2];
    for (r, row) in rho.iter_mut().enumerate() {
        for (s, x) in row.iter_mut().enumerate() {
            *x = match subsystem {
                Subsystem::One => (0..2).map(|j| c[r][j] * c[s][j].conj()).sum(),
                Subsystem::Two => (0..2).map(|i| c[i][r] * c[i][s].conj()).sum(),
            };
        }
    }
    Mat2(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{singlet, tensor_product};

    #[test]
    fn product_state_has_rank_one() {
        let psi = tensor_product(&QubitKet::up(), &QubitKet::down());
        let sd = schmidt_decompose(&psi);
        assert_eq!(sd.weights(), &[1.0]);
        assert!(sd.basis_a()[0].approx_eq_up_to_phase(&QubitKet::up(), 1e-15));
        assert!(sd.basis_b()[0].approx_eq_up_to_phase(&QubitKet::down(), 1e-15));
    }

    #[test]
    fn singlet_weights_are_half_in_z_basis() {
        let sd = schmidt_decompose(&singlet());
        assert!(sd.is_degenerate());
        assert_eq!(sd.rank(), 2);
        for w in sd.weights() {
            assert!((w - 0.5).abs() < 1e-15);
        }
        assert!(sd.basis_a()[0].approx_eq_up_to_phase(&QubitKet::up(), 1e-15));
        assert!(sd.basis_b()[0].approx_eq_up_to_phase(&QubitKet::down(), 1e-15));
        assert!(sd.basis_a()[1].approx_eq_up_to_phase(&QubitKet::down(), 1e-15));
        assert!(sd.basis_b()[1].approx_eq_up_to_phase(&QubitKet::up(), 1e-15));
    }

    #[test]
    fn unequal_diagonal_state() {
        let psi = TwoQubitKet::from_real([0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]).unwrap();
        let sd = schmidt_decompose(&psi);
        assert!((sd.weights()[0] - 0.8).abs() < 1e-12);
        assert!((sd.weights()[1] - 0.2).abs() < 1e-12);
        assert!(sd.basis_a()[0].approx_eq_up_to_phase(&QubitKet::up(), 1e-12));
        assert!(sd.basis_b()[1].approx_eq_up_to_phase(&QubitKet::down(), 1e-12));
    }

    #[test]
    fn reduced_state_examples() {
        let rho = reduced_state(&singlet(), Subsystem::Two);
        assert!(rho.max_abs_diff(&Mat2::identity().scale(C64::new(0.5, 0.0))) < 1e-15);
        let ud = tensor_product(&QubitKet::up(), &QubitKet::down());
        let up = Mat2::outer(&QubitKet::up(), &QubitKet::up());
        let down = Mat2::outer(&QubitKet::down(), &QubitKet::down());
        assert!(reduced_state(&ud, Subsystem::One).max_abs_diff(&up) < 1e-15);
        assert!(reduced_state(&ud, Subsystem::Two).max_abs_diff(&down) < 1e-15);
    }
}
