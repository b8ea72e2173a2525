//! The definite-product-state mixture built from a Schmidt decomposition, and
//! the interference term separating it from the entangled state.
//!
//! Each Schmidt pair `(φ_k, ξ_k)` becomes a branch occupied with probability
//! `w_k`. Branches carry no phase relation to each other, so the mixture's
//! correlation is a weighted sum of uncorrelated product-state correlations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{expectation, joint_correlation, JointSampler};
use crate::qstate::{eigenbasis, schmidt_decompose, Direction, QubitKet, TwoQubitKet};

/// Branch weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub weight: f64,
    pub state_a: QubitKet,
    pub state_b: QubitKet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductMixture {
    branches: Vec<Branch>,
    /// True when the source had degenerate Schmidt weights and the z basis was
    /// chosen for particle 1.
    degenerate_basis: bool,
}

impl ProductMixture {
    /// Builds a mixture from explicit branches; weights must be nonnegative and sum to 1.
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidState("mixture needs at least one branch".into()));
        }
        if branches.iter().any(|b| b.weight.is_nan() || b.weight < 0.0) {
            return Err(Error::InvalidState("branch weights must be >= 0".into()));
        }
        let total: f64 = branches.iter().map(|b| b.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidState(format!("branch weights sum to {total}, not 1")));
        }
        Ok(Self {
            branches,
            degenerate_basis: false,
        })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn degenerate_basis(&self) -> bool {
        self.degenerate_basis
    }

    /// Human-readable name of the particle-1 branch basis.
    pub fn basis_label(&self) -> &'static str {
        if self.degenerate_basis {
            "z (degenerate Schmidt weights)"
        } else {
            "schmidt"
        }
    }

    /// Joint outcome probabilities `Σ_k w_k p_k(s_a) p_k(s_b)`, ordered `(++, +−, −+, −−)`.
    pub fn joint_probabilities(&self, axis_a: &Direction, axis_b: &Direction) -> [f64; 4] {
        let [ua, da] = eigenbasis(axis_a);
        let [ub, db] = eigenbasis(axis_b);
        let mut p = [0.0; 4];
        for br in &self.branches {
            let pa = [ua.inner(&br.state_a).norm_sqr(), da.inner(&br.state_a).norm_sqr()];
            let pb = [ub.inner(&br.state_b).norm_sqr(), db.inner(&br.state_b).norm_sqr()];
            for i in 0..2 {
                for j in 0..2 {
                    p[2 * i + j] += br.weight * pa[i] * pb[j];
                }
            }
        }
        p
    }

    /// Inverse-CDF sampler over the mixture's joint outcome distribution.
    pub fn sampler(&self, axis_a: &Direction, axis_b: &Direction) -> JointSampler {
        JointSampler::from_probabilities(self.joint_probabilities(axis_a, axis_b))
    }
}

/// The mixture of Schmidt pairs of `psi` with their weights. Branch kets are
/// phase-canonical.
pub fn furry_mixture(psi: &TwoQubitKet) -> ProductMixture {
    let sd = schmidt_decompose(psi);
    ProductMixture {
        branches: sd
            .terms()
            .map(|(weight, a, b)| Branch {
                weight,
                state_a: a.canonical(),
                state_b: b.canonical(),
            })
            .collect(),
        degenerate_basis: sd.is_degenerate(),
    }
}

/// `Σ_k w_k ⟨φ_k|â·σ|φ_k⟩ ⟨ξ_k|b̂·σ|ξ_k⟩`.
pub fn mixture_correlation(mix: &ProductMixture, axis_a: &Direction, axis_b: &Direction) -> f64 {
    mix.branches
        .iter()
        .map(|br| br.weight * expectation(&br.state_a, axis_a) * expectation(&br.state_b, axis_b))
        .sum()
}

/// Quantum correlation minus mixture correlation (signed).
pub fn interference_delta(psi: &TwoQubitKet, axis_a: &Direction, axis_b: &Direction) -> f64 {
    joint_correlation(psi, axis_a, axis_b) - mixture_correlation(&furry_mixture(psi), axis_a, axis_b)
}

/// One row of a quantum-versus-mixture comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub axis_a: Direction,
    pub axis_b: Direction,
    pub qm: f64,
    pub furry: f64,
    pub delta: f64,
}

pub fn compare(psi: &TwoQubitKet, mix: &ProductMixture, axis_a: &Direction, axis_b: &Direction) -> Comparison {
    let qm = joint_correlation(psi, axis_a, axis_b);
    let furry = mixture_correlation(mix, axis_a, axis_b);
    Comparison {
        axis_a: *axis_a,
        axis_b: *axis_b,
        qm,
        furry,
        delta: qm - furry,
    }
}
