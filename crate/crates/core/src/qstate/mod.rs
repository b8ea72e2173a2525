//! One- and two-qubit state algebra: axes, kets, spin operators, the singlet,
//! and the Schmidt decomposition.
//!
//! Two-qubit amplitudes are ordered `(↑↑, ↑↓, ↓↑, ↓↓)` with particle 1 as the
//! high-order index. States compare equal up to a global phase.

mod direction;
mod ket;
mod operator;
mod schmidt;

pub use direction::Direction;
pub use ket::{singlet, tensor_product, QubitKet, TwoQubitKet, C64, PHASE_CUTOFF};
pub use operator::{eigenbasis, express_in_basis, spin_eigenstate, spin_operator, Mat2, SpinOperator};
pub use schmidt::{
    reduced_state, schmidt_decompose, SchmidtDecomposition, Subsystem, DEGENERACY_TOL,
    WEIGHT_CUTOFF,
};
