//! Spin-½ correlation laboratory.
//!
//! Exact two-qubit algebra for the spin singlet, Born-rule sampling, Bell's
//! three-axis inequality, local hidden variable models, the product-state
//! mixture obtained from a Schmidt decomposition, no-signaling checks, and a
//! seeded Monte Carlo harness that ties them together. The [`cli`] module
//! backs the `spinlab` binary.

pub mod bell;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod furry;
pub mod lhv;
pub mod measure;
pub mod qstate;
pub mod rng;
pub mod separation;
pub mod stats;

pub use error::{Error, Result};
pub use qstate::{Direction, QubitKet, TwoQubitKet};
pub use rng::Stream;
