//! Operational separation checks: a particle's local statistics do not depend
//! on the distant setting, and the joint statistics do not depend on which
//! particle is measured first.
//!
//! Particle 1 is the remote wing and particle 2 the local wing throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{joint_index, joint_probabilities, JointSampler, Outcome};
use crate::qstate::{
    eigenbasis, reduced_state, spin_eigenstate, Direction, Mat2, Subsystem, TwoQubitKet, C64,
};
use crate::rng::Stream;
use crate::stats::{binomial_stderr, combined_stderr, DECISION_SIGMAS};

/// Analytic marginals must agree to this tolerance.
pub const ANALYTIC_TOL: f64 = 1e-12;

/// `(p_up, p_down)` for the local particle along `local_axis`, summed over the
/// unrecorded outcome of the remote particle measured along `remote_axis`.
pub fn remote_marginal(psi: &TwoQubitKet, remote_axis: &Direction, local_axis: &Direction) -> (f64, f64) {
    let p = joint_probabilities(psi, remote_axis, local_axis);
    (p[0] + p[2], p[1] + p[3])
}

/// Local marginal from the particle-2 reduced state alone: the diagonal of ρ₂
/// in the local eigenbasis.
pub fn reduced_marginal(psi: &TwoQubitKet, local_axis: &Direction) -> (f64, f64) {
    let rho = reduced_state(psi, Subsystem::Two);
    let [up, down] = eigenbasis(local_axis);
    (rho.sandwich(&up).re, rho.sandwich(&down).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloDetails {
    pub trials_per_axis: u64,
    /// Binomial standard error of each estimated `p_up`.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub local_axis: Direction,
    pub remote_axes: Vec<Direction>,
    /// `[p_up, p_down]` per remote axis.
    pub marginals: Vec<[f64; 2]>,
    pub max_discrepancy: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub monte_carlo: Option<Vec<MonteCarloDetails>>,
}

fn max_pairwise(marginals: &[[f64; 2]]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in marginals.iter().enumerate() {
        for b in &marginals[i + 1..] {
            worst = worst.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
        }
    }
    worst
}

fn require_two(remote_axes: &[Direction]) -> Result<()> {
    if remote_axes.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "no-signaling check needs at least two remote axes, got {}",
            remote_axes.len()
        )));
    }
    Ok(())
}

/// Exact check: all local marginals agree pairwise within [`ANALYTIC_TOL`].
pub fn no_signaling_check(
    psi: &TwoQubitKet,
    local_axis: &Direction,
    remote_axes: &[Direction],
) -> Result<NoSignalingReport> {
    require_two(remote_axes)?;
    let marginals: Vec<[f64; 2]> = remote_axes
        .iter()
        .map(|r| {
            let (u, d) = remote_marginal(psi, r, local_axis);
            [u, d]
        })
        .collect();
    let max_discrepancy = max_pairwise(&marginals);
    Ok(NoSignalingReport {
        local_axis: *local_axis,
        remote_axes: remote_axes.to_vec(),
        marginals,
        max_discrepancy,
        pass: max_discrepancy <= ANALYTIC_TOL,
        monte_carlo: None,
    })
}

/// Sampled check: `n` joint draws per remote axis; passes when every pair of
/// estimated marginals agrees within 4 combined binomial standard errors.
pub fn no_signaling_check_mc(
    psi: &TwoQubitKet,
    local_axis: &Direction,
    remote_axes: &[Direction],
    n: u64,
    stream: &mut Stream,
) -> Result<NoSignalingReport> {
    require_two(remote_axes)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let mut marginals = Vec::with_capacity(remote_axes.len());
    let mut details = Vec::with_capacity(remote_axes.len());
    for remote in remote_axes {
        let sampler = JointSampler::new(psi, remote, local_axis);
        let up = (0..n)
            .filter(|_| sampler.sample(stream).1 == Outcome::Up)
            .count() as u64;
        let p = up as f64 / n as f64;
        marginals.push([p, 1.0 - p]);
        details.push(MonteCarloDetails {
            trials_per_axis: n,
            stderr: binomial_stderr(p, n),
        });
    }
    let mut pass = true;
    for i in 0..marginals.len() {
        for j in i + 1..marginals.len() {
            let tol = DECISION_SIGMAS * combined_stderr(&[details[i].stderr, details[j].stderr]);
            if (marginals[i][0] - marginals[j][0]).abs() > tol {
                pass = false;
            }
        }
    }
    Ok(NoSignalingReport {
        local_axis: *local_axis,
        remote_axes: remote_axes.to_vec(),
        max_discrepancy: max_pairwise(&marginals),
        marginals,
        pass,
        monte_carlo: Some(details),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Particle {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementOrder {
    #[serde(rename = "A_first")]
    AFirst,
    #[serde(rename = "B_first")]
    BFirst,
}

impl MeasurementOrder {
    pub fn first(self) -> Particle {
        match self {
            MeasurementOrder::AFirst => Particle::One,
            MeasurementOrder::BFirst => Particle::Two,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderedProtocol {
    pub order: MeasurementOrder,
    pub setting_a: Direction,
    pub setting_b: Direction,
}

/// Third-party record of the first measurement, made before the second
/// particle is sampled. Read-only once created.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotebookEntry {
    particle: Particle,
    outcome: Outcome,
}

impl NotebookEntry {
    pub fn particle(&self) -> Particle {
        self.particle
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedOutcome {
    pub outcome_a: Outcome,
    pub outcome_b: Outcome,
    pub notebook: NotebookEntry,
}

/// Projective measurement of one particle of a joint ket along `axis`, with
/// collapse: returns the outcome and the projected, renormalized joint ket.
/// Consumes one variate.
pub fn measure_particle(
    psi: &TwoQubitKet,
    particle: Particle,
    axis: &Direction,
    stream: &mut Stream,
) -> (Outcome, TwoQubitKet) {
    let project = |sign: i8| {
        let k = spin_eigenstate(axis, sign);
        let p = Mat2::outer(&k, &k).0;
        let a = psi.amplitudes();
        let mut out = [C64::new(0.0, 0.0); 4];
        for i in 0..2 {
            for j in 0..2 {
                out[2 * i + j] = match particle {
                    Particle::One => p[i][0] * a[j] + p[i][1] * a[2 + j],
                    Particle::Two => p[j][0] * a[2 * i] + p[j][1] * a[2 * i + 1],
                };
            }
        }
        out
    };
    let up = project(1);
    let p_up: f64 = up.iter().map(|x| x.norm_sqr()).sum();
    let (outcome, projected) = if stream.uniform() < p_up {
        (Outcome::Up, up)
    } else {
        (Outcome::Down, project(-1))
    };
    let collapsed = TwoQubitKet::new(projected).expect("sampled outcome has nonzero probability");
    (outcome, collapsed)
}

/// Measures the two particles one after the other in the protocol's order,
/// writing the first result to the notebook before the second is sampled.
/// Outcomes are labeled by particle. Consumes two variates.
pub fn ordered_experiment(psi: &TwoQubitKet, protocol: &OrderedProtocol, stream: &mut Stream) -> OrderedOutcome {
    let first = protocol.order.first();
    let (first_axis, second, second_axis) = match first {
        Particle::One => (protocol.setting_a, Particle::Two, protocol.setting_b),
        Particle::Two => (protocol.setting_b, Particle::One, protocol.setting_a),
    };
    let (first_outcome, collapsed) = measure_particle(psi, first, &first_axis, stream);
    let notebook = NotebookEntry {
        particle: first,
        outcome: first_outcome,
    };
    let (second_outcome, _) = measure_particle(&collapsed, second, &second_axis, stream);
    let (outcome_a, outcome_b) = match first {
        Particle::One => (first_outcome, second_outcome),
        Particle::Two => (second_outcome, first_outcome),
    };
    OrderedOutcome {
        outcome_a,
        outcome_b,
        notebook,
    }
}

/// Counts of the four joint outcomes `(++, +−, −+, −−)` over `n` ordered trials.
pub fn ordered_counts(psi: &TwoQubitKet, protocol: &OrderedProtocol, n: u64, stream: &mut Stream) -> [u64; 4] {
    let mut counts = [0u64; 4];
    for _ in 0..n {
        let o = ordered_experiment(psi, protocol, stream);
        counts[joint_index(o.outcome_a, o.outcome_b)] += 1;
    }
    counts
}

/// Two count vectors over the same `n` agree cell by cell within 4 combined
/// binomial standard errors.
pub fn counts_agree(a: &[u64; 4], b: &[u64; 4]) -> bool {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return false;
    }
    a.iter().zip(b.iter()).all(|(&x, &y)| {
        let px = x as f64 / na as f64;
        let py = y as f64 / nb as f64;
        let tol = DECISION_SIGMAS * combined_stderr(&[binomial_stderr(px, na), binomial_stderr(py, nb)]);
        (px - py).abs() <= tol
    })
}
