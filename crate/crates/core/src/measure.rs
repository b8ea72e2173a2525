//! Expectations, Born-rule sampling, and the double Stern-Gerlach sequence.
//!
//! Sampling inverts the CDF over the explicitly enumerated outcomes and uses
//! exactly one uniform variate per measurement event.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    eigenbasis, express_in_basis, spin_eigenstate, spin_operator, Direction, QubitKet,
    TwoQubitKet,
};
use crate::rng::Stream;
use crate::stats::{CorrelationEstimate, Frequency};

/// A spin component in units of ħ/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Up => 1,
            Outcome::Down => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Outcome::Up),
            -1 => Ok(Outcome::Down),
            other => Err(Error::InvalidArgument(format!(
                "outcome must be +1 or -1, got {other}"
            ))),
        }
    }

    fn index(self) -> usize {
        match self {
            Outcome::Up => 0,
            Outcome::Down => 1,
        }
    }
}

impl From<Outcome> for i8 {
    fn from(o: Outcome) -> i8 {
        o.value()
    }
}

impl TryFrom<i8> for Outcome {
    type Error = Error;
    fn try_from(v: i8) -> Result<Self> {
        Outcome::from_sign(v)
    }
}

/// `⟨ψ|n̂·σ|ψ⟩`.
pub fn expectation(state: &QubitKet, axis: &Direction) -> f64 {
    spin_operator(axis).expectation(state)
}

/// Correlation between a σ_a measurement and a later σ_n measurement on the
/// same particle prepared in the +1 eigenstate of σ_a: `cos` of the angle
/// between the axes.
pub fn single_particle_correlation(axis_a: &Direction, axis_n: &Direction) -> f64 {
    axis_a.dot(axis_n)
}

/// `⟨ψ|(â·σ) ⊗ (b̂·σ)|ψ⟩`.
pub fn joint_correlation(psi: &TwoQubitKet, axis_a: &Direction, axis_b: &Direction) -> f64 {
    let sa = spin_operator(axis_a).matrix().0;
    let sb = spin_operator(axis_b).matrix().0;
    let amps = psi.amplitudes();
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            let bra = amps[2 * i + j].conj();
            for k in 0..2 {
                for l in 0..2 {
                    acc += bra * sa[i][k] * sb[j][l] * amps[2 * k + l];
                }
            }
        }
    }
    acc.re
}

/// Born probabilities `p(s_a, s_b)` in the `â ⊗ b̂` eigenbasis, ordered
/// `(++, +−, −+, −−)`.
pub fn joint_probabilities(psi: &TwoQubitKet, axis_a: &Direction, axis_b: &Direction) -> [f64; 4] {
    psi.amplitudes_in_bases(&eigenbasis(axis_a), &eigenbasis(axis_b))
        .map(|a| a.norm_sqr())
}

fn pick(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len())
}

/// Projective measurement of `state` along `axis`; returns the outcome and the
/// post-measurement eigenket.
pub fn sample_measurement(state: &QubitKet, axis: &Direction, stream: &mut Stream) -> (Outcome, QubitKet) {
    let (up, _) = express_in_basis(state, axis);
    let outcome = if stream.uniform() < up.norm_sqr() {
        Outcome::Up
    } else {
        Outcome::Down
    };
    (outcome, spin_eigenstate(axis, outcome.value()))
}

const JOINT_OUTCOMES: [(Outcome, Outcome); 4] = [
    (Outcome::Up, Outcome::Up),
    (Outcome::Up, Outcome::Down),
    (Outcome::Down, Outcome::Up),
    (Outcome::Down, Outcome::Down),
];

/// Precomputed four-outcome inverse CDF for repeated joint sampling.
#[derive(Debug, Clone)]
pub struct JointSampler {
    probabilities: [f64; 4],
    cdf: [f64; 3],
}

impl JointSampler {
    pub fn new(psi: &TwoQubitKet, axis_a: &Direction, axis_b: &Direction) -> Self {
        Self::from_probabilities(joint_probabilities(psi, axis_a, axis_b))
    }

    pub(crate) fn from_probabilities(p: [f64; 4]) -> Self {
        let cdf = [p[0], p[0] + p[1], p[0] + p[1] + p[2]];
        Self {
            probabilities: p,
            cdf,
        }
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.probabilities
    }

    #[inline]
    pub fn sample(&self, stream: &mut Stream) -> (Outcome, Outcome) {
        JOINT_OUTCOMES[pick(&self.cdf, stream.uniform())]
    }
}

/// One draw from the joint Born distribution; one variate.
pub fn sample_joint(
    psi: &TwoQubitKet,
    axis_a: &Direction,
    axis_b: &Direction,
    stream: &mut Stream,
) -> (Outcome, Outcome) {
    JointSampler::new(psi, axis_a, axis_b).sample(stream)
}

/// Index of `(s_a, s_b)` in the `(++, +−, −+, −−)` ordering.
pub fn joint_index(a: Outcome, b: Outcome) -> usize {
    2 * a.index() + b.index()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Counter {
    D1,
    D2,
}

/// A detection behind the second apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentialResult {
    pub first_outcome: Outcome,
    pub counter: Counter,
}

impl SequentialResult {
    /// D1 registers +1 along the second axis, D2 registers −1.
    pub fn second_outcome(&self) -> Outcome {
        match self.counter {
            Counter::D1 => Outcome::Up,
            Counter::D2 => Outcome::Down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SternGerlachEvent {
    Detected(SequentialResult),
    /// Left the first apparatus through the lower (−1) arm; no counter fires.
    Absorbed,
}

/// Double Stern-Gerlach sequence: a z-oriented apparatus whose upper arm feeds
/// a second apparatus along `second_axis`, with counters D1/D2 on its outputs.
///
/// Always consumes two variates so the stream layout does not depend on the
/// first outcome.
pub fn sequential_stern_gerlach(
    input: &QubitKet,
    second_axis: &Direction,
    stream: &mut Stream,
) -> SternGerlachEvent {
    let (first, after) = sample_measurement(input, &Direction::z(), stream);
    let (second, _) = sample_measurement(&after, second_axis, stream);
    match first {
        Outcome::Down => SternGerlachEvent::Absorbed,
        Outcome::Up => SternGerlachEvent::Detected(SequentialResult {
            first_outcome: first,
            counter: match second {
                Outcome::Up => Counter::D1,
                Outcome::Down => Counter::D2,
            },
        }),
    }
}

/// Aggregate of repeated double Stern-Gerlach trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentialSummary {
    pub trials: u64,
    /// Fraction of particles passing the upper arm into the second apparatus.
    pub entered: Frequency,
    /// `P(D1)` among particles that entered the second apparatus.
    pub p_d1: Option<Frequency>,
    /// Mean of `first × second` over detected particles.
    pub correlation: Option<CorrelationEstimate>,
    /// How the correlation is conditioned.
    pub conditioning: String,
}

pub fn run_sequential(
    input: &QubitKet,
    second_axis: &Direction,
    trials: u64,
    stream: &mut Stream,
) -> Result<SequentialSummary> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let (mut entered, mut d1, mut product_sum) = (0u64, 0u64, 0i64);
    for _ in 0..trials {
        if let SternGerlachEvent::Detected(r) = sequential_stern_gerlach(input, second_axis, stream) {
            entered += 1;
            if r.counter == Counter::D1 {
                d1 += 1;
            }
            product_sum += i64::from(r.first_outcome.value() * r.second_outcome().value());
        }
    }
    let (p_d1, correlation) = if entered > 0 {
        (
            Some(Frequency::new(d1, entered)?),
            Some(CorrelationEstimate::from_sum(product_sum, entered)?),
        )
    } else {
        (None, None)
    };
    Ok(SequentialSummary {
        trials,
        entered: Frequency::new(entered, trials)?,
        p_d1,
        correlation,
        conditioning: "upper-arm passage (lower arm absorbed)".into(),
    })
}
