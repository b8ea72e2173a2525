//! Seeded Monte Carlo runs of the two-wing experiment.
//!
//! Trials are generated in chunks of [`CHUNK_LEN`](crate::rng::CHUNK_LEN), chunk
//! `k` drawing from stream `(seed, k)`. Each trial consumes a fixed number of
//! variates determined by the source:
//!
//! | source                  | variates |
//! |-------------------------|----------|
//! | quantum, simultaneous   | 1        |
//! | quantum, ordered        | 2        |
//! | hidden variable model   | 2        |
//! | product mixture         | 1        |
//!
//! plus one leading variate when the setting pair is chosen per trial.

use serde::{Deserialize, Serialize};

use crate::bell::{BellTriple, InequalityReport};
use crate::error::{Error, Result};
use crate::furry::ProductMixture;
use crate::lhv::{lhv_trial, statistical_report, BuiltinModel};
use crate::measure::{JointSampler, Outcome};
use crate::qstate::{Direction, TwoQubitKet};
use crate::rng::{self, Stream};
use crate::separation::{ordered_experiment, MeasurementOrder, OrderedProtocol};

pub use crate::stats::CorrelationEstimate;

/// Setting pairs match when their unit vectors agree to this tolerance.
pub const AXIS_MATCH_TOL: f64 = 1e-12;

/// Minimum trials per pair for a statistically decided Bell test.
pub const MIN_TRIALS_PER_PAIR: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrialOrder {
    #[serde(rename = "simultaneous")]
    Simultaneous,
    #[serde(rename = "A_first")]
    AFirst,
    #[serde(rename = "B_first")]
    BFirst,
}

impl TrialOrder {
    pub fn label(self) -> &'static str {
        match self {
            TrialOrder::Simultaneous => "simultaneous",
            TrialOrder::AFirst => "A_first",
            TrialOrder::BFirst => "B_first",
        }
    }

    fn sequential(self) -> Option<MeasurementOrder> {
        match self {
            TrialOrder::Simultaneous => None,
            TrialOrder::AFirst => Some(MeasurementOrder::AFirst),
            TrialOrder::BFirst => Some(MeasurementOrder::BFirst),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub setting_a: Direction,
    pub outcome_a: Outcome,
    pub setting_b: Direction,
    pub outcome_b: Outcome,
    pub order: TrialOrder,
}

impl TrialRecord {
    pub fn product(&self) -> i64 {
        i64::from(self.outcome_a.value() * self.outcome_b.value())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Source {
    Quantum(TwoQubitKet),
    /// Built-in hidden variable model, by name.
    Lhv(String),
    Furry(ProductMixture),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SettingsPolicy {
    Fixed(Direction, Direction),
    /// One pair drawn uniformly per trial.
    PerTrial(Vec<(Direction, Direction)>),
}

impl SettingsPolicy {
    fn pairs(&self) -> Vec<(Direction, Direction)> {
        match self {
            SettingsPolicy::Fixed(a, b) => vec![(*a, *b)],
            SettingsPolicy::PerTrial(list) => list.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: Source,
    pub settings: SettingsPolicy,
    pub n_trials: u64,
    pub seed: u64,
    pub order: TrialOrder,
}

enum Sampler {
    Joint(Vec<JointSampler>),
    Ordered(MeasurementOrder, TwoQubitKet),
    Lhv(BuiltinModel),
}

/// Validated source and settings, ready to generate trials.
struct Engine {
    pairs: Vec<(Direction, Direction)>,
    choose_per_trial: bool,
    sampler: Sampler,
    order: TrialOrder,
}

impl Engine {
    fn new(source: &Source, settings: &SettingsPolicy, order: TrialOrder) -> Result<Self> {
        let pairs = settings.pairs();
        if pairs.is_empty() {
            return Err(Error::Config("settings list is empty".into()));
        }
        let sampler = match (source, order.sequential()) {
            (Source::Quantum(psi), None) => {
                Sampler::Joint(pairs.iter().map(|(a, b)| JointSampler::new(psi, a, b)).collect())
            }
            (Source::Quantum(psi), Some(seq)) => Sampler::Ordered(seq, *psi),
            (Source::Lhv(name), _) => Sampler::Lhv(BuiltinModel::by_name(name)?),
            (Source::Furry(mix), _) => {
                Sampler::Joint(pairs.iter().map(|(a, b)| mix.sampler(a, b)).collect())
            }
        };
        Ok(Self {
            choose_per_trial: matches!(settings, SettingsPolicy::PerTrial(_)),
            pairs,
            sampler,
            order,
        })
    }

    fn trial(&self, stream: &mut Stream) -> Result<(usize, Outcome, Outcome)> {
        let idx = if self.choose_per_trial {
            ((stream.uniform() * self.pairs.len() as f64) as usize).min(self.pairs.len() - 1)
        } else {
            0
        };
        let (a, b) = &self.pairs[idx];
        let (oa, ob) = match &self.sampler {
            Sampler::Joint(samplers) => samplers[idx].sample(stream),
            Sampler::Ordered(order, psi) => {
                let protocol = OrderedProtocol {
                    order: *order,
                    setting_a: *a,
                    setting_b: *b,
                };
                let o = ordered_experiment(psi, &protocol, stream);
                (o.outcome_a, o.outcome_b)
            }
            Sampler::Lhv(model) => {
                let (ra, rb) = lhv_trial(model, a, b, stream)?;
                (Outcome::from_sign(ra as i8)?, Outcome::from_sign(rb as i8)?)
            }
        };
        Ok((idx, oa, ob))
    }
}

fn check_trials(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("n_trials must be >= 1".into()));
    }
    Ok(())
}

/// Generates `n_trials` records, deterministic in the full config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    check_trials(config.n_trials)?;
    let engine = Engine::new(&config.source, &config.settings, config.order)?;
    let chunks = rng::chunked(config.seed, config.n_trials, |_, start, count, stream| {
        (0..count)
            .map(|i| {
                let (idx, outcome_a, outcome_b) = engine.trial(stream)?;
                let (setting_a, setting_b) = engine.pairs[idx];
                Ok(TrialRecord {
                    trial_id: start + i,
                    setting_a,
                    outcome_a,
                    setting_b,
                    outcome_b,
                    order: engine.order,
                })
            })
            .collect::<Result<Vec<_>>>()
    });
    let mut records = Vec::with_capacity(config.n_trials as usize);
    for chunk in chunks {
        records.extend(chunk?);
    }
    Ok(records)
}

/// Correlation for a fixed pair, folded trial by trial without storing records.
/// Produces the same outcomes as [`run_experiment`] with a fixed setting pair.
pub fn simulate_correlation(
    source: &Source,
    axis_a: &Direction,
    axis_b: &Direction,
    n: u64,
    seed: u64,
    order: TrialOrder,
) -> Result<CorrelationEstimate> {
    check_trials(n)?;
    let engine = Engine::new(source, &SettingsPolicy::Fixed(*axis_a, *axis_b), order)?;
    let sums = rng::chunked(seed, n, |_, _, count, stream| {
        let mut sum = 0i64;
        for _ in 0..count {
            let (_, a, b) = engine.trial(stream)?;
            sum += i64::from(a.value() * b.value());
        }
        Ok::<_, Error>(sum)
    });
    let mut total = 0i64;
    for s in sums {
        total += s?;
    }
    CorrelationEstimate::from_sum(total, n)
}

/// Mean of `outcome_a · outcome_b` over records whose settings match `pair`.
pub fn estimate_correlation(records: &[TrialRecord], pair: (&Direction, &Direction)) -> Result<CorrelationEstimate> {
    let (a, b) = pair;
    let (sum, n) = records
        .iter()
        .filter(|r| r.setting_a.approx_eq(a, AXIS_MATCH_TOL) && r.setting_b.approx_eq(b, AXIS_MATCH_TOL))
        .fold((0i64, 0u64), |(s, n), r| (s + r.product(), n + 1));
    if n == 0 {
        return Err(Error::EmptySelection);
    }
    CorrelationEstimate::from_sum(sum, n)
}

/// JSON summary row for one setting pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub pair: [Direction; 2],
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl PairSummary {
    pub fn new(a: Direction, b: Direction, e: &CorrelationEstimate) -> Self {
        Self {
            pair: [a, b],
            mean: e.mean,
            stderr: e.stderr,
            n: e.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellExperimentConfig {
    pub source: Source,
    pub triple: BellTriple,
    pub n_per_pair: u64,
    pub seed: u64,
    pub order: TrialOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellExperimentReport {
    pub report: InequalityReport,
    /// `(â,b̂)`, `(â,ĉ)`, `(b̂,ĉ)`.
    pub estimates: [PairSummary; 3],
}

/// Seed for sub-experiment `index` of a run seeded with `seed`. Drawn from a
/// stream index that chunked runs never use.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    Stream::derived(seed, (1 << 63) | index).fork_seed()
}

/// Three sub-experiments, one per pair, then the inequality with tolerance
/// `4 × (propagated standard error)`.
pub fn bell_experiment(config: &BellExperimentConfig) -> Result<BellExperimentReport> {
    if config.n_per_pair < MIN_TRIALS_PER_PAIR {
        return Err(Error::Config(format!(
            "bell experiment needs n_per_pair >= {MIN_TRIALS_PER_PAIR}, got {}",
            config.n_per_pair
        )));
    }
    let pairs = config.triple.pairs();
    let mut estimates = [CorrelationEstimate { mean: 0.0, stderr: 0.0, n: 0 }; 3];
    for (j, (a, b)) in pairs.iter().enumerate() {
        estimates[j] = simulate_correlation(
            &config.source,
            a,
            b,
            config.n_per_pair,
            sub_seed(config.seed, j as u64),
            config.order,
        )?;
    }
    let report = statistical_report(&estimates)?;
    Ok(BellExperimentReport {
        report,
        estimates: [0, 1, 2].map(|j| PairSummary::new(pairs[j].0, pairs[j].1, &estimates[j])),
    })
}
