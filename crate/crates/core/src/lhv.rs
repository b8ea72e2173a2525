//! Local hidden variable models of the factorized form
//! `P(â,b̂) = ∫ dλ ρ(λ) A(â,λ) B(b̂,λ)`, estimated by Monte Carlo.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::bell::{evaluate_values, BellTriple, InequalityReport};
use crate::error::{Error, Result};
use crate::qstate::Direction;
use crate::rng::{self, Stream};
use crate::stats::{combined_stderr, CorrelationEstimate, DECISION_SIGMAS};

/// A local deterministic model: a hidden-variable distribution plus response
/// functions for the two wings.
///
/// Implementations must return exactly ±1 from the responses, give identical
/// responses for identical `(axis, λ)`, and consume exactly
/// [`variates_per_draw`](LhvModel::variates_per_draw) variates per λ.
pub trait LhvModel: Send + Sync {
    type Hidden;

    fn name(&self) -> &str;

    fn variates_per_draw(&self) -> u64;

    fn sample_hidden(&self, stream: &mut Stream) -> Self::Hidden;

    fn response_a(&self, axis: &Direction, hidden: &Self::Hidden) -> i32;

    fn response_b(&self, axis: &Direction, hidden: &Self::Hidden) -> i32;
}

/// λ for the built-in model: a unit 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenVariable(pub [f64; 3]);

impl HiddenVariable {
    pub fn dot(&self, axis: &Direction) -> f64 {
        let v = axis.unit_vector();
        self.0[0] * v[0] + self.0[1] * v[1] + self.0[2] * v[2]
    }
}

/// `sign(x)` with `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> i32 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// λ uniform on the sphere; `A(â,λ) = sign(â·λ)`, `B(b̂,λ) = −sign(b̂·λ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SignModel;

impl LhvModel for SignModel {
    type Hidden = HiddenVariable;

    fn name(&self) -> &str {
        "sign"
    }

    fn variates_per_draw(&self) -> u64 {
        2
    }

    /// Uniform `cos θ` then uniform `φ`.
    fn sample_hidden(&self, stream: &mut Stream) -> HiddenVariable {
        let z = 2.0 * stream.uniform() - 1.0;
        let phi = TAU * stream.uniform();
        let r = (1.0 - z * z).max(0.0).sqrt();
        let (sp, cp) = phi.sin_cos();
        HiddenVariable([r * cp, r * sp, z])
    }

    #[inline]
    fn response_a(&self, axis: &Direction, hidden: &HiddenVariable) -> i32 {
        sign(hidden.dot(axis))
    }

    #[inline]
    fn response_b(&self, axis: &Direction, hidden: &HiddenVariable) -> i32 {
        -sign(hidden.dot(axis))
    }
}

/// Closed-form sign-model correlation for axes separated by `angle`:
/// `2·angle/π − 1`.
pub fn sign_model_correlation(angle: f64) -> f64 {
    2.0 * angle / PI - 1.0
}

/// Models selectable by name from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinModel {
    Sign(SignModel),
}

impl BuiltinModel {
    pub fn names() -> &'static [&'static str] {
        &["sign"]
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "sign" => Ok(BuiltinModel::Sign(SignModel)),
            other => Err(Error::Config(format!(
                "unknown hidden variable model '{other}' (known: {})",
                Self::names().join(", ")
            ))),
        }
    }
}

impl LhvModel for BuiltinModel {
    type Hidden = HiddenVariable;

    fn name(&self) -> &str {
        match self {
            BuiltinModel::Sign(m) => m.name(),
        }
    }

    fn variates_per_draw(&self) -> u64 {
        match self {
            BuiltinModel::Sign(m) => m.variates_per_draw(),
        }
    }

    fn sample_hidden(&self, stream: &mut Stream) -> HiddenVariable {
        match self {
            BuiltinModel::Sign(m) => m.sample_hidden(stream),
        }
    }

    fn response_a(&self, axis: &Direction, hidden: &HiddenVariable) -> i32 {
        match self {
            BuiltinModel::Sign(m) => m.response_a(axis, hidden),
        }
    }

    fn response_b(&self, axis: &Direction, hidden: &HiddenVariable) -> i32 {
        match self {
            BuiltinModel::Sign(m) => m.response_b(axis, hidden),
        }
    }
}

fn contract_error<M: LhvModel + ?Sized>(model: &M, detail: String) -> Error {
    Error::ModelContract {
        model: model.name().to_string(),
        detail,
    }
}

fn checked_response<M: LhvModel + ?Sized>(model: &M, value: i32) -> Result<i32> {
    if value == 1 || value == -1 {
        Ok(value)
    } else {
        Err(contract_error(model, format!("response {value} is not +1 or -1")))
    }
}

/// One trial: draws λ and returns `(A(â,λ), B(b̂,λ))`, checking the model contract.
pub fn lhv_trial<M: LhvModel + ?Sized>(
    model: &M,
    axis_a: &Direction,
    axis_b: &Direction,
    stream: &mut Stream,
) -> Result<(i32, i32)> {
    let before = stream.draws();
    let hidden = model.sample_hidden(stream);
    let used = stream.draws() - before;
    if used != model.variates_per_draw() {
        return Err(contract_error(
            model,
            format!("drew {used} variates for λ, declared {}", model.variates_per_draw()),
        ));
    }
    let a = checked_response(model, model.response_a(axis_a, &hidden))?;
    let b = checked_response(model, model.response_b(axis_b, &hidden))?;
    Ok((a, b))
}

fn product_sum<M: LhvModel + ?Sized>(
    model: &M,
    axis_a: &Direction,
    axis_b: &Direction,
    n: u64,
    stream: &mut Stream,
) -> Result<i64> {
    let mut sum = 0i64;
    for _ in 0..n {
        let (a, b) = lhv_trial(model, axis_a, axis_b, stream)?;
        sum += i64::from(a * b);
    }
    Ok(sum)
}

/// Monte Carlo estimate of `P(â,b̂)` from `n` draws of λ on `stream`.
pub fn lhv_correlation<M: LhvModel + ?Sized>(
    model: &M,
    axis_a: &Direction,
    axis_b: &Direction,
    n: u64,
    stream: &mut Stream,
) -> Result<CorrelationEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let sum = product_sum(model, axis_a, axis_b, n, stream)?;
    CorrelationEstimate::from_sum(sum, n)
}

/// As [`lhv_correlation`], split into chunks with one derived stream per chunk.
/// Deterministic in `(seed, n)`.
pub fn lhv_correlation_chunked<M: LhvModel + ?Sized>(
    model: &M,
    axis_a: &Direction,
    axis_b: &Direction,
    n: u64,
    seed: u64,
) -> Result<CorrelationEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let sums = rng::chunked(seed, n, |_, _, count, stream| {
        product_sum(model, axis_a, axis_b, count, stream)
    });
    let mut total = 0i64;
    for s in sums {
        total += s?;
    }
    CorrelationEstimate::from_sum(total, n)
}

/// Inequality check on Monte Carlo estimates for one triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleCheck {
    pub triple: BellTriple,
    /// Estimates for `(â,b̂)`, `(â,ĉ)`, `(b̂,ĉ)`.
    pub estimates: [CorrelationEstimate; 3],
    pub report: InequalityReport,
}

/// Evaluates the inequality from three estimates with tolerance
/// `4 × (stderrs summed in quadrature)`.
pub fn statistical_report(estimates: &[CorrelationEstimate; 3]) -> Result<InequalityReport> {
    let [ab, ac, bc] = estimates;
    let tol = DECISION_SIGMAS * combined_stderr(&[ab.stderr, ac.stderr, bc.stderr]);
    evaluate_values(ab.mean, ac.mean, bc.mean, tol)
}

/// Smallest `n` for which `4/√n < 0.05`.
pub const MIN_BELL_CHECK_TRIALS: u64 = 6401;

/// Bell check of `model` on each triple with `n` draws per pair.
///
/// One seed is drawn from `stream`; pair `j` of triple `i` then runs on the
/// derived stream `3i + j`, so triples may be evaluated concurrently.
pub fn lhv_bell_check<M: LhvModel + ?Sized>(
    model: &M,
    triples: &[BellTriple],
    n: u64,
    stream: &mut Stream,
) -> Result<Vec<TripleCheck>> {
    if n < MIN_BELL_CHECK_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "bell check needs n >= {MIN_BELL_CHECK_TRIALS} so that 4/sqrt(n) < 0.05, got {n}"
        )));
    }
    let seed = stream.fork_seed();
    triples
        .par_iter()
        .enumerate()
        .map(|(i, triple)| {
            let mut estimates = [CorrelationEstimate { mean: 0.0, stderr: 0.0, n }; 3];
            for (j, (a, b)) in triple.pairs().iter().enumerate() {
                let mut s = Stream::derived(seed, 3 * i as u64 + j as u64);
                estimates[j] = lhv_correlation(model, a, b, n, &mut s)?;
            }
            let report = statistical_report(&estimates)?;
            Ok(TripleCheck {
                triple: *triple,
                estimates,
                report,
            })
        })
        .collect()
}
