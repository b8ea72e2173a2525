//! Estimators for dichotomic (±1) outcomes and binomial frequencies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiple of the standard error used for every statistical decision.
pub const DECISION_SIGMAS: f64 = 4.0;

/// Absolute slack added to every statistical comparison so that a zero
/// standard error (all outcomes identical) still accepts an analytic value
/// that differs only by floating-point round-off.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Sample mean of ±1 products with its standard error `√((1 − mean²)/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl CorrelationEstimate {
    /// From the sum of `n` products, each ±1.
    pub fn from_sum(sum: i64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("estimate needs n >= 1".into()));
        }
        if sum.unsigned_abs() > n {
            return Err(Error::InvalidArgument(format!(
                "sum {sum} of {n} dichotomic products is out of range"
            )));
        }
        let mean = sum as f64 / n as f64;
        Ok(Self {
            mean,
            stderr: dichotomic_stderr(mean, n),
            n,
        })
    }

    /// Within `sigmas` standard errors of `value`, plus [`ROUNDOFF_FLOOR`].
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.stderr + ROUNDOFF_FLOOR
    }
}

pub fn dichotomic_stderr(mean: f64, n: u64) -> f64 {
    ((1.0 - mean * mean).max(0.0) / n as f64).sqrt()
}

/// Observed frequency of an event in `n` Bernoulli trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: u64,
    pub n: u64,
    pub p: f64,
    pub stderr: f64,
}

impl Frequency {
    pub fn new(count: u64, n: u64) -> Result<Self> {
        if n == 0 || count > n {
            return Err(Error::InvalidArgument(format!(
                "frequency {count}/{n} is undefined"
            )));
        }
        let p = count as f64 / n as f64;
        Ok(Self {
            count,
            n,
            p,
            stderr: binomial_stderr(p, n),
        })
    }

    /// Within `sigmas` binomial standard errors of the true probability `p`.
    pub fn agrees_with(&self, p: f64, sigmas: f64) -> bool {
        (self.p - p).abs() <= sigmas * binomial_stderr(p, self.n) + ROUNDOFF_FLOOR
    }
}

pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Standard errors of independent quantities, summed in quadrature.
pub fn combined_stderr(errors: &[f64]) -> f64 {
    errors.iter().map(|e| e * e).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_anticorrelated_has_zero_stderr() {
        let e = CorrelationEstimate::from_sum(-10, 10).unwrap();
        assert_eq!(e.mean, -1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn stderr_scales_with_root_n() {
        let a = CorrelationEstimate::from_sum(0, 1000).unwrap();
        let b = CorrelationEstimate::from_sum(0, 2000).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio - 2f64.sqrt()).abs() < 0.01 * 2f64.sqrt());
        for mean in [-0.9, -0.5, 0.0, 0.3, 0.99] {
            let r = dichotomic_stderr(mean, 100_000) / dichotomic_stderr(mean, 200_000);
            assert!((r - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_empty_and_out_of_range() {
        assert!(CorrelationEstimate::from_sum(0, 0).is_err());
        assert!(CorrelationEstimate::from_sum(11, 10).is_err());
        assert!(Frequency::new(3, 2).is_err());
        assert!(Frequency::new(0, 0).is_err());
    }

    #[test]
    fn quadrature_sum() {
        assert!((combined_stderr(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
        assert_eq!(combined_stderr(&[]), 0.0);
    }
}
