//! Bell's original three-axis inequality `1 + P(b̂,ĉ) ≥ |P(â,b̂) − P(â,ĉ)|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::measure::joint_correlation;
use crate::qstate::{singlet, Direction};

/// Decision tolerance for exactly computed correlations.
pub const ANALYTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellTriple {
    pub a: Direction,
    pub b: Direction,
    pub c: Direction,
}

impl BellTriple {
    pub fn new(a: Direction, b: Direction, c: Direction) -> Self {
        Self { a, b, c }
    }

    /// `b̂ = ẑ`, with `â` and `ĉ` at `+θ` and `−θ` from `ẑ` in the `φ = 0` plane.
    pub fn symmetric(theta: f64) -> Result<Self> {
        Ok(Self {
            a: Direction::in_xz_plane(theta)?,
            b: Direction::z(),
            c: Direction::in_xz_plane(-theta)?,
        })
    }

    /// The three pairs `(â,b̂)`, `(â,ĉ)`, `(b̂,ĉ)` entering the inequality.
    pub fn pairs(&self) -> [(Direction, Direction); 3] {
        [(self.a, self.b), (self.a, self.c), (self.b, self.c)]
    }

    pub fn random(stream: &mut crate::rng::Stream) -> Self {
        Self {
            a: Direction::random(stream),
            b: Direction::random(stream),
            c: Direction::random(stream),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    /// `1 + P(b̂,ĉ)`
    pub lhs: f64,
    /// `|P(â,b̂) − P(â,ĉ)|`
    pub rhs: f64,
    /// `lhs − rhs`
    pub margin: f64,
    /// `margin < −tol`
    pub violated: bool,
    pub tol: f64,
}

/// Evaluates the inequality from the three correlations `P(â,b̂)`, `P(â,ĉ)`, `P(b̂,ĉ)`.
pub fn evaluate_values(p_ab: f64, p_ac: f64, p_bc: f64, tol: f64) -> Result<InequalityReport> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be finite and >= 0, got {tol}")));
    }
    for value in [p_ab, p_ac, p_bc] {
        if value.is_nan() || value.abs() > 1.0 + tol {
            return Err(Error::InvalidCorrelation { value, tol });
        }
    }
    let lhs = 1.0 + p_bc;
    let rhs = (p_ab - p_ac).abs();
    let margin = lhs - rhs;
    Ok(InequalityReport {
        lhs,
        rhs,
        margin,
        violated: margin < -tol,
        tol,
    })
}

/// Evaluates the inequality for a correlation function on the given triple.
pub fn evaluate_inequality<F>(correlation: F, triple: &BellTriple, tol: f64) -> Result<InequalityReport>
where
    F: Fn(&Direction, &Direction) -> f64,
{
    let p_ab = correlation(&triple.a, &triple.b);
    let p_ac = correlation(&triple.a, &triple.c);
    let p_bc = correlation(&triple.b, &triple.c);
    evaluate_values(p_ab, p_ac, p_bc, tol)
}

/// Quantum singlet correlation `⟨(â·σ)⊗(b̂·σ)⟩`, i.e. `−â·b̂`.
pub fn singlet_correlation(a: &Direction, b: &Direction) -> f64 {
    joint_correlation(&singlet(), a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub theta: f64,
    pub report: InequalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationScan {
    pub points: Vec<ScanPoint>,
}

impl ViolationScan {
    /// Smallest and largest violated grid angle.
    pub fn violated_interval(&self) -> Option<(f64, f64)> {
        let mut violated = self.points.iter().filter(|p| p.report.violated).map(|p| p.theta);
        let first = violated.next()?;
        let last = violated.next_back().unwrap_or(first);
        Some((first, last))
    }

    pub fn violation_count(&self) -> usize {
        self.points.iter().filter(|p| p.report.violated).count()
    }

    /// Whether `theta` lies strictly inside `(0, π/2)`, the interval where the
    /// singlet is known to violate the inequality in this geometry.
    pub fn in_reference_interval(theta: f64) -> bool {
        theta > 0.0 && theta < FRAC_PI_2
    }
}

/// `steps` evenly spaced angles from `min` to `max`, endpoints included.
pub fn uniform_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("grid needs at least 2 steps, got {steps}")));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(Error::InvalidArgument(format!("grid bounds must satisfy min < max, got [{min}, {max}]")));
    }
    let last = steps - 1;
    Ok((0..steps)
        .map(|k| {
            if k == last {
                max
            } else {
                min + (max - min) * k as f64 / last as f64
            }
        })
        .collect())
}

/// Evaluates the singlet correlation in the symmetric geometry on a uniform θ grid.
pub fn violation_scan(theta_min: f64, theta_max: f64, steps: usize) -> Result<ViolationScan> {
    violation_scan_with(singlet_correlation, theta_min, theta_max, steps)
}

/// [`violation_scan`] for an arbitrary correlation function.
pub fn violation_scan_with<F>(correlation: F, theta_min: f64, theta_max: f64, steps: usize) -> Result<ViolationScan>
where
    F: Fn(&Direction, &Direction) -> f64 + Sync,
{
    if !(theta_min >= 0.0 && theta_max <= PI) {
        return Err(Error::InvalidArgument(format!(
            "scan range must lie within [0, π], got [{theta_min}, {theta_max}]"
        )));
    }
    let grid = uniform_grid(theta_min, theta_max, steps)?;
    let points = grid
        .par_iter()
        .map(|&theta| {
            let triple = BellTriple::symmetric(theta)?;
            let report = evaluate_inequality(&correlation, &triple, ANALYTIC_TOL)?;
            Ok(ScanPoint { theta, report })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ViolationScan { points })
}
