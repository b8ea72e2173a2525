mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use common::axis;
use proptest::prelude::*;
use spinlab::bell::{evaluate_inequality, singlet_correlation, BellTriple, ANALYTIC_TOL};
use spinlab::lhv::{
    lhv_bell_check, lhv_correlation, lhv_correlation_chunked, lhv_trial, sign, sign_model_correlation, BuiltinModel,
    HiddenVariable, LhvModel, SignModel,
};
use spinlab::stats::DECISION_SIGMAS;
use spinlab::{Direction, Error, Stream};

/// Sign-model correlation for axes ẑ and (sin α, 0, cos α) by midpoint
/// quadrature over (cos θ, φ) on the unit sphere. No sampling involved.
fn sign_model_quadrature(alpha: f64) -> f64 {
    const N: usize = 1500;
    let b = [alpha.sin(), 0.0, alpha.cos()];
    let mut total = 0.0;
    for i in 0..N {
        let z = -1.0 + (i as f64 + 0.5) * 2.0 / N as f64;
        let r = (1.0 - z * z).sqrt();
        let mut row = 0.0;
        for j in 0..N {
            let phi = (j as f64 + 0.5) * TAU / N as f64;
            let lambda = [r * phi.cos(), r * phi.sin(), z];
            let a_dot = lambda[2];
            let b_dot = b[0] * lambda[0] + b[2] * lambda[2];
            let sa = if a_dot >= 0.0 { 1.0 } else { -1.0 };
            let sb = if b_dot >= 0.0 { 1.0 } else { -1.0 };
            row += -sa * sb;
        }
        total += row / N as f64;
    }
    total / N as f64
}

#[test]
fn quadrature_confirms_linear_correlation() {
    for k in 0..=12 {
        let alpha = PI * k as f64 / 12.0;
        let q = sign_model_quadrature(alpha);
        assert!((q - sign_model_correlation(alpha)).abs() < 3e-3, "α = {alpha}: {q}");
    }
}

#[test]
fn sampled_sign_model_matches_oracle() {
    for (k, alpha) in [0.3, PI / 3.0, FRAC_PI_2, 2.0, 2.9].into_iter().enumerate() {
        let e = lhv_correlation_chunked(&SignModel, &Direction::z(), &Direction::in_xz_plane(alpha).unwrap(), 2_000_000, k as u64)
            .unwrap();
        let oracle = sign_model_quadrature(alpha);
        assert!((e.mean - oracle).abs() <= DECISION_SIGMAS * e.stderr + 3e-3, "α = {alpha}: {} vs {oracle}", e.mean);
        assert!(e.agrees_with(sign_model_correlation(alpha), DECISION_SIGMAS), "α = {alpha}: {}", e.mean);
    }
}

#[test]
fn pi_over_three_is_minus_one_third() {
    let e = lhv_correlation(&SignModel, &Direction::z(), &Direction::in_xz_plane(PI / 3.0).unwrap(), 10_000_000, &mut Stream::new(33))
        .unwrap();
    assert!((e.mean + 1.0 / 3.0).abs() <= 4.0 / (e.n as f64).sqrt());
}

#[test]
fn equal_axes_give_exactly_minus_one() {
    let mut s = Stream::new(1);
    for n in [1u64, 7, 1000, 100_000] {
        let a = Direction::random(&mut s);
        let e = lhv_correlation(&SignModel, &a, &a, n, &mut s).unwrap();
        assert_eq!(e.mean, -1.0);
        assert_eq!(e.stderr, 0.0);
    }
}

#[test]
fn responses_at_the_pole() {
    let lambda = HiddenVariable([0.0, 0.0, 1.0]);
    assert_eq!(SignModel.response_a(&Direction::z(), &lambda), 1);
    assert_eq!(SignModel.response_b(&Direction::z(), &lambda), -1);
    assert_eq!(sign(0.0), 1);
}

#[test]
fn estimates_are_bit_identical() {
    let a = Direction::new(0.7, 1.0).unwrap();
    let b = Direction::new(2.0, 4.0).unwrap();
    let x = lhv_correlation(&SignModel, &a, &b, 200_000, &mut Stream::new(9)).unwrap();
    let y = lhv_correlation(&SignModel, &a, &b, 200_000, &mut Stream::new(9)).unwrap();
    assert_eq!(x.mean.to_bits(), y.mean.to_bits());
    let x = lhv_correlation_chunked(&SignModel, &a, &b, 300_000, 9).unwrap();
    let y = lhv_correlation_chunked(&SignModel, &a, &b, 300_000, 9).unwrap();
    assert_eq!(x, y);
}

#[test]
fn monotone_in_angle() {
    let mut previous: Option<(f64, f64)> = None;
    for k in 0..50 {
        let theta = PI * k as f64 / 49.0;
        let e = lhv_correlation_chunked(&SignModel, &Direction::z(), &Direction::in_xz_plane(theta).unwrap(), 200_000, 100 + k)
            .unwrap();
        if let Some((mean, stderr)) = previous {
            let slack = DECISION_SIGMAS * (stderr.powi(2) + e.stderr.powi(2)).sqrt();
            assert!(e.mean >= mean - slack, "θ = {theta}: {} after {mean}", e.mean);
        }
        previous = Some((e.mean, e.stderr));
    }
}

#[test]
fn agrees_with_quantum_only_at_the_ends() {
    let z = Direction::z();
    for theta in [0.0, PI] {
        let n = Direction::in_xz_plane(theta).unwrap();
        let e = lhv_correlation_chunked(&SignModel, &z, &n, 1_000_000, 4).unwrap();
        let qm = singlet_correlation(&z, &n);
        assert!((e.mean - qm).abs() <= DECISION_SIGMAS * e.stderr + 1e-12, "θ = {theta}: {} vs {qm}", e.mean);
    }
    let n = Direction::in_xz_plane(FRAC_PI_4).unwrap();
    let e = lhv_correlation_chunked(&SignModel, &z, &n, 10_000_000, 5).unwrap();
    let gap = (e.mean - singlet_correlation(&z, &n)).abs() / e.stderr;
    assert!(gap > 10.0, "only {gap} σ apart");
}

/// A second factorized model: λ biased toward the north pole, shifted
/// threshold, and `B(b̂,λ) = −A(b̂,λ)` so equal settings anticorrelate.
struct OffsetModel;

fn offset_response(axis: &Direction, l: &[f64; 3]) -> i32 {
    let v = axis.unit_vector();
    sign(v[0] * l[0] + v[1] * l[1] + v[2] * l[2] - 0.3)
}

impl LhvModel for OffsetModel {
    type Hidden = [f64; 3];

    fn name(&self) -> &str {
        "offset"
    }

    fn variates_per_draw(&self) -> u64 {
        2
    }

    fn sample_hidden(&self, stream: &mut Stream) -> [f64; 3] {
        let z = stream.uniform().sqrt() * 2.0 - 1.0;
        let phi = TAU * stream.uniform();
        let r = (1.0 - z * z).max(0.0).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    }

    fn response_a(&self, axis: &Direction, l: &[f64; 3]) -> i32 {
        offset_response(axis, l)
    }

    fn response_b(&self, axis: &Direction, l: &[f64; 3]) -> i32 {
        -offset_response(axis, l)
    }
}

#[test]
fn factorized_models_never_violate() {
    let mut s = Stream::new(2024);
    let triples: Vec<BellTriple> = (0..500).map(|_| BellTriple::random(&mut s)).collect();
    let checks = lhv_bell_check(&OffsetModel, &triples, 1_000_000, &mut s).unwrap();
    for c in &checks {
        assert!(c.report.margin >= -c.report.tol, "{c:?}");
    }
    let mut s = Stream::new(11);
    let triples: Vec<BellTriple> = (0..100).map(|_| BellTriple::random(&mut s)).collect();
    let checks = lhv_bell_check(&SignModel, &triples, 1_000_000, &mut s).unwrap();
    assert!(checks.iter().all(|c| !c.report.violated));
}

#[test]
fn sign_model_in_the_symmetric_geometry() {
    let t = BellTriple::symmetric(PI / 3.0).unwrap();
    // P(â,b̂) = P(b̂,ĉ) = −1/3 and P(â,ĉ) = 1/3: the inequality is saturated
    let r = evaluate_inequality(|a, b| sign_model_correlation(a.angle_between(b)), &t, ANALYTIC_TOL).unwrap();
    assert!((r.lhs - 2.0 / 3.0).abs() < 1e-12 && (r.rhs - 2.0 / 3.0).abs() < 1e-12 && !r.violated);
    let checks = lhv_bell_check(&SignModel, &[t], 1_000_000, &mut Stream::new(3)).unwrap();
    assert!(!checks[0].report.violated);
    assert!((checks[0].report.lhs - 2.0 / 3.0).abs() < DECISION_SIGMAS * 1e-3);
}

#[test]
fn bell_check_rejects_small_n() {
    let t = BellTriple::symmetric(1.0).unwrap();
    assert!(matches!(lhv_bell_check(&SignModel, &[t], 6400, &mut Stream::new(0)), Err(Error::InvalidArgument(_))));
}

#[test]
fn unknown_model_name() {
    assert!(matches!(BuiltinModel::by_name("cosine"), Err(Error::Config(_))));
    assert!(BuiltinModel::by_name("sign").is_ok());
}

#[test]
fn trial_returns_plus_minus_one() {
    let mut s = Stream::new(8);
    for _ in 0..1000 {
        let (a, b) = lhv_trial(&SignModel, &Direction::random(&mut s), &Direction::random(&mut s), &mut s).unwrap();
        assert!(a.abs() == 1 && b.abs() == 1);
    }
}

/// Rotation about ŷ by `angle`, then about ẑ by `turn`.
fn rotate(d: &Direction, angle: f64, turn: f64) -> Direction {
    let [x, y, z] = d.unit_vector();
    let (s, c) = angle.sin_cos();
    let (x, z) = (c * x + s * z, -s * x + c * z);
    let (s, c) = turn.sin_cos();
    Direction::from_vector([c * x - s * y, s * x + c * y, z]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn singlet_report_is_rotation_invariant(a in axis(), b in axis(), c in axis(), angle in 0.0..PI, turn in 0.0..TAU) {
        let t = BellTriple::new(a, b, c);
        let r = BellTriple::new(rotate(&a, angle, turn), rotate(&b, angle, turn), rotate(&c, angle, turn));
        let x = evaluate_inequality(singlet_correlation, &t, ANALYTIC_TOL).unwrap();
        let y = evaluate_inequality(singlet_correlation, &r, ANALYTIC_TOL).unwrap();
        prop_assert!((x.lhs - y.lhs).abs() < 1e-10);
        prop_assert!((x.rhs - y.rhs).abs() < 1e-10);
    }

    #[test]
    fn sign_model_closed_form_never_violates(a in axis(), b in axis(), c in axis()) {
        let t = BellTriple::new(a, b, c);
        let r = evaluate_inequality(|x, y| sign_model_correlation(x.angle_between(y)), &t, ANALYTIC_TOL).unwrap();
        prop_assert!(!r.violated, "{r:?}");
    }
}
