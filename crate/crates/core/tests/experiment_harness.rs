use std::f64::consts::{FRAC_PI_2, PI};

use spinlab::bell::BellTriple;
use spinlab::experiment::{
    bell_experiment, estimate_correlation, run_experiment, simulate_correlation, BellExperimentConfig,
    ExperimentConfig, SettingsPolicy, Source, TrialOrder, TrialRecord,
};
use spinlab::furry::furry_mixture;
use spinlab::measure::{joint_correlation, Outcome};
use spinlab::qstate::singlet;
use spinlab::stats::{dichotomic_stderr, CorrelationEstimate, DECISION_SIGMAS};
use spinlab::{Direction, Error, Stream};

fn config(source: Source, settings: SettingsPolicy, n: u64, seed: u64, order: TrialOrder) -> ExperimentConfig {
    ExperimentConfig { source, settings, n_trials: n, seed, order }
}

#[test]
fn singlet_z_z_records_anticorrelate() {
    let z = Direction::z();
    let c = config(Source::Quantum(singlet()), SettingsPolicy::Fixed(z, z), 10_000, 42, TrialOrder::Simultaneous);
    let records = run_experiment(&c).unwrap();
    assert_eq!(records.len(), 10_000);
    assert!(records.iter().all(|r| r.product() == -1));
    assert!(records.iter().enumerate().all(|(i, r)| r.trial_id == i as u64));
    assert_eq!(records, run_experiment(&c).unwrap());
}

#[test]
fn record_count_for_every_source_and_order() {
    let a = Direction::new(0.3, 0.0).unwrap();
    let b = Direction::new(1.3, 2.0).unwrap();
    let sources = [
        Source::Quantum(singlet()),
        Source::Lhv("sign".into()),
        Source::Furry(furry_mixture(&singlet())),
    ];
    for source in sources {
        for order in [TrialOrder::Simultaneous, TrialOrder::AFirst, TrialOrder::BFirst] {
            for n in [1u64, 65_535, 65_537, 140_000] {
                let c = config(source.clone(), SettingsPolicy::PerTrial(vec![(a, b), (b, a)]), n, 7, order);
                let records = run_experiment(&c).unwrap();
                assert_eq!(records.len() as u64, n);
                assert!(records.iter().all(|r| r.order == order));
            }
        }
    }
}

#[test]
fn fixed_pair_estimate_matches_record_path() {
    let a = Direction::z();
    let b = Direction::in_xz_plane(PI / 3.0).unwrap();
    for order in [TrialOrder::Simultaneous, TrialOrder::AFirst, TrialOrder::BFirst] {
        let source = Source::Quantum(singlet());
        let c = config(source.clone(), SettingsPolicy::Fixed(a, b), 300_000, 8, order);
        let from_records = estimate_correlation(&run_experiment(&c).unwrap(), (&a, &b)).unwrap();
        let folded = simulate_correlation(&source, &a, &b, 300_000, 8, order).unwrap();
        assert_eq!(from_records, folded);
    }
}

#[test]
fn million_singlet_records_at_pi_over_three() {
    let a = Direction::z();
    let b = Direction::in_xz_plane(PI / 3.0).unwrap();
    let c = config(Source::Quantum(singlet()), SettingsPolicy::Fixed(a, b), 1_000_000, 1, TrialOrder::Simultaneous);
    let e = estimate_correlation(&run_experiment(&c).unwrap(), (&a, &b)).unwrap();
    assert!(e.agrees_with(-0.5, DECISION_SIGMAS));
    assert!((e.stderr - 0.00087).abs() < 1e-5);
}

#[test]
fn sign_model_records_at_right_angle() {
    let a = Direction::z();
    let b = Direction::x();
    let c = config(Source::Lhv("sign".into()), SettingsPolicy::Fixed(a, b), 1_000_000, 2, TrialOrder::Simultaneous);
    let e = estimate_correlation(&run_experiment(&c).unwrap(), (&a, &b)).unwrap();
    assert!(e.agrees_with(0.0, DECISION_SIGMAS), "{e:?}");
}

#[test]
fn estimator_is_consistent_across_seeds() {
    let mut s = Stream::new(99);
    let mut within = 0;
    for seed in 0..200u64 {
        let a = Direction::random(&mut s);
        let b = Direction::random(&mut s);
        let e = simulate_correlation(&Source::Quantum(singlet()), &a, &b, 100_000, seed, TrialOrder::Simultaneous).unwrap();
        let exact = joint_correlation(&singlet(), &a, &b);
        within += usize::from((e.mean - exact).abs() < 4.0 * e.stderr + 1e-12);
    }
    assert!(within >= 198, "{within}/200 within 4σ");
}

#[test]
fn stderr_scales_with_root_n() {
    for mean in [-0.9, -0.5, 0.0, 0.3] {
        let ratio = dichotomic_stderr(mean, 1000) / dichotomic_stderr(mean, 2000);
        assert!((ratio - 2f64.sqrt()).abs() / 2f64.sqrt() < 0.01);
    }
    let all_anti = CorrelationEstimate::from_sum(-500, 500).unwrap();
    assert_eq!((all_anti.mean, all_anti.stderr), (-1.0, 0.0));
}

#[test]
fn filter_uses_matching_trials_only() {
    let z = Direction::z();
    let x = Direction::x();
    let rec = |id, a: Direction, oa, b: Direction, ob| TrialRecord {
        trial_id: id,
        setting_a: a,
        outcome_a: oa,
        setting_b: b,
        outcome_b: ob,
        order: TrialOrder::Simultaneous,
    };
    use Outcome::{Down as D, Up as U};
    let records = vec![
        rec(0, z, U, z, D),
        rec(1, z, U, x, U),
        rec(2, z, D, z, U),
        rec(3, x, U, z, U),
        rec(4, z, U, z, U),
        rec(5, z, D, x, D),
        rec(6, z, U, z, D),
        rec(7, x, D, x, D),
        rec(8, z, D, z, D),
        rec(9, z, U, x, D),
    ];
    let zz = estimate_correlation(&records, (&z, &z)).unwrap();
    // trials 0, 2, 4, 6, 8: products −1, −1, +1, −1, +1
    assert_eq!(zz.n, 5);
    assert!((zz.mean + 0.2).abs() < 1e-15);
    let zx = estimate_correlation(&records, (&z, &x)).unwrap();
    assert_eq!(zx.n, 3);
    assert!((zx.mean - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(estimate_correlation(&records, (&x, &Direction::y())), Err(Error::EmptySelection));
}

#[test]
fn per_trial_settings_are_drawn_from_the_list() {
    let pairs = vec![
        (Direction::z(), Direction::x()),
        (Direction::x(), Direction::z()),
        (Direction::y(), Direction::y()),
    ];
    let c = config(Source::Quantum(singlet()), SettingsPolicy::PerTrial(pairs.clone()), 300_000, 5, TrialOrder::Simultaneous);
    let records = run_experiment(&c).unwrap();
    for (a, b) in &pairs {
        let e = estimate_correlation(&records, (a, b)).unwrap();
        assert!((e.n as f64 - 100_000.0).abs() < 4.0 * (300_000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt(), "{e:?}");
        assert!(e.agrees_with(joint_correlation(&singlet(), a, b), DECISION_SIGMAS));
    }
}

#[test]
fn bell_experiments_in_the_symmetric_geometry() {
    let triple = BellTriple::symmetric(PI / 3.0).unwrap();
    let run = |source| {
        bell_experiment(&BellExperimentConfig {
            source,
            triple,
            n_per_pair: 1_000_000,
            seed: 3,
            order: TrialOrder::Simultaneous,
        })
        .unwrap()
    };
    let q = run(Source::Quantum(singlet()));
    assert!(q.report.violated);
    assert!((q.report.margin + 0.5).abs() <= q.report.tol);
    assert!(!run(Source::Lhv("sign".into())).report.violated);
    assert!(!run(Source::Furry(furry_mixture(&singlet()))).report.violated);
}

#[test]
fn invalid_configurations() {
    let z = Direction::z();
    let c = config(Source::Lhv("nope".into()), SettingsPolicy::Fixed(z, z), 10, 0, TrialOrder::Simultaneous);
    assert!(matches!(run_experiment(&c), Err(Error::Config(_))));
    let c = config(Source::Quantum(singlet()), SettingsPolicy::PerTrial(vec![]), 10, 0, TrialOrder::Simultaneous);
    assert!(run_experiment(&c).is_err());
    let c = config(Source::Quantum(singlet()), SettingsPolicy::Fixed(z, z), 0, 0, TrialOrder::Simultaneous);
    assert!(run_experiment(&c).is_err());
    let small = BellExperimentConfig {
        source: Source::Quantum(singlet()),
        triple: BellTriple::symmetric(FRAC_PI_2).unwrap(),
        n_per_pair: 100,
        seed: 0,
        order: TrialOrder::Simultaneous,
    };
    assert!(bell_experiment(&small).is_err());
}
