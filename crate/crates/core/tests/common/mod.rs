#![allow(dead_code)]

use proptest::prelude::*;
use spinlab::qstate::{Direction, TwoQubitKet, C64};
use spinlab::Stream;

/// Axis strategy covering the whole sphere, poles included.
pub fn axis() -> impl Strategy<Value = Direction> {
    (0.0..=std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(t, p)| Direction::new(t, p).unwrap())
}

/// Normalized two-qubit kets from eight amplitude components.
pub fn ket() -> impl Strategy<Value = TwoQubitKet> {
    proptest::array::uniform8(-1.0f64..1.0)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| TwoQubitKet::new([0, 1, 2, 3].map(|i| C64::new(v[2 * i], v[2 * i + 1]))).unwrap())
}

pub fn random_state(stream: &mut Stream) -> TwoQubitKet {
    let mut amps = [C64::new(0.0, 0.0); 4];
    for a in &mut amps {
        *a = C64::new(2.0 * stream.uniform() - 1.0, 2.0 * stream.uniform() - 1.0);
    }
    TwoQubitKet::new(amps).unwrap()
}

/// Hand-written eigenkets of n̂·σ: `(cos θ/2, e^{iφ} sin θ/2)` for +1 and
/// `(sin θ/2, −e^{iφ} cos θ/2)` for −1.
pub fn eigenket(n: &Direction, sign: i8) -> [C64; 2] {
    let (s, c) = (n.theta() / 2.0).sin_cos();
    let e = C64::from_polar(1.0, n.phi());
    if sign > 0 {
        [C64::new(c, 0.0), e * s]
    } else {
        [C64::new(s, 0.0), -e * c]
    }
}

/// Born probabilities `|⟨u_i ⊗ v_j|ψ⟩|²` by explicit enumeration, ordered (++, +−, −+, −−).
pub fn born_probabilities(psi: &TwoQubitKet, a: &Direction, b: &Direction) -> [f64; 4] {
    let amps = psi.amplitudes();
    let mut out = [0.0; 4];
    for (i, sa) in [1i8, -1].into_iter().enumerate() {
        for (j, sb) in [1i8, -1].into_iter().enumerate() {
            let u = eigenket(a, sa);
            let v = eigenket(b, sb);
            let mut overlap = C64::new(0.0, 0.0);
            for k in 0..2 {
                for l in 0..2 {
                    overlap += (u[k] * v[l]).conj() * amps[2 * k + l];
                }
            }
            out[2 * i + j] = overlap.norm_sqr();
        }
    }
    out
}

/// `sqrt(p(1−p)/n)`.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
