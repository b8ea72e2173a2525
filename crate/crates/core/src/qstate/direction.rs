use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A measurement axis on the unit sphere, stored as polar angle `theta` in
/// `[0, π]` and azimuth `phi` in `[0, 2π)`. At the poles `phi` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Angles", into = "Angles")]
pub struct Direction {
    theta: f64,
    phi: f64,
    unit: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct Angles {
    theta: f64,
    phi: f64,
}

impl TryFrom<Angles> for Direction {
    type Error = Error;
    fn try_from(a: Angles) -> Result<Self> {
        Direction::new(a.theta, a.phi)
    }
}

impl From<Direction> for Angles {
    fn from(d: Direction) -> Angles {
        Angles {
            theta: d.theta,
            phi: d.phi,
        }
    }
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

impl Direction {
    /// Builds a canonical direction from arbitrary finite angles.
    ///
    /// Polar angles outside `[0, π]` are folded back onto the sphere, so
    /// `new(-θ, 0)` is the axis tilted by `θ` towards `-x`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidDirection(format!(
                "angles must be finite, got theta={theta}, phi={phi}"
            )));
        }
        let (mut theta, mut phi) = (theta, phi);
        if !(0.0..=PI).contains(&theta) {
            theta = theta.rem_euclid(TAU);
            if theta > PI {
                theta = TAU - theta;
                phi += PI;
            }
        }
        phi = phi.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU
        if phi >= TAU {
            phi = 0.0;
        }
        if theta == 0.0 || theta == PI {
            phi = 0.0;
        }
        Ok(Self::from_canonical(theta, phi))
    }

    fn from_canonical(theta: f64, phi: f64) -> Self {
        Self {
            theta,
            phi,
            unit: unit(theta, phi),
        }
    }

    /// Direction of a nonzero 3-vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidDirection(format!(
                "cannot normalize vector {v:?}"
            )));
        }
        let z = (v[2] / norm).clamp(-1.0, 1.0);
        let theta = z.acos();
        let phi = v[1].atan2(v[0]);
        Self::new(theta, phi)
    }

    pub fn z() -> Self {
        Self::from_canonical(0.0, 0.0)
    }

    pub fn x() -> Self {
        Self::from_canonical(PI / 2.0, 0.0)
    }

    pub fn y() -> Self {
        Self::from_canonical(PI / 2.0, PI / 2.0)
    }

    /// Axis in the `phi = 0` plane at polar angle `theta` (negative tilts toward `-x`).
    pub fn in_xz_plane(theta: f64) -> Result<Self> {
        Self::new(theta, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(sinθ cosφ, sinθ sinφ, cosθ)`.
    #[inline]
    pub fn unit_vector(&self) -> [f64; 3] {
        self.unit
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0)
    }

    /// Angle between the two axes, in `[0, π]`.
    pub fn angle_between(&self, other: &Direction) -> f64 {
        self.dot(other).acos()
    }

    /// Same axis up to `tol` in each unit-vector component.
    pub fn approx_eq(&self, other: &Direction, tol: f64) -> bool {
        let a = self.unit_vector();
        let b = other.unit_vector();
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Uniformly random axis on the sphere; consumes two variates.
    pub fn random(stream: &mut crate::rng::Stream) -> Self {
        let cos_theta = 2.0 * stream.uniform() - 1.0;
        let phi = TAU * stream.uniform();
        Self::new(cos_theta.clamp(-1.0, 1.0).acos(), phi).expect("finite angles")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn poles_have_zero_azimuth() {
        let north = Direction::new(0.0, 1.3).unwrap();
        assert_eq!(north.phi(), 0.0);
        let south = Direction::new(PI, 4.0).unwrap();
        assert_eq!(south.phi(), 0.0);
        assert_eq!(south.theta(), PI);
    }

    #[test]
    fn negative_theta_folds_to_opposite_azimuth() {
        let d = Direction::new(-PI / 3.0, 0.0).unwrap();
        assert!((d.theta() - PI / 3.0).abs() < 1e-15);
        assert!((d.phi() - PI).abs() < 1e-15);
        let v = d.unit_vector();
        assert!((v[0] + (PI / 3.0).sin()).abs() < 1e-12);
        assert!((v[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn azimuth_wraps() {
        let d = Direction::new(1.0, -0.5).unwrap();
        assert!((d.phi() - (TAU - 0.5)).abs() < 1e-15);
        let d = Direction::new(1.0, 7.0).unwrap();
        assert!((d.phi() - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Direction::new(f64::NAN, 0.0).is_err());
        assert!(Direction::new(0.0, f64::INFINITY).is_err());
        assert!(Direction::from_vector([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn unit_norm_and_vector_round_trip() {
        let mut s = Stream::new(3);
        for _ in 0..1000 {
            let d = Direction::random(&mut s);
            let v = d.unit_vector();
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
            assert!((0.0..=PI).contains(&d.theta()));
            assert!((0.0..TAU).contains(&d.phi()));
            let back = Direction::from_vector(v).unwrap();
            assert!(back.approx_eq(&d, 1e-12));
        }
    }

    #[test]
    fn serializes_as_angles() {
        let d = Direction::new(1.25, 0.5).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"theta":1.25,"phi":0.5}"#);
        let back: Direction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Direction>(r#"{"theta":1e400,"phi":0}"#).is_err());
    }

    #[test]
    fn angle_between_axes() {
        assert!((Direction::z().angle_between(&Direction::x()) - PI / 2.0).abs() < 1e-15);
        let a = Direction::in_xz_plane(PI / 3.0).unwrap();
        let c = Direction::in_xz_plane(-PI / 3.0).unwrap();
        assert!((a.angle_between(&c) - 2.0 * PI / 3.0).abs() < 1e-12);
    }
}
