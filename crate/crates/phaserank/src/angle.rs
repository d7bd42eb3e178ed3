use std::f64::consts::{PI, TAU};
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An angle canonically reduced to `[0, 2*pi)`, identifying a point of the
/// unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    /// Reduce `x` modulo `2*pi` into `[0, 2*pi)`. Panics on non-finite input;
    /// use [`canonical_angle`] for checked construction.
    pub fn new(x: f64) -> Self {
        assert!(x.is_finite(), "angle must be finite");
        let mut r = x.rem_euclid(TAU);
        // rem_euclid of a tiny negative value can round up to exactly 2*pi.
        if r >= TAU {
            r -= TAU;
        }
        Angle(r)
    }

    /// Exact multiple of pi: `(num / den) * pi`.
    pub fn from_pi_fraction(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator in pi fraction".into()));
        }
        Ok(Angle::new(num as f64 * PI / den as f64))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The unit complex number `e^{i self}`.
    pub fn unit(self) -> Complex64 {
        Complex64::new(self.0.cos(), self.0.sin())
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    /// Circular distance to `other` in `[0, pi]`.
    pub fn circ_dist(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }

    /// Distance to the nearest multiple of pi (collinearity measure).
    pub fn dist_mod_pi(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).rem_euclid(PI);
        d.min(PI - d)
    }
}

/// Checked canonical reduction of a raw radian value into `[0, 2*pi)`.
pub fn canonical_angle(x: f64) -> Result<Angle> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite angle input: {x}")));
    }
    Ok(Angle::new(x))
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle::new(self.0 - rhs.0)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_angle(0.0).unwrap().value(), 0.0);
        assert_eq!(canonical_angle(TAU).unwrap().value(), 0.0);
        assert!((canonical_angle(-PI / 2.0).unwrap().value() - 3.0 * PI / 2.0).abs() < 1e-15);
        assert!(canonical_angle(f64::NAN).is_err());
        assert!(canonical_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn tiny_negative_reduces_below_tau() {
        let a = canonical_angle(-1e-18).unwrap();
        assert!(a.value() < TAU);
        assert!(a.value() >= 0.0);
    }

    proptest! {
        #[test]
        fn idempotent(x in -1e6..1e6f64) {
            let once = canonical_angle(x).unwrap();
            let twice = canonical_angle(once.value()).unwrap();
            prop_assert_eq!(once.value(), twice.value());
        }

        #[test]
        fn in_range(x in -1e9..1e9f64) {
            let a = canonical_angle(x).unwrap();
            prop_assert!(a.value() >= 0.0 && a.value() < TAU);
        }
    }
}
