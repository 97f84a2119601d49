//! Points of the real projective line as primitive integer pairs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::rational::{serde_bigint, Rational};
use crate::exact::QMatrix;

/// The line through (a, b), with gcd(a, b) = 1 and b > 0, or (1, 0).
///
/// Ordered by angle in [0, π): u < v iff det[u | v] > 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    a: BigInt,
    b: BigInt,
}

impl ProjPoint {
    pub fn new(a: BigInt, b: BigInt) -> Self {
        assert!(!(a.is_zero() && b.is_zero()), "zero vector has no direction");
        let g = a.gcd(&b);
        let (mut a, mut b) = (a / &g, b / &g);
        if b.is_negative() || (b.is_zero() && a.is_negative()) {
            a = -a;
            b = -b;
        }
        ProjPoint { a, b }
    }

    pub fn from_i64(a: i64, b: i64) -> Self {
        Self::new(BigInt::from(a), BigInt::from(b))
    }

    /// Line through a rational vector.
    pub fn from_rationals(x: &Rational, y: &Rational) -> Self {
        let l = x.denom().lcm(y.denom());
        let xa = (x * Rational::from_integer(l.clone())).to_integer();
        let yb = (y * Rational::from_integer(l)).to_integer();
        Self::new(xa, yb)
    }

    pub fn infinity() -> Self {
        ProjPoint { a: BigInt::one(), b: BigInt::zero() }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn is_origin(&self) -> bool {
        self.b.is_zero()
    }

    pub fn det(&self, o: &ProjPoint) -> BigInt {
        &self.a * &o.b - &self.b * &o.a
    }

    pub fn coords(&self) -> (Rational, Rational) {
        (Rational::from_integer(self.a.clone()), Rational::from_integer(self.b.clone()))
    }

    /// Image under a 2×2 matrix.
    pub fn apply(&self, g: &QMatrix) -> ProjPoint {
        assert_eq!(g.dim(), 2);
        let (x, y) = self.coords();
        let v = g.mul_vec(&[x, y]);
        Self::from_rationals(&v[0], &v[1])
    }

    /// Angle of the line in [0, π), approximately.
    pub fn angle_f64(&self) -> f64 {
        let t = crate::exact::rational::to_f64(&Rational::from_integer(self.b.clone()))
            .atan2(crate::exact::rational::to_f64(&Rational::from_integer(self.a.clone())));
        if t >= std::f64::consts::PI {
            0.0
        } else {
            t
        }
    }

    /// Sum of the primitive vectors; lies strictly between self and o when self < o.
    pub fn between(&self, o: &ProjPoint) -> ProjPoint {
        ProjPoint::new(&self.a + &o.a, &self.b + &o.b)
    }

    /// Point of the piecewise-linear chart t ∈ [0, 1) → ℝℙ¹, increasing in angle.
    pub fn from_chart(t: &Rational) -> ProjPoint {
        let one = Rational::one();
        let two = Rational::from_integer(2.into());
        let half = Rational::new(1.into(), 2.into());
        assert!(!t.is_negative() && t < &one, "chart parameter outside [0, 1)");
        if t <= &half {
            Self::from_rationals(&(&one - &two * t), &(&two * t))
        } else {
            Self::from_rationals(&(&one - &two * t), &(&two - &two * t))
        }
    }

    /// Inverse of `from_chart`.
    pub fn to_chart(&self) -> Rational {
        let (a, b) = self.coords();
        // t ≤ 1/2 when a ≥ 0: (1 − 2t) : 2t = a : b  ⇒  t = b / (2(a + b))
        // otherwise (1 − 2t) : (2 − 2t) = a : b  ⇒  t = (b − 2a)/(2(b − a))
        let two = Rational::from_integer(2.into());
        if !a.is_negative() {
            &b / (&two * (&a + &b))
        } else {
            (&b - &two * &a) / (&two * (&b - &a))
        }
    }
}

impl Ord for ProjPoint {
    fn cmp(&self, o: &Self) -> Ordering {
        if self == o {
            return Ordering::Equal;
        }
        if self.det(o).is_positive() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.a, self.b)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.a, self.b)
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    proj: [Num; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct Num(#[serde(with = "serde_bigint")] BigInt);

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Repr { proj: [Num(self.a.clone()), Num(self.b.clone())] }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let Repr { proj: [Num(a), Num(b)] } = Repr::deserialize(d)?;
        if a.is_zero() && b.is_zero() {
            return Err(serde::de::Error::custom("projective point (0:0)"));
        }
        let p = ProjPoint::new(a.clone(), b.clone());
        if p.a != a || p.b != b {
            return Err(serde::de::Error::custom("projective point not in normal form"));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    #[test]
    fn normal_form_and_order() {
        assert_eq!(ProjPoint::from_i64(-2, -4), ProjPoint::from_i64(1, 2));
        assert_eq!(ProjPoint::from_i64(-3, 0), ProjPoint::infinity());
        let pts = [ProjPoint::from_i64(1, 0), ProjPoint::from_i64(1, 1), ProjPoint::from_i64(0, 1), ProjPoint::from_i64(-1, 1)];
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn chart_round_trip() {
        for t in [rat(0, 1), rat(1, 10), rat(1, 2), rat(7, 10), rat(99, 100)] {
            assert_eq!(ProjPoint::from_chart(&t).to_chart(), t);
        }
        assert!(ProjPoint::from_chart(&rat(3, 10)) < ProjPoint::from_chart(&rat(4, 10)));
        assert!(ProjPoint::from_chart(&rat(6, 10)) < ProjPoint::from_chart(&rat(9, 10)));
    }

    #[test]
    fn json_shape() {
        let p = ProjPoint::from_i64(-3, 2);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"proj":[-3,2]}"#);
        assert_eq!(serde_json::from_str::<ProjPoint>(&s).unwrap(), p);
        assert!(serde_json::from_str::<ProjPoint>(r#"{"proj":[2,4]}"#).is_err());
    }
}
