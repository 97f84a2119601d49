//! Real quadratic numbers a + b√D with rational a, b and a fixed positive
//! non-square radicand D. Used for the exact eigenlines of 2×2 loxodromic
//! matrices, whose eigenvalues are (t ± √(t² − 4)) / 2.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::sign;
use super::rational::{serde_rational, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadSurd {
    #[serde(with = "serde_rational")]
    pub a: Rational,
    #[serde(with = "serde_rational")]
    pub b: Rational,
    #[serde(with = "serde_rational")]
    pub radicand: Rational,
}

impl QuadSurd {
    pub fn new(a: Rational, b: Rational, radicand: Rational) -> Self {
        assert!(radicand.is_positive());
        QuadSurd { a, b, radicand }
    }

    pub fn rational(a: Rational, radicand: &Rational) -> Self {
        QuadSurd { a, b: Rational::zero(), radicand: radicand.clone() }
    }

    /// The same number written over another radicand, when the ratio of radicands is a rational square.
    pub fn rebase(&self, radicand: &Rational) -> Option<QuadSurd> {
        if self.b.is_zero() || &self.radicand == radicand {
            return Some(QuadSurd { a: self.a.clone(), b: self.b.clone(), radicand: radicand.clone() });
        }
        let r = rational_sqrt(&(&self.radicand / radicand))?;
        Some(QuadSurd { a: self.a.clone(), b: &self.b * r, radicand: radicand.clone() })
    }

    /// Brings both operands over a common radicand; panics if they lie in different fields.
    fn unify(&self, o: &QuadSurd) -> (QuadSurd, QuadSurd) {
        if self.radicand == o.radicand {
            return (self.clone(), o.clone());
        }
        let target = if self.b.is_zero() { o.radicand.clone() } else { self.radicand.clone() };
        let x = self.rebase(&target);
        let y = o.rebase(&target);
        match (x, y) {
            (Some(x), Some(y)) => (x, y),
            _ => panic!("quadratic numbers from different fields"),
        }
    }

    pub fn add(&self, o: &QuadSurd) -> QuadSurd {
        let (x, o) = self.unify(o);
        QuadSurd { a: &x.a + &o.a, b: &x.b + &o.b, radicand: x.radicand }
    }

    pub fn sub(&self, o: &QuadSurd) -> QuadSurd {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> QuadSurd {
        QuadSurd { a: -self.a.clone(), b: -self.b.clone(), radicand: self.radicand.clone() }
    }

    pub fn mul(&self, o: &QuadSurd) -> QuadSurd {
        let (x, o) = self.unify(o);
        QuadSurd {
            a: &x.a * &o.a + &x.b * &o.b * &x.radicand,
            b: &x.a * &o.b + &x.b * &o.a,
            radicand: x.radicand,
        }
    }

    pub fn scale(&self, k: &Rational) -> QuadSurd {
        QuadSurd { a: &self.a * k, b: &self.b * k, radicand: self.radicand.clone() }
    }

    pub fn conj(&self) -> QuadSurd {
        QuadSurd { a: self.a.clone(), b: -self.b.clone(), radicand: self.radicand.clone() }
    }

    /// Field norm a² − b²D.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    /// Exact sign, assuming the radicand is not a rational square.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with b²D
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * &self.radicand;
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * to_f64(&self.radicand).sqrt()
    }
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// a + b√disc in lowest form: rational when disc is a rational square.
pub fn surd(a: Rational, b: Rational, disc: &Rational) -> QuadSurd {
    match rational_sqrt(disc) {
        Some(s) => QuadSurd { a: a + b * s, b: Rational::zero(), radicand: Rational::one() },
        None => QuadSurd::new(a, b, disc.clone()),
    }
}

/// A point of ℝℙ¹ with coordinates in ℚ(√D), up to nonzero real scaling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadPoint {
    pub x: QuadSurd,
    pub y: QuadSurd,
}

impl QuadPoint {
    pub fn new(x: QuadSurd, y: QuadSurd) -> Self {
        assert!(!(x.is_zero() && y.is_zero()));
        QuadPoint { x, y }
    }

    /// Sign of det[(p, q) | (x, y)] for a rational direction (p, q).
    pub fn det_sign_from(&self, p: &Rational, q: &Rational) -> i32 {
        self.y.scale(p).sub(&self.x.scale(q)).signum()
    }

    /// Sign of det[self | other].
    pub fn det_sign(&self, o: &QuadPoint) -> i32 {
        self.x.mul(&o.y).sub(&self.y.mul(&o.x)).signum()
    }

    pub fn same_point(&self, o: &QuadPoint) -> bool {
        self.det_sign(o) == 0
    }

    /// The point as a rational projective point, when both coordinates are rational.
    pub fn as_rational(&self) -> Option<crate::proj::ProjPoint> {
        (self.x.b.is_zero() && self.y.b.is_zero())
            .then(|| crate::proj::ProjPoint::from_rationals(&self.x.a, &self.y.a))
    }

    /// A nearby rational point, exact when the point is rational.
    pub fn approximate(&self, bits: u32) -> crate::proj::ProjPoint {
        if let Some(p) = self.as_rational() {
            return p;
        }
        let approx = |s: &QuadSurd| {
            let root = super::interval::IntervalReal::point(s.radicand.clone()).sqrt(bits).midpoint();
            &s.a + &s.b * root
        };
        crate::proj::ProjPoint::from_rationals(&approx(&self.x), &approx(&self.y))
    }

    /// Image under the linear map [[a, b], [c, d]].
    pub fn apply(&self, m: [&Rational; 4]) -> QuadPoint {
        let [a, b, c, d] = m;
        QuadPoint {
            x: self.x.scale(a).add(&self.y.scale(b)),
            y: self.x.scale(c).add(&self.y.scale(d)),
        }
    }

    /// Angle of the line in [0, π), approximately.
    pub fn angle_f64(&self) -> f64 {
        let (x, y) = (self.x.to_f64(), self.y.to_f64());
        let t = y.atan2(x);
        if t < 0.0 {
            t + std::f64::consts::PI
        } else if t >= std::f64::consts::PI {
            t - std::f64::consts::PI
        } else {
            t
        }
    }

    /// Representative with y = 1 (slope form x/y), or None for the point at infinity.
    pub fn inverse_slope(&self) -> Option<QuadSurd> {
        if self.y.is_zero() {
            return None;
        }
        // x / y = x * conj(y) / norm(y)
        let n = self.y.norm();
        Some(self.x.mul(&self.y.conj()).scale(&(Rational::one() / n)))
    }
}
