//! Closed intervals with dyadic endpoints and outward-rounded elementary functions.
//!
//! Every function here returns an interval guaranteed to contain the exact
//! real value. Transcendental bounds are computed from truncated power series
//! with an explicit tail bound, using only rational arithmetic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{ceil_dyadic, floor_dyadic, floor_log2, int, pow2, rat, rational_to_string, serde_rational, to_f64, Rational};

/// Guard bits used by series evaluations on top of the requested precision.
const GUARD: u32 = 16;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalReal {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
}

impl IntervalReal {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval with lo > hi");
        IntervalReal { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        IntervalReal { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    /// Widens the endpoints to the 2^-prec grid.
    pub fn round_out(&self, prec: u32) -> Self {
        IntervalReal { lo: floor_dyadic(&self.lo, prec), hi: ceil_dyadic(&self.hi, prec) }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, o: &IntervalReal) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn overlaps(&self, o: &IntervalReal) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn intersect(&self, o: &IntervalReal) -> Option<IntervalReal> {
        let lo = (&self.lo).max(&o.lo).clone();
        let hi = (&self.hi).min(&o.hi).clone();
        (lo <= hi).then(|| IntervalReal { lo, hi })
    }

    pub fn hull(&self, o: &IntervalReal) -> IntervalReal {
        IntervalReal { lo: (&self.lo).min(&o.lo).clone(), hi: (&self.hi).max(&o.hi).clone() }
    }

    /// Strictly greater than every point of `o`.
    pub fn certainly_gt(&self, o: &IntervalReal) -> bool {
        self.lo > o.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn neg(&self) -> Self {
        IntervalReal { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn add(&self, o: &IntervalReal) -> Self {
        IntervalReal { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &IntervalReal) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_negative() {
            IntervalReal { lo: &self.hi * k, hi: &self.lo * k }
        } else {
            IntervalReal { lo: &self.lo * k, hi: &self.hi * k }
        }
    }

    pub fn mul(&self, o: &IntervalReal) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        IntervalReal { lo, hi }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            IntervalReal { lo: Rational::zero(), hi: (-&self.lo).max(self.hi.clone()) }
        }
    }

    pub fn square(&self) -> Self {
        let a = self.abs();
        IntervalReal { lo: &a.lo * &a.lo, hi: &a.hi * &a.hi }
    }

    /// Enclosure of the natural logarithm; requires a positive interval.
    pub fn ln(&self, prec: u32) -> Self {
        assert!(self.lo.is_positive(), "logarithm of a non-positive interval");
        IntervalReal { lo: ln_bounds(&self.lo, prec).0, hi: ln_bounds(&self.hi, prec).1 }
    }

    /// Enclosure of the square root; negative parts are clamped to zero.
    pub fn sqrt(&self, prec: u32) -> Self {
        let lo = if self.lo.is_positive() { sqrt_bounds(&self.lo, prec).0 } else { Rational::zero() };
        let hi = if self.hi.is_positive() { sqrt_bounds(&self.hi, prec).1 } else { Rational::zero() };
        IntervalReal { lo, hi }
    }

    /// Enclosure of arctan on a non-negative interval.
    pub fn atan(&self, prec: u32) -> Self {
        assert!(!self.lo.is_negative(), "atan implemented for non-negative arguments only");
        IntervalReal { lo: atan_bounds(&self.lo, prec).0, hi: atan_bounds(&self.hi, prec).1 }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    /// Compare midpoints; used only for presentation order.
    pub fn cmp_mid(&self, o: &IntervalReal) -> Ordering {
        self.midpoint().cmp(&o.midpoint())
    }
}

impl fmt::Debug for IntervalReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6e}, {:.6e}]", to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl fmt::Display for IntervalReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rational_to_string(&self.lo), rational_to_string(&self.hi))
    }
}

/// Enclosure of pi.
pub fn pi(prec: u32) -> IntervalReal {
    let w = prec + GUARD;
    let (a_lo, a_hi) = atan_series(&rat(1, 5), w);
    let (b_lo, b_hi) = atan_series(&rat(1, 239), w);
    let lo = int(16) * a_lo - int(4) * b_hi;
    let hi = int(16) * a_hi - int(4) * b_lo;
    IntervalReal { lo, hi }.round_out(prec)
}

pub fn ln2(prec: u32) -> IntervalReal {
    let (lo, hi) = atanh_series(&rat(1, 3), prec + GUARD);
    IntervalReal { lo: lo * int(2), hi: hi * int(2) }.round_out(prec)
}

/// Lower and upper dyadic bounds on ln(x), x > 0.
pub fn ln_bounds(x: &Rational, prec: u32) -> (Rational, Rational) {
    assert!(x.is_positive());
    let w = prec + GUARD;
    let k = floor_log2(x);
    let y = x / pow2(k);
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let (a_lo, a_hi) = atanh_series(&z, w);
    let (l_lo, l_hi) = atanh_series(&rat(1, 3), w);
    let two = int(2);
    let kk = int(k);
    let (kl_lo, kl_hi) = if k >= 0 {
        (&kk * &two * l_lo, &kk * &two * l_hi)
    } else {
        (&kk * &two * l_hi, &kk * &two * l_lo)
    };
    let lo = kl_lo + &two * a_lo;
    let hi = kl_hi + &two * a_hi;
    (floor_dyadic(&lo, prec), ceil_dyadic(&hi, prec))
}

/// Bounds on atanh(z) for 0 <= z <= 1/3 with absolute error below 2^-w.
fn atanh_series(z: &Rational, w: u32) -> (Rational, Rational) {
    assert!(!z.is_negative() && *z <= rat(1, 3));
    if z.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let eps = pow2(-(w as i64));
    let z2 = z * z;
    let (z2_lo, z2_hi) = (floor_dyadic(&z2, w), ceil_dyadic(&z2, w));
    let (mut p_lo, mut p_hi) = (floor_dyadic(z, w), ceil_dyadic(z, w));
    let (mut s_lo, mut s_hi) = (Rational::zero(), Rational::zero());
    let mut j: i64 = 0;
    loop {
        let k = int(2 * j + 1);
        s_lo += floor_dyadic(&(&p_lo / &k), w);
        s_hi += ceil_dyadic(&(&p_hi / &k), w);
        p_lo = floor_dyadic(&(&p_lo * &z2_lo), w);
        p_hi = ceil_dyadic(&(&p_hi * &z2_hi), w);
        j += 1;
        if p_hi <= eps {
            break;
        }
    }
    // tail: sum_{i>=j} z^(2i+1)/(2i+1) <= p_hi / (1 - z^2) <= (9/8) p_hi
    s_hi += ceil_dyadic(&(&p_hi * rat(9, 8)), w);
    (s_lo, s_hi)
}

/// Bounds on atan(x) for 0 <= x <= 1/2 from the alternating series.
fn atan_series(x: &Rational, w: u32) -> (Rational, Rational) {
    assert!(!x.is_negative() && *x <= rat(1, 2));
    if x.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let eps = pow2(-(w as i64));
    let x2 = x * x;
    let (x2_lo, x2_hi) = (floor_dyadic(&x2, w), ceil_dyadic(&x2, w));
    let (mut p_lo, mut p_hi) = (floor_dyadic(x, w), ceil_dyadic(x, w));
    let (mut s_lo, mut s_hi) = (Rational::zero(), Rational::zero());
    let mut j: i64 = 0;
    loop {
        let k = int(2 * j + 1);
        let t_lo = floor_dyadic(&(&p_lo / &k), w);
        let t_hi = ceil_dyadic(&(&p_hi / &k), w);
        if t_hi <= eps {
            // the remaining alternating tail is bounded by its first term
            s_lo -= &t_hi;
            s_hi += &t_hi;
            break;
        }
        if j % 2 == 0 {
            s_lo += t_lo;
            s_hi += t_hi;
        } else {
            s_lo -= t_hi;
            s_hi -= t_lo;
        }
        p_lo = floor_dyadic(&(&p_lo * &x2_lo), w);
        p_hi = ceil_dyadic(&(&p_hi * &x2_hi), w);
        j += 1;
    }
    (s_lo, s_hi)
}

/// Lower and upper dyadic bounds on atan(x), x >= 0.
pub fn atan_bounds(x: &Rational, prec: u32) -> (Rational, Rational) {
    assert!(!x.is_negative());
    let w = prec + GUARD;
    let half = rat(1, 2);
    let (lo, hi) = if *x > Rational::one() {
        let p = pi(w);
        let (a_lo, a_hi) = atan_bounds(&(Rational::one() / x), w);
        (&p.lo / int(2) - a_hi, &p.hi / int(2) - a_lo)
    } else if *x > half {
        // atan(x) = atan(1/2) + atan((x - 1/2) / (1 + x/2)), second argument <= 1/3
        let (h_lo, h_hi) = atan_series(&half, w);
        let r = (x - &half) / (Rational::one() + x / int(2));
        let (r_lo, r_hi) = atan_series(&r, w);
        (h_lo + r_lo, h_hi + r_hi)
    } else {
        atan_series(x, w)
    };
    (floor_dyadic(&lo, prec), ceil_dyadic(&hi, prec))
}

/// Lower and upper dyadic bounds on sqrt(x), x >= 0.
pub fn sqrt_bounds(x: &Rational, prec: u32) -> (Rational, Rational) {
    assert!(!x.is_negative());
    let scale = BigInt::one() << (2 * prec as usize);
    let s = x * Rational::from_integer(scale);
    let fl = s.floor().to_integer();
    let ce = s.ceil().to_integer();
    let den = BigInt::one() << prec as usize;
    let lo = fl.sqrt();
    let mut hi = ce.sqrt();
    if &hi * &hi < ce {
        hi += 1;
    }
    (Rational::new(lo, den.clone()), Rational::new(hi, den))
}

/// Enclosures of the order statistics (largest first) of values enclosed by `xs`.
///
/// Sorting lower and upper endpoints separately is valid for any assignment of
/// the values to the intervals, and it is monotone under shrinking inputs.
pub fn order_statistics_desc(xs: &[IntervalReal]) -> Vec<IntervalReal> {
    let mut los: Vec<Rational> = xs.iter().map(|x| x.lo.clone()).collect();
    let mut his: Vec<Rational> = xs.iter().map(|x| x.hi.clone()).collect();
    los.sort_by(|a, b| b.cmp(a));
    his.sort_by(|a, b| b.cmp(a));
    los.into_iter().zip(his).map(|(lo, hi)| IntervalReal { lo, hi }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(iv: &IntervalReal, x: f64, tol: f64) -> bool {
        (to_f64(&iv.lo) - x).abs() < tol && (to_f64(&iv.hi) - x).abs() < tol
    }

    #[test]
    fn logarithm_enclosures() {
        for (x, v) in [(rat(3, 1), 3f64.ln()), (rat(1, 3), -(3f64.ln())), (rat(7, 5), 1.4f64.ln()), (int(1), 0.0)] {
            let iv = IntervalReal::point(x.clone()).ln(80);
            assert!(close(&iv, v, 1e-14), "{x} -> {iv:?}");
            assert!(iv.width() <= pow2(-78));
        }
        let l2 = ln2(100);
        assert!(close(&l2, std::f64::consts::LN_2, 1e-15));
    }

    #[test]
    fn pi_and_atan() {
        let p = pi(120);
        assert!(close(&p, std::f64::consts::PI, 1e-15));
        assert!(p.width() <= pow2(-118));
        for x in [rat(1, 3), rat(3, 4), int(1), int(7), rat(1, 1000)] {
            let iv = IntervalReal::point(x.clone()).atan(60);
            assert!(close(&iv, to_f64(&x).atan(), 1e-15));
        }
    }

    #[test]
    fn sqrt_enclosure() {
        let iv = IntervalReal::point(int(2)).sqrt(64);
        assert!(iv.lo.clone() * iv.lo.clone() <= int(2) && iv.hi.clone() * iv.hi.clone() >= int(2));
        let exact = IntervalReal::point(rat(9, 4)).sqrt(10);
        assert_eq!(exact, IntervalReal::point(rat(3, 2)));
    }

    #[test]
    fn order_statistics_contain_sorted_values() {
        let xs = vec![
            IntervalReal::new(int(0), int(2)),
            IntervalReal::new(int(1), int(5)),
            IntervalReal::new(int(-3), int(-1)),
        ];
        let s = order_statistics_desc(&xs);
        assert_eq!(s[0], IntervalReal::new(int(1), int(5)));
        assert_eq!(s[1], IntervalReal::new(int(0), int(2)));
        assert_eq!(s[2], IntervalReal::new(int(-3), int(-1)));
    }
}
