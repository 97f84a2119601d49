//! Scalars of the base field: arbitrary precision rationals in lowest terms.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `"num/den"` in lowest terms, `"num"` when the denominator is one.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Schema(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// p-adic valuation; `None` for zero.
pub fn valuation(r: &Rational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    Some(int_valuation(r.numer(), p) - int_valuation(r.denom(), p))
}

pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    assert!(p >= 2);
    if n.is_zero() {
        return i64::MAX;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Number of bits of |n| (0 for 0).
pub fn bit_len(n: &BigInt) -> u64 {
    n.bits()
}

/// floor(log2 |r|) for nonzero r.
pub fn floor_log2(r: &Rational) -> i64 {
    assert!(!r.is_zero());
    let r = r.abs();
    let mut k = bit_len(r.numer()) as i64 - bit_len(r.denom()) as i64;
    // 2^(k-1) < r < 2^(k+1)
    if r < pow2(k) {
        k -= 1;
    }
    k
}

pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << (k as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-k) as usize))
    }
}

/// Largest multiple of 2^-prec that is <= r.
pub fn floor_dyadic(r: &Rational, prec: u32) -> Rational {
    let scale = BigInt::one() << prec as usize;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

/// Smallest multiple of 2^-prec that is >= r.
pub fn ceil_dyadic(r: &Rational, prec: u32) -> Rational {
    let scale = BigInt::one() << prec as usize;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

pub fn is_dyadic(r: &Rational) -> bool {
    let d = r.denom();
    d.is_one() || (d.sign() == Sign::Plus && (d & (d - BigInt::one())).is_zero())
}

/// Approximate value, for display and heuristics only.
pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down to keep the quotient finite
            let nb = bit_len(r.numer()) as i64;
            let db = bit_len(r.denom()) as i64;
            let shift_n = (nb - 900).max(0) as usize;
            let shift_d = (db - 900).max(0) as usize;
            let n = (r.numer() >> shift_n).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift_d).to_f64().unwrap_or(1.0);
            n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
        }
    }
}

pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Big integers as JSON numbers when they fit in an i64, strings otherwise.
pub mod serde_bigint {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        match n.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&n.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(BigInt::from(v)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_form_is_lowest_terms() {
        assert_eq!(rational_to_string(&rat(6, -4)), "-3/2");
        assert_eq!(rational_to_string(&rat(8, 4)), "2");
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&rat(12, 5), 2), Some(2));
        assert_eq!(valuation(&rat(1, 8), 2), Some(-3));
        assert_eq!(valuation(&int(0), 3), None);
    }

    #[test]
    fn log2_and_dyadic_rounding() {
        assert_eq!(floor_log2(&int(1)), 0);
        assert_eq!(floor_log2(&rat(3, 2)), 0);
        assert_eq!(floor_log2(&int(8)), 3);
        assert_eq!(floor_log2(&rat(1, 3)), -2);
        let third = rat(1, 3);
        let lo = floor_dyadic(&third, 10);
        let hi = ceil_dyadic(&third, 10);
        assert!(lo < third && third < hi);
        assert_eq!(&hi - &lo, pow2(-10));
        assert!(is_dyadic(&lo) && !is_dyadic(&third));
    }
}
