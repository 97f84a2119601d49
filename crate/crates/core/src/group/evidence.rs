//! Zariski-density evidence, torsion exponents and p-adic boundedness at finite radius.

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ball::{enumerate_ball, Ball};
use super::presentation::GroupPresentation;
use crate::exact::rational::{int, serde_rational, valuation, Rational};
use crate::exact::spectral::has_distinct_moduli;
use crate::exact::QMatrix;

pub const DENSITY_DISCLAIMER: &str =
    "evidence only: these are necessary conditions for Zariski density and do not certify it";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub radius: usize,
    pub span_dim: usize,
    pub burnside_full: bool,
    pub loxodromic_found: bool,
    pub infinite: bool,
    pub note: String,
}

/// Rank of the span of the ball inside the d²-dimensional matrix space, plus
/// whether a loxodromic and an infinite-order element appear in the ball.
pub fn density_evidence(group: &GroupPresentation, radius: usize) -> DensityReport {
    density_in_ball(group, &enumerate_ball(group, radius))
}

pub fn density_in_ball(group: &GroupPresentation, ball: &Ball) -> DensityReport {
    let d = group.dim();
    let radius = ball.radius;
    let rows: Vec<Vec<Rational>> = ball.entries.iter().map(|e| e.matrix.entries().to_vec()).collect();
    let span_dim = QMatrix::from_rows(rows).map(|m| m.rank()).unwrap_or(0);
    let m = torsion_bound(d);
    let loxodromic_found = ball.entries.iter().any(|e| has_distinct_moduli(&e.matrix));
    let infinite = ball.entries.iter().any(|e| !e.matrix.pow(m as i64).expect("invertible").is_identity());
    DensityReport {
        radius,
        span_dim,
        burnside_full: span_dim == d * d,
        loxodromic_found,
        infinite,
        note: DENSITY_DISCLAIMER.into(),
    }
}

pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// lcm of all n with φ(n) ≤ d: every finite-order element of GL_d(ℚ) has order
/// dividing it, since its eigenvalues are roots of unity of degree ≤ d over ℚ.
/// Scanning n ≤ 2d² + 2 suffices because φ(n) ≥ √(n/2).
pub fn torsion_bound(d: usize) -> u64 {
    let d = d as u64;
    (1..=2 * d * d + 2).filter(|&n| totient(n) <= d).fold(1, |acc, n| acc.lcm(&n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicReport {
    pub prime: u64,
    pub radius: usize,
    /// max |entry|_p over the ball of the given radius.
    #[serde(with = "serde_rational")]
    pub max_abs: Rational,
    pub half_radius: usize,
    #[serde(with = "serde_rational")]
    pub max_abs_half: Rational,
    /// "flat" when the maximum did not grow from radius L/2 to L, else "growing".
    pub trend: String,
}

pub fn padic_abs(x: &Rational, p: u64) -> Rational {
    match valuation(x, p) {
        None => Rational::zero(),
        Some(v) => {
            let p = int(p as i64);
            if v >= 0 {
                Rational::one() / num_traits::pow(p, v as usize)
            } else {
                num_traits::pow(p, (-v) as usize)
            }
        }
    }
}

pub fn padic_boundedness(group: &GroupPresentation, p: u64, radius: usize) -> PadicReport {
    padic_in_ball(&enumerate_ball(group, radius), p)
}

pub fn padic_in_ball(ball: &Ball, p: u64) -> PadicReport {
    let radius = ball.radius;
    let half = radius / 2;
    let max_over = |entries: &[super::ball::BallEntry]| {
        entries
            .iter()
            .flat_map(|e| e.matrix.entries().iter().map(|x| padic_abs(x, p)))
            .max()
            .unwrap_or_else(Rational::one)
    };
    let max_abs = max_over(&ball.entries);
    let max_abs_half = max_over(ball.within(half));
    let trend = if max_abs > max_abs_half { "growing" } else { "flat" };
    PadicReport { prime: p, radius, max_abs, half_radius: half, max_abs_half, trend: trend.into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    fn diag_group() -> GroupPresentation {
        GroupPresentation::new(2, vec![('g', QMatrix::diag(&[int(2), rat(1, 2)]))]).unwrap()
    }

    #[test]
    fn density_examples() {
        let s = density_evidence(&GroupPresentation::sanov(), 3);
        assert_eq!((s.span_dim, s.burnside_full, s.loxodromic_found, s.infinite), (4, true, true, true));
        let d = density_evidence(&diag_group(), 3);
        assert_eq!((d.span_dim, d.burnside_full), (2, false));
        assert_eq!(density_evidence(&GroupPresentation::trivial(2), 1).span_dim, 1);
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(torsion_bound(1), 2);
        assert_eq!(torsion_bound(2), 12);
        assert_eq!(torsion_bound(4), 120);
    }

    #[test]
    fn padic_examples() {
        let sl2z = GroupPresentation::from_i64(&[('s', &[&[0, -1], &[1, 0]]), ('t', &[&[1, 1], &[0, 1]])]).unwrap();
        let r = padic_boundedness(&sl2z, 3, 4);
        assert!(r.max_abs <= int(1));
        assert_eq!(r.trend, "flat");
        let r = padic_boundedness(&diag_group(), 2, 3);
        assert_eq!(r.max_abs, int(8));
        assert_eq!(r.trend, "growing");
        assert_eq!(padic_boundedness(&GroupPresentation::trivial(2), 5, 2).max_abs, int(1));
    }
}
