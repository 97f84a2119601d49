//! Certified enclosures of logarithms of eigenvalue moduli and singular values.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::interval::{order_statistics_desc, IntervalReal};
use super::matrix::QMatrix;
use super::poly::{char_poly, Poly};
use super::roots::SquarefreeRoots;
use crate::error::{Error, Result};
use super::rational::{int, Rational};

/// Working-precision ladder: start, doubling on failure, up to a cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { start_bits: 64, max_bits: 4096 }
    }
}

/// Enclosures of ln|μ| over the complex roots μ of `p` (nonzero constant term),
/// with multiplicity, weakly decreasing, each of width at most `eps`.
///
/// Per-root enclosures are intersected across the ladder, and the output is the
/// order statistics of those enclosures; the ladder is deterministic, so a
/// smaller `eps` only ever returns subsets of an earlier answer.
pub fn log_root_moduli(p: &Poly, eps: &Rational, prec: Precision) -> Result<Vec<IntervalReal>> {
    assert!(eps.is_positive());
    assert!(!p.eval(&Rational::zero()).is_zero(), "zero root has no logarithm");
    let mut factors: Vec<(SquarefreeRoots, usize)> = p
        .squarefree_decomposition()
        .into_iter()
        .map(|(q, k)| (SquarefreeRoots::new(&q), k))
        .collect();
    let mut acc: Option<Vec<IntervalReal>> = None;
    let mut bits = prec.start_bits;
    while bits <= prec.max_bits {
        if let Some(cur) = enclosures_at(&mut factors, bits) {
            acc = Some(match acc {
                None => cur,
                Some(prev) => prev
                    .iter()
                    .zip(&cur)
                    .map(|(a, b)| a.intersect(b).expect("nested enclosures of the same root"))
                    .collect(),
            });
            let done = acc.as_ref().unwrap().iter().all(|x| &x.width() <= eps);
            if done {
                return Ok(order_statistics_desc(acc.as_ref().unwrap()));
            }
        }
        bits = bits.saturating_mul(2);
    }
    Err(Error::PrecisionFailure { max_bits: prec.max_bits })
}

fn enclosures_at(factors: &mut [(SquarefreeRoots, usize)], bits: u32) -> Option<Vec<IntervalReal>> {
    let mut out = Vec::new();
    for (roots, mult) in factors.iter_mut() {
        if !roots.refine(bits) {
            return None;
        }
        for r in &roots.real {
            let l = r.interval().abs().ln(bits);
            out.extend(std::iter::repeat(l).take(*mult));
        }
        for c in &roots.complex {
            let m = c.modulus(bits);
            if !m.lo.is_positive() {
                return None;
            }
            let l = m.ln(bits);
            out.extend(std::iter::repeat(l).take(2 * *mult));
        }
    }
    Some(out)
}

pub fn log_eigen_moduli(m: &QMatrix, eps: &Rational) -> Result<Vec<IntervalReal>> {
    log_eigen_moduli_with(m, eps, Precision::default())
}

pub fn log_eigen_moduli_with(m: &QMatrix, eps: &Rational, prec: Precision) -> Result<Vec<IntervalReal>> {
    if m.det().is_zero() {
        return Err(Error::Singular);
    }
    log_root_moduli(&char_poly(m), eps, prec)
}

pub fn log_singular_values(m: &QMatrix, eps: &Rational) -> Result<Vec<IntervalReal>> {
    log_singular_values_with(m, eps, Precision::default())
}

/// ln σ_i = ½ ln λ_i(MᵀM).
pub fn log_singular_values_with(m: &QMatrix, eps: &Rational, prec: Precision) -> Result<Vec<IntervalReal>> {
    if m.det().is_zero() {
        return Err(Error::Singular);
    }
    let gram = &m.transpose() * m;
    let half = Rational::new(1.into(), 2.into());
    let logs = log_root_moduli(&char_poly(&gram), &(eps * int(2)), prec)?;
    Ok(logs.iter().map(|x| x.scale(&half)).collect())
}

/// Exact test that the characteristic polynomial has d pairwise distinct root moduli:
/// all roots real and simple, and no pair μ, −μ.
pub fn has_distinct_moduli(m: &QMatrix) -> bool {
    let p = char_poly(m);
    let d = p.degree();
    if !p.gcd(&p.derivative()).is_constant() {
        return false;
    }
    if super::roots::isolate_real_roots(&p).len() != d {
        return false;
    }
    p.gcd(&p.reflect()).is_constant()
}
