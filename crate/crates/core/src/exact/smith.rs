//! Elementary divisors over the local ring ℤ_(p).

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::matrix::QMatrix;
use super::rational::{valuation, Rational};

/// Valuations of the elementary divisors of a matrix at a prime, weakly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationVector {
    pub prime: u64,
    pub vals: Vec<i64>,
}

impl ValuationVector {
    /// Valuation vector of the inverse: negated and reversed.
    pub fn opposite(&self) -> ValuationVector {
        ValuationVector { prime: self.prime, vals: self.vals.iter().rev().map(|v| -v).collect() }
    }
}

/// Smith normal form over ℤ_(p) by minimal-valuation pivoting. Every row and column
/// operation used has a p-integral multiplier, so the result is invariant under
/// p-integral unimodular changes on either side.
pub fn smith_valuations(m: &QMatrix, p: u64) -> ValuationVector {
    assert!(m.is_square(), "smith_valuations needs a square matrix");
    let n = m.rows();
    let mut a: Vec<Vec<Rational>> = m.to_rows();
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if let Some(v) = valuation(x, p) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            panic!("smith_valuations needs an invertible matrix");
        };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
        for j in k + 1..n {
            if a[k][j].is_zero() {
                continue;
            }
            let f = &a[k][j] / &pivot;
            for i in k..n {
                let t = &f * &a[i][k];
                a[i][j] -= t;
            }
        }
        vals.push(v);
    }
    vals.sort_unstable();
    ValuationVector { prime: p, vals }
}
