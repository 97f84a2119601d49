//! Full flags in ℚ^d ⊂ ℝ^d, the action of GL_d, transversality and a metric.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::interval::{pi, IntervalReal};
use crate::exact::poly::char_poly;
use crate::exact::rational::{int, pow2, Rational};
use crate::exact::roots::{isolate_real_roots, refine_real};
use crate::exact::QMatrix;
use crate::proj::ProjPoint;

/// A full flag V_1 ⊂ … ⊂ V_{d−1}, stored by a canonical basis whose first i
/// columns span V_i. Column j vanishes on the pivot rows of columns 1..j−1 and
/// its pivot is its first entry of largest modulus, scaled to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flag {
    dim: usize,
    basis: QMatrix,
}

impl Flag {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn standard(d: usize) -> Flag {
        Flag { dim: d, basis: QMatrix::identity(d) }
    }

    /// Pivot rows of the canonical columns.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim)
            .map(|j| (0..self.dim).find(|&i| self.basis.get(i, j).abs().is_one()).unwrap())
            .collect()
    }

    /// First i columns, spanning V_i.
    pub fn subspace(&self, i: usize) -> QMatrix {
        self.basis.leading_columns(i)
    }

    /// The line of a flag in dimension 2.
    pub fn line(&self) -> ProjPoint {
        assert_eq!(self.dim, 2);
        ProjPoint::from_rationals(self.basis.get(0, 0), self.basis.get(1, 0))
    }

    pub fn from_line(p: &ProjPoint) -> Flag {
        let (x, y) = p.coords();
        let other = if x.is_zero() { vec![int(1), int(0)] } else { vec![int(0), int(1)] };
        canonicalize(&QMatrix::from_columns(&[vec![x, y], other])).expect("independent columns")
    }

    /// A flag transversal to this one, built from coordinate vectors on the pivot rows in reverse order.
    pub fn transversal_partner(&self) -> Flag {
        let d = self.dim;
        let cols: Vec<Vec<Rational>> = self
            .pivots()
            .into_iter()
            .rev()
            .map(|r| (0..d).map(|i| if i == r { int(1) } else { int(0) }).collect())
            .collect();
        canonicalize(&QMatrix::from_columns(&cols)).expect("coordinate basis")
    }

    /// Orthonormal basis with the same flag (Gram–Schmidt in column order), in floating point.
    pub fn orthonormal_f64(&self) -> DMatrix<f64> {
        let rows = self.basis.to_f64_rows();
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| rows[i][j]);
        m.qr().q()
    }
}

/// Canonical representative of the flag spanned by the leading columns of `basis`.
pub fn canonicalize(basis: &QMatrix) -> Result<Flag> {
    if !basis.is_square() {
        return Err(Error::NonSquare { rows: basis.rows(), cols: basis.cols() });
    }
    let d = basis.rows();
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(d);
    let mut pivots: Vec<usize> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = basis.column(j);
        for (c, &r) in cols.iter().zip(&pivots) {
            if v[r].is_zero() {
                continue;
            }
            let f = v[r].clone();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= &f * ci;
            }
        }
        let mut p = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[p].abs() {
                p = i;
            }
        }
        if v[p].is_zero() {
            return Err(Error::SingularBasis);
        }
        let s = v[p].clone();
        for x in v.iter_mut() {
            *x /= &s;
        }
        cols.push(v);
        pivots.push(p);
    }
    Ok(Flag { dim: d, basis: QMatrix::from_columns(&cols) })
}

pub fn act(g: &QMatrix, x: &Flag) -> Result<Flag> {
    if g.rows() != x.dim || g.cols() != x.dim {
        return Err(Error::DimensionMismatch { expected: x.dim, got: g.rows() });
    }
    canonicalize(&(g * &x.basis))
}

/// V_i(x) ∩ W_{d−i}(y) = {0} for all i = 1..d−1.
pub fn transversal(x: &Flag, y: &Flag) -> bool {
    assert_eq!(x.dim, y.dim);
    let d = x.dim;
    (1..d).all(|i| !x.subspace(i).hconcat(&y.subspace(d - i)).det().is_zero())
}

/// y ∈ Y_x.
pub fn in_nontransversal_locus(x: &Flag, y: &Flag) -> bool {
    !transversal(x, y)
}

/// Enclosure of max_i (largest principal angle between V_i(x) and V_i(y)), at `prec` bits.
pub fn flag_distance(x: &Flag, y: &Flag, prec: u32) -> IntervalReal {
    assert_eq!(x.dim, y.dim);
    if x == y {
        return IntervalReal::zero();
    }
    let mut best = IntervalReal::zero();
    for i in 1..x.dim {
        let a = largest_principal_angle(&x.subspace(i), &y.subspace(i), prec);
        best = IntervalReal::new(best.lo.clone().max(a.lo), best.hi.clone().max(a.hi));
    }
    best
}

/// Largest principal angle between the column spans of A and B (same rank i).
pub fn largest_principal_angle(a: &QMatrix, b: &QMatrix, prec: u32) -> IntervalReal {
    let i = a.cols();
    if a.hconcat(b).rank() == i {
        return IntervalReal::zero();
    }
    let at = a.transpose();
    let bt = b.transpose();
    let atb = &at * b;
    if atb.det().is_zero() {
        return half_pi(prec);
    }
    // cos² of the principal angles are the eigenvalues of (AᵀA)⁻¹ AᵀB (BᵀB)⁻¹ BᵀA
    let m = &(&(&at * a).inverse().unwrap() * &atb) * &(&(&bt * b).inverse().unwrap() * &(&bt * a));
    let p = char_poly(&m).squarefree_part();
    let mut roots = isolate_real_roots(&p);
    let smallest = roots.first_mut().expect("symmetric positive semidefinite spectrum");
    refine_real(&p, smallest, &pow2(-(prec as i64 + 4)));
    let c = IntervalReal::new(smallest.lo.clone().max(Rational::zero()), smallest.hi.clone().min(Rational::one()));
    arccos_sqrt(&c, prec)
}

fn half_pi(prec: u32) -> IntervalReal {
    pi(prec).scale(&Rational::new(1.into(), 2.into()))
}

/// θ = arccos(√c) = atan(√((1 − c)/c)) for c ∈ [0, 1].
fn arccos_sqrt(c: &IntervalReal, prec: u32) -> IntervalReal {
    let tan2 = |c: &Rational| (Rational::one() - c) / c;
    let lo = if c.hi.is_zero() {
        half_pi(prec).lo
    } else {
        IntervalReal::point(tan2(&c.hi)).sqrt(prec + 4).atan(prec).lo
    };
    let hi = if c.lo.is_positive() {
        IntervalReal::point(tan2(&c.lo)).sqrt(prec + 4).atan(prec).hi
    } else {
        half_pi(prec).hi
    };
    IntervalReal::new(lo, hi)
}

/// Floating-point distance (max of largest principal angles), for sampling only.
pub fn flag_distance_f64(qx: &DMatrix<f64>, qy: &DMatrix<f64>) -> f64 {
    let d = qx.nrows();
    let mut best: f64 = 0.0;
    for i in 1..d {
        let m = qx.columns(0, i).transpose() * qy.columns(0, i);
        let s = m.singular_values();
        let smin = s.iter().cloned().fold(f64::INFINITY, f64::min).clamp(0.0, 1.0);
        best = best.max(smin.acos());
    }
    best
}

/// min_i |det[Qx_i | Qy_{d−i}]| for orthonormal flag bases; zero exactly on Y_x.
pub fn transversality_defect_f64(qx: &DMatrix<f64>, qy: &DMatrix<f64>) -> f64 {
    let d = qx.nrows();
    let mut best = f64::INFINITY;
    for i in 1..d {
        let mut m = DMatrix::zeros(d, d);
        m.columns_mut(0, i).copy_from(&qx.columns(0, i));
        m.columns_mut(i, d - i).copy_from(&qy.columns(0, d - i));
        best = best.min(m.determinant().abs());
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum StabilizerVerdict {
    ConsistentWithKernel,
    Counterexample { g: QMatrix },
}

/// Searches the sample for g with c·g·x ≠ g·y.
pub fn stabilizer_falsifier(c: &QMatrix, x: &Flag, y: &Flag, sample: &[QMatrix]) -> Result<StabilizerVerdict> {
    for g in sample {
        if act(&(c * g), x)? != act(g, y)? {
            return Ok(StabilizerVerdict::Counterexample { g: g.clone() });
        }
    }
    Ok(StabilizerVerdict::ConsistentWithKernel)
}
