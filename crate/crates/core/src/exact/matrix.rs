//! Dense matrices over the rationals.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use super::rational::{int, parse_rational, rational_to_string, Rational};
use crate::error::{Error, Result};

/// Immutable dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        QMatrix { rows, cols, entries }
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Schema("ragged matrix rows".into()));
        }
        Ok(QMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// Square matrix from rows, rejecting anything that is not d×d.
    pub fn square_from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let m = Self::from_rows(rows)?;
        if m.rows != m.cols || m.rows == 0 {
            return Err(Error::NonSquare { rows: m.rows, cols: m.cols });
        }
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(v).expect("rectangular literal")
    }

    pub fn from_strs(rows: &[&[&str]]) -> Result<Self> {
        let mut v = Vec::new();
        for r in rows {
            v.push(r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?);
        }
        Self::from_rows(v)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.entries[i * d + i] = Rational::one();
        }
        m
    }

    pub fn diag(values: &[Rational]) -> Self {
        let d = values.len();
        let mut m = Self::zeros(d, d);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * d + i] = v.clone();
        }
        m
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r);
            for (i, x) in col.iter().enumerate() {
                m.entries[i * c + j] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> QMatrix {
        let cols: Vec<_> = (0..k).map(|j| self.column(j)).collect();
        QMatrix::from_columns(&cols)
    }

    pub fn hconcat(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut cols: Vec<_> = (0..self.cols).map(|j| self.column(j)).collect();
        cols.extend((0..other.cols).map(|j| other.column(j)));
        QMatrix::from_columns(&cols)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        m
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn scale(&self, c: &Rational) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        QMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        QMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product; its eigenvalues are the pairwise products of eigenvalues.
    pub fn kron(&self, other: &QMatrix) -> QMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut m = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m.entries[(i * other.rows + k) * c + j * other.cols + l] = a * other.get(k, l);
                    }
                }
            }
        }
        m
    }

    /// Row echelon form by Gaussian elimination; returns (echelon, rank, odd permutation).
    fn echelon(&self) -> (Vec<Vec<Rational>>, usize, bool) {
        let mut a = self.to_rows();
        let (n, m) = (self.rows, self.cols);
        let mut rank = 0;
        let mut odd = false;
        for col in 0..m {
            if rank == n {
                break;
            }
            let Some(p) = (rank..n).find(|&i| !a[i][col].is_zero()) else { continue };
            if p != rank {
                a.swap(p, rank);
                odd = !odd;
            }
            let pivot = a[rank][col].clone();
            for i in rank + 1..n {
                if a[i][col].is_zero() {
                    continue;
                }
                let f = &a[i][col] / &pivot;
                for j in col..m {
                    let t = &f * &a[rank][j];
                    a[i][j] -= t;
                }
            }
            rank += 1;
        }
        (a, rank, odd)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        if n == 2 {
            return self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0);
        }
        let (a, rank, odd) = self.echelon();
        if rank < n {
            return Rational::zero();
        }
        let mut d: Rational = (0..n).map(|i| a[i][i].clone()).product();
        if odd {
            d = -d;
        }
        d
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        if n == 2 {
            let det = self.det();
            if det.is_zero() {
                return None;
            }
            let inv = QMatrix::from_rows(vec![
                vec![self.get(1, 1) / &det, -self.get(0, 1) / &det],
                vec![-self.get(1, 0) / &det, self.get(0, 0) / &det],
            ])
            .ok()?;
            return Some(inv);
        }
        let mut a = self.to_rows();
        let mut inv = QMatrix::identity(n).to_rows();
        for col in 0..n {
            let p = (col..n).find(|&i| !a[i][col].is_zero())?;
            a.swap(p, col);
            inv.swap(p, col);
            let pivot = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &pivot;
                inv[col][j] /= &pivot;
            }
            for i in 0..n {
                if i == col || a[i][col].is_zero() {
                    continue;
                }
                let f = a[i][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[i][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[i][j] -= t;
                }
            }
        }
        QMatrix::from_rows(inv).ok()
    }

    /// Solves `self * x = b` for square invertible `self`.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        Some(self.inverse()?.mul_vec(b))
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, e: i64) -> Option<QMatrix> {
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QMatrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Some(acc)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == QMatrix::identity(self.rows)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    pub fn max_abs_entry(&self) -> Rational {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
    }

    /// Canonical content hash over the shape and lowest-terms entries in row-major order.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}x{};", self.rows, self.cols).as_bytes());
        for e in &self.entries {
            h.update(rational_to_string(e).as_bytes());
            h.update(b",");
        }
        hex::encode(h.finalize())
    }

    /// Least common multiple of the entry denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.entries.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(rational_to_string).collect()).collect()
    }

    pub fn from_strings(rows: &[Vec<String>]) -> Result<Self> {
        let v = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(v)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(super::rational::to_f64).collect()).collect()
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;

    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut m = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        m.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        m
    }
}

impl Mul for QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: QMatrix) -> QMatrix {
        &self * &rhs
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_strings())
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().iter().map(|r| format!("[{}]", r.join(", "))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        QMatrix::from_strings(&rows).map_err(serde::de::Error::custom)
    }
}
