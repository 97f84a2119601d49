//! Univariate polynomials over the rationals, with the pieces needed for
//! real root isolation: squarefree decomposition and Sturm sequences.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::QMatrix;
use super::rational::{floor_log2, int, pow2, rational_to_string, Rational};

/// Coefficients in ascending degree order, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> i32 {
        sign(&self.eval(x))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// p(-x).
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// x^deg · p(1/x).
    pub fn reversed(&self) -> Poly {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(c)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let dl = d.leading();
        if self.is_zero() || self.degree() < dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Yun's squarefree decomposition: monic squarefree factors with their multiplicities.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let f = self.monic();
        if f.is_constant() {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0);
        let c = df.exact_div(&a0);
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while !b.is_constant() {
            let a = b.gcd(&d);
            let nb = b.exact_div(&a);
            let nc = d.exact_div(&a);
            d = nc.sub(&nb.derivative());
            if !a.is_constant() {
                out.push((a, i));
            }
            b = nb;
            i += 1;
        }
        out
    }

    pub fn squarefree_part(&self) -> Poly {
        let f = self.monic();
        if f.is_constant() {
            return f;
        }
        f.exact_div(&f.gcd(&f.derivative()))
    }

    /// Sturm sequence of a squarefree polynomial, each term scaled to a ±1 leading coefficient.
    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let norm = |p: Poly| {
            let l = p.leading().abs();
            p.scale(&(Rational::one() / l))
        };
        let mut seq = vec![norm(self.clone())];
        let d = self.derivative();
        if d.is_zero() {
            return seq;
        }
        seq.push(norm(d));
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(norm(r.neg()));
        }
        seq
    }

    /// Smallest power of two strictly exceeding the Cauchy root bound.
    pub fn root_bound(&self) -> Rational {
        let l = self.leading().abs();
        let m = self.coeffs[..self.degree()]
            .iter()
            .map(|c| c.abs() / &l)
            .max()
            .unwrap_or_else(Rational::zero);
        let cb = m + Rational::one();
        pow2(floor_log2(&cb) + 1)
    }

    /// Integer polynomial with the same roots: denominators cleared, content removed.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| num_integer::gcd(acc, c.clone()));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g).collect()
    }
}

pub fn sign(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Sign variations of a Sturm sequence at a finite point, zeros dropped.
pub fn variations_at(seq: &[Poly], x: &Rational) -> usize {
    count_variations(seq.iter().map(|p| p.sign_at(x)))
}

/// Sign variations at +∞ (`positive`) or -∞.
pub fn variations_at_infinity(seq: &[Poly], positive: bool) -> usize {
    count_variations(seq.iter().map(|p| {
        let s = sign(&p.leading());
        if positive || p.degree() % 2 == 0 {
            s
        } else {
            -s
        }
    }))
}

fn count_variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Characteristic polynomial det(tI - M) by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &QMatrix) -> Poly {
    assert!(m.is_square(), "characteristic polynomial of non-square matrix");
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = QMatrix::zeros(n, n);
    let id = QMatrix::identity(n);
    for k in 1..=n {
        mk = (m * &mk).add(&id.scale(&coeffs[n - k + 1]));
        let t = (m * &mk).trace();
        coeffs[n - k] = -t / int(k as i64);
    }
    Poly::new(coeffs)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coef = rational_to_string(&a);
            match (i, a.is_one()) {
                (0, _) => write!(f, "{coef}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{coef}t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{coef}t^{i}")?,
            }
        }
        Ok(())
    }
}
