//! Root isolation for squarefree rational polynomials.
//!
//! Real roots are isolated exactly with Sturm sequences and refined by
//! bisection. Non-real roots are located numerically and then certified by
//! inclusion disks: with distinct centres z_i and Weierstrass corrections
//! W_i = p(z_i) / prod_{j != i}(z_i - z_j), every root lies in a disk
//! |z - z_i| <= n|W_i|, and a connected union of k such disks holds exactly
//! k roots. All disk tests are carried out in exact rational arithmetic.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::interval::IntervalReal;
use super::poly::{sign, variations_at, Poly};
use super::rational::{floor_dyadic, floor_log2, from_f64, int, pow2, to_f64, Rational};

/// An isolated real root: exact when `lo == hi`, otherwise the unique root in the open interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    pub lo: Rational,
    pub hi: Rational,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn interval(&self) -> IntervalReal {
        IntervalReal::new(self.lo.clone(), self.hi.clone())
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }
}

/// Isolates all real roots of a squarefree, nonconstant polynomial, in increasing order.
pub fn isolate_real_roots(p: &Poly) -> Vec<RealRoot> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let seq = p.sturm_sequence();
    let b = p.root_bound();
    let lo = -b.clone();
    let count = variations_at(&seq, &lo) - variations_at(&seq, &b);
    let mut out = Vec::new();
    // stack of (lo, hi, count) with p(lo), p(hi) != 0
    let mut stack = vec![(lo, b, count)];
    while let Some((a, c, k)) = stack.pop() {
        match k {
            0 => {}
            1 => out.push(RealRoot { lo: a, hi: c }),
            _ => {
                let mid = nonroot_split(p, &a, &c);
                let left = variations_at(&seq, &a) - variations_at(&seq, &mid);
                stack.push((mid.clone(), c, k - left));
                stack.push((a, mid, left));
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// A point strictly inside (a, c), close to the midpoint, that is not a root.
fn nonroot_split(p: &Poly, a: &Rational, c: &Rational) -> Rational {
    let mid = (a + c) / int(2);
    if p.sign_at(&mid) != 0 {
        return mid;
    }
    let w = c - a;
    let mut k = 3;
    loop {
        for cand in [&mid + &w / int(1 << k), &mid - &w / int(1 << k)] {
            if p.sign_at(&cand) != 0 {
                return cand;
            }
        }
        k += 1;
    }
}

/// Bisects until the interval width is at most `width` (or the root is hit exactly).
pub fn refine_real(p: &Poly, r: &mut RealRoot, width: &Rational) {
    if r.is_exact() {
        return;
    }
    let s_hi = p.sign_at(&r.hi);
    debug_assert!(s_hi != 0);
    while &(&r.hi - &r.lo) > width {
        let mid = (&r.lo + &r.hi) / int(2);
        let s = p.sign_at(&mid);
        if s == 0 {
            r.lo = mid.clone();
            r.hi = mid;
            return;
        }
        if s != s_hi {
            r.lo = mid;
        } else {
            r.hi = mid;
        }
    }
}

/// Refines until the width is at most 2^-bits relative to the root's magnitude.
pub fn refine_real_relative(p: &Poly, r: &mut RealRoot, bits: u32) {
    loop {
        if r.is_exact() {
            return;
        }
        // make sure the interval does not straddle zero before measuring relative width
        let mag = if r.lo.is_positive() {
            r.lo.clone()
        } else if r.hi.is_negative() {
            -r.hi.clone()
        } else {
            let w = (&r.hi - &r.lo) / int(2);
            refine_real(p, r, &w);
            continue;
        };
        let target = &mag * pow2(-(bits as i64));
        if &r.hi - &r.lo <= target {
            return;
        }
        refine_real(p, r, &target);
        return;
    }
}

/// Gaussian rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CRational {
    pub re: Rational,
    pub im: Rational,
}

impl CRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        CRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        CRational { re, im: Rational::zero() }
    }

    pub fn add(&self, o: &CRational) -> CRational {
        CRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &CRational) -> CRational {
        CRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &CRational) -> CRational {
        CRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn div(&self, o: &CRational) -> CRational {
        let n = o.norm_sq();
        let conj = CRational { re: o.re.clone(), im: -o.im.clone() };
        let p = self.mul(&conj);
        CRational { re: p.re / &n, im: p.im / n }
    }

    pub fn conj(&self) -> CRational {
        CRational { re: self.re.clone(), im: -self.im.clone() }
    }

    fn round(&self, bits: u32) -> CRational {
        CRational { re: floor_dyadic(&self.re, bits), im: floor_dyadic(&self.im, bits) }
    }
}

fn eval_complex(p: &Poly, z: &CRational) -> CRational {
    let mut acc = CRational::real(Rational::zero());
    for c in p.coefficients().iter().rev() {
        acc = acc.mul(z).add(&CRational::real(c.clone()));
    }
    acc
}

/// A certified disk in the open upper half plane holding exactly one root;
/// its mirror image holds the conjugate root.
#[derive(Clone, Debug)]
pub struct ComplexRootDisk {
    pub center: CRational,
    pub radius_sq: Rational,
}

impl ComplexRootDisk {
    /// Enclosure of the modulus of the root inside the disk.
    pub fn modulus(&self, prec: u32) -> IntervalReal {
        let c = IntervalReal::point(self.center.norm_sq()).sqrt(prec);
        let r = IntervalReal::point(self.radius_sq.clone()).sqrt(prec);
        let lo = (&c.lo - &r.hi).max(Rational::zero());
        IntervalReal::new(lo, &c.hi + &r.hi)
    }
}

/// Real and non-real roots of one squarefree polynomial, refined on demand.
#[derive(Clone, Debug)]
pub struct SquarefreeRoots {
    poly: Poly,
    pub real: Vec<RealRoot>,
    /// Upper half plane approximations, one per conjugate pair.
    centers: Vec<CRational>,
    pub complex: Vec<ComplexRootDisk>,
}

impl SquarefreeRoots {
    pub fn new(poly: &Poly) -> Self {
        let poly = poly.monic();
        let real = isolate_real_roots(&poly);
        let pairs = (poly.degree() - real.len()) / 2;
        let centers = if pairs > 0 { initial_complex_centers(&poly, pairs) } else { Vec::new() };
        SquarefreeRoots { poly, real, centers, complex: Vec::new() }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn pair_count(&self) -> usize {
        (self.poly.degree() - self.real.len()) / 2
    }

    /// Refines real roots to relative width 2^-bits and (re)certifies the
    /// complex disks at that precision. Returns false when certification fails.
    pub fn refine(&mut self, bits: u32) -> bool {
        for r in &mut self.real {
            refine_real_relative(&self.poly, r, bits);
        }
        if self.pair_count() == 0 {
            return true;
        }
        if self.centers.len() != self.pair_count() {
            return false;
        }
        let dp = self.poly.derivative();
        for z in &mut self.centers {
            for _ in 0..200 {
                let mag = z.norm_sq();
                let scale_bits = if mag.is_zero() { 0 } else { (-floor_log2(&mag) / 2).max(0) as u32 };
                let w = bits + scale_bits + 8;
                let f = eval_complex(&self.poly, z);
                let df = eval_complex(&dp, z);
                if df.norm_sq().is_zero() {
                    break;
                }
                let step = f.div(&df);
                let next = z.sub(&step).round(w);
                let moved = next != *z;
                *z = next;
                let tol = pow2(-2 * (w as i64 - 4));
                if !moved || step.norm_sq() <= tol {
                    break;
                }
            }
        }
        match self.certify() {
            Some(disks) => {
                self.complex = disks;
                true
            }
            None => false,
        }
    }

    fn certify(&self) -> Option<Vec<ComplexRootDisk>> {
        let n = self.poly.degree();
        let mut all: Vec<CRational> = self.real.iter().map(|r| CRational::real(r.midpoint())).collect();
        for z in &self.centers {
            if !z.im.is_positive() {
                return None;
            }
            all.push(z.clone());
            all.push(z.conj());
        }
        if all.len() != n {
            return None;
        }
        let nn = int((n * n) as i64);
        let mut radius_sq = Vec::with_capacity(n);
        for i in 0..n {
            let mut den = CRational::real(Rational::one());
            for j in 0..n {
                if i != j {
                    den = den.mul(&all[i].sub(&all[j]));
                }
            }
            if den.norm_sq().is_zero() {
                return None;
            }
            let w = eval_complex(&self.poly, &all[i]).div(&den);
            radius_sq.push(w.norm_sq() * &nn);
        }
        let r = self.real.len();
        let mut out = Vec::new();
        for (k, z) in self.centers.iter().enumerate() {
            let i = r + 2 * k;
            if radius_sq[i] >= &z.im * &z.im {
                return None;
            }
            for j in 0..n {
                if j != i && !disks_disjoint(&all[i], &radius_sq[i], &all[j], &radius_sq[j]) {
                    return None;
                }
            }
            out.push(ComplexRootDisk { center: z.clone(), radius_sq: radius_sq[i].clone() });
        }
        Some(out)
    }
}

/// |a - b| > r_a + r_b, decided exactly from squared radii.
fn disks_disjoint(a: &CRational, ra2: &Rational, b: &CRational, rb2: &Rational) -> bool {
    let d2 = a.sub(b).norm_sq();
    let s = &d2 - ra2 - rb2;
    if !s.is_positive() {
        return false;
    }
    // (r_a + r_b)^2 < d^2  <=>  2 r_a r_b < s  <=>  4 ra2 rb2 < s^2
    int(4) * ra2 * rb2 < &s * &s
}

/// Floating-point Aberth iteration; returns the `pairs` approximations with the
/// largest positive imaginary parts.
fn initial_complex_centers(p: &Poly, pairs: usize) -> Vec<CRational> {
    let n = p.degree();
    let coeffs: Vec<f64> = p.coefficients().iter().map(to_f64).collect();
    let lead = coeffs[n];
    let a: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    // Fujiwara bound
    let mut radius: f64 = 0.0;
    for k in 1..=n {
        let c = a[n - k].abs();
        if c > 0.0 {
            radius = radius.max(2.0 * c.powf(1.0 / k as f64));
        }
    }
    if !radius.is_finite() || radius == 0.0 {
        radius = 1.0;
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut f = Complex64::new(0.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for c in a.iter().rev() {
            df = df * z + f;
            f = f * z + *c;
        }
        (f, df)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (f, df) = eval(z[k]);
            if f.norm() == 0.0 {
                continue;
            }
            let ratio = f / df;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    let mut upper: Vec<Complex64> = z.into_iter().filter(|c| c.im > 0.0 && c.is_finite()).collect();
    upper.sort_by(|x, y| y.im.partial_cmp(&x.im).unwrap());
    upper.truncate(pairs);
    upper.into_iter().map(|c| CRational::new(from_f64(c.re), from_f64(c.im))).collect()
}

/// Exact sign of a polynomial at a real root isolated by `r`, when `q` shares no root
/// with the defining polynomial except possibly `r` itself: returns true iff q(r) = 0.
pub fn vanishes_at(defining: &Poly, r: &RealRoot, q: &Poly) -> bool {
    if r.is_exact() {
        return q.eval(&r.lo).is_zero();
    }
    let g = defining.gcd(q);
    if g.is_constant() {
        return false;
    }
    // g divides the squarefree defining polynomial, so it has at most one root in (lo, hi)
    let s_lo = g.sign_at(&r.lo);
    let s_hi = g.sign_at(&r.hi);
    if s_lo == 0 || s_hi == 0 {
        // endpoints are not roots of the defining polynomial, hence not of g
        unreachable!("isolating interval endpoint is a root");
    }
    s_lo != s_hi
}

pub fn sign_of(x: &Rational) -> i32 {
    sign(x)
}
