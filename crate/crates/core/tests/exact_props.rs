use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use proxdyn::exact::poly::char_poly;
use proxdyn::exact::rational::{int, int_valuation, pow2, rat};
use proxdyn::exact::spectral::log_eigen_moduli;
use proxdyn::exact::{log_singular_values, smith_valuations, Poly, QMatrix, Rational};

/// Determinant-one matrix from a list of elementary operations row_i += c·row_j
/// and diagonal pairs (k, 1/k).
fn sl_matrix(d: usize, ops: &[(usize, usize, i64, i64)]) -> QMatrix {
    let mut m = QMatrix::identity(d);
    for &(i, j, num, den) in ops {
        let (i, j) = (i % d, j % d);
        let c = rat(num, den.max(1));
        let mut e = QMatrix::identity(d);
        if i == j {
            if c.is_zero() {
                continue;
            }
            let mut diag = vec![int(1); d];
            diag[i] = c.clone();
            diag[(i + 1) % d] = Rational::one() / c;
            e = QMatrix::diag(&diag);
        } else {
            e = e.add(&QMatrix::from_vec(d, d, (0..d * d).map(|k| if k == i * d + j { c.clone() } else { int(0) }).collect()));
        }
        m = &m * &e;
    }
    m
}

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64, i64)>> {
    prop::collection::vec((0usize..4, 0usize..4, -3i64..=3, 1i64..=3), 1..7)
}

/// det(xI − M) by cofactor expansion over polynomial entries.
fn cofactor_char_poly(m: &QMatrix) -> Poly {
    let d = m.dim();
    let entries: Vec<Vec<Poly>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let c = -m.get(i, j).clone();
                    if i == j {
                        Poly::new(vec![c, int(1)])
                    } else {
                        Poly::constant(c)
                    }
                })
                .collect()
        })
        .collect();
    laplace(&entries)
}

fn laplace(a: &[Vec<Poly>]) -> Poly {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut acc = Poly::zero();
    for j in 0..n {
        let minor: Vec<Vec<Poly>> =
            a[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect()).collect();
        let term = a[0][j].mul(&laplace(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Elementary divisor valuations from gcds of k×k minors, after clearing denominators.
fn minors_gcd_valuations(m: &QMatrix, p: u64) -> Vec<i64> {
    let d = m.dim();
    let den = m.common_denominator();
    let scaled = m.scale(&Rational::from_integer(den.clone()));
    let shift = int_valuation(&den, p);
    let mut prev = 0i64;
    let mut out = Vec::new();
    for k in 1..=d {
        let mut g = num_bigint::BigInt::zero();
        for rows in subsets(d, k) {
            for cols in subsets(d, k) {
                let sub: Vec<Rational> =
                    rows.iter().flat_map(|&i| cols.iter().map(move |&j| (i, j))).map(|(i, j)| scaled.get(i, j).clone()).collect();
                let det = QMatrix::from_vec(k, k, sub).det();
                g = g.gcd(&det.to_integer());
            }
        }
        let v = int_valuation(&g, p);
        out.push(v - prev - shift);
        prev = v;
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut with: Vec<Vec<usize>> = subsets(n - 1, k - 1);
    for s in &mut with {
        s.push(n - 1);
    }
    with.extend(subsets(n - 1, k));
    with
}

fn opposite(xs: &[proxdyn::exact::IntervalReal]) -> Vec<proxdyn::exact::IntervalReal> {
    xs.iter().rev().map(|x| x.neg()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn char_poly_matches_cofactor_expansion(d in 1usize..=4, ops in ops(), extra in -5i64..=5) {
        let mut m = sl_matrix(d, &ops);
        if d > 1 {
            m = m.add(&QMatrix::from_vec(d, d, (0..d * d).map(|k| if k == 1 { int(extra) } else { int(0) }).collect()));
        }
        prop_assert_eq!(char_poly(&m), cofactor_char_poly(&m));
    }

    #[test]
    fn char_poly_conjugation_invariant(d in 2usize..=4, a in ops(), b in ops()) {
        let g = sl_matrix(d, &a);
        let h = sl_matrix(d, &b);
        let conj = &(&g * &h) * &g.inverse().unwrap();
        prop_assert_eq!(char_poly(&conj), char_poly(&h));
    }

    #[test]
    fn reversal_law(d in 2usize..=4, a in ops()) {
        let m = sl_matrix(d, &a);
        prop_assert_eq!(char_poly(&m).reversed().monic(), char_poly(&m.inverse().unwrap()));
    }

    #[test]
    fn smith_matches_minor_gcds(d in 2usize..=3, a in ops(), k in 1i64..=12, p in prop::sample::select(vec![2u64, 3, 5])) {
        let m = sl_matrix(d, &a).scale(&int(k));
        let mut expected = minors_gcd_valuations(&m, p);
        expected.sort();
        prop_assert_eq!(smith_valuations(&m, p).vals, expected);
    }

    #[test]
    fn smith_opposition(d in 2usize..=3, a in ops(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let m = sl_matrix(d, &a);
        prop_assert_eq!(smith_valuations(&m.inverse().unwrap(), p), smith_valuations(&m, p).opposite());
    }

    #[test]
    fn singular_values_opposition(d in 2usize..=3, a in ops()) {
        let m = sl_matrix(d, &a);
        let eps = pow2(-30);
        let s = log_singular_values(&m, &eps).unwrap();
        let t = log_singular_values(&m.inverse().unwrap(), &eps).unwrap();
        for (x, y) in t.iter().zip(opposite(&s)) {
            prop_assert!(x.overlaps(&y));
        }
    }

    #[test]
    fn refinement_is_monotone(d in 2usize..=3, a in ops()) {
        let m = sl_matrix(d, &a);
        let coarse = log_eigen_moduli(&m, &pow2(-8)).unwrap();
        let fine = log_eigen_moduli(&m, &pow2(-30)).unwrap();
        for (c, f) in coarse.iter().zip(&fine) {
            prop_assert!(c.contains_interval(f));
            prop_assert!(f.width() <= pow2(-30));
        }
    }

    #[test]
    fn squaring_doubles_eigenvalue_logs(d in 2usize..=3, a in ops()) {
        let m = sl_matrix(d, &a);
        let eps = pow2(-30);
        let l = log_eigen_moduli(&m, &eps).unwrap();
        let l2 = log_eigen_moduli(&(&m * &m), &eps).unwrap();
        for (x, y) in l.iter().zip(&l2) {
            prop_assert!(x.scale(&int(2)).overlaps(y));
        }
    }
}

#[test]
fn determinant_one_generator_is_determinant_one() {
    let m = sl_matrix(3, &[(0, 1, 2, 1), (2, 2, 3, 2), (1, 0, -1, 3)]);
    assert_eq!(m.det(), int(1));
    assert!(!m.det().is_negative());
}
