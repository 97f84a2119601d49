//! Finite unions of arcs on ℝℙ¹, decided exactly.
//!
//! ℝℙ¹ is cut open at (1:0) into the angle range [0, π). A set is stored by
//! sorted breakpoints P_0 = (1:0) < P_1 < … < P_{k−1} and one membership bit
//! per cell, the cells being the points P_j and the open gaps (P_j, P_{j+1}),
//! the last gap running up to π. Redundant breakpoints are removed, so equal
//! sets have equal representations.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::quad::{QuadPoint, QuadSurd};
use crate::exact::QMatrix;
use crate::proj::ProjPoint;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcSet {
    bps: Vec<ProjPoint>,
    /// bits[2j]: P_j; bits[2j + 1]: the gap after P_j.
    bits: Vec<bool>,
}

/// A ccw arc from `from` to `to`; equal endpoints mean a point (both closed)
/// or the circle minus a point (both open).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub from: ProjPoint,
    pub to: ProjPoint,
    pub from_closed: bool,
    pub to_closed: bool,
}

/// Where a point sits relative to the breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Point(usize),
    Gap(usize),
}

/// Representative point of the gap after breakpoint j.
fn gap_rep(bps: &[ProjPoint], j: usize) -> ProjPoint {
    match bps.get(j + 1) {
        Some(next) => bps[j].between(next),
        None => {
            let p = &bps[j];
            if p.is_origin() {
                ProjPoint::from_i64(0, 1)
            } else {
                ProjPoint::new(p.a() - BigInt::one(), p.b().clone())
            }
        }
    }
}

fn locate(bps: &[ProjPoint], p: &ProjPoint) -> Cell {
    match bps.binary_search(p) {
        Ok(j) => Cell::Point(j),
        Err(j) => Cell::Gap(j - 1),
    }
}

/// Normalizes a quadratic point to the upper half plane.
fn upper(q: &QuadPoint) -> QuadPoint {
    let s = q.y.signum();
    if s < 0 || (s == 0 && q.x.signum() < 0) {
        QuadPoint { x: q.x.neg(), y: q.y.neg() }
    } else {
        q.clone()
    }
}

fn locate_quad(bps: &[ProjPoint], q: &QuadPoint) -> Cell {
    let q = upper(q);
    // number of breakpoints P with P ≤ q; P < q iff det[P | q] > 0
    let (mut lo, mut hi) = (0usize, bps.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let (a, b) = bps[mid].coords();
        let s = q.det_sign_from(&a, &b);
        if s == 0 {
            return Cell::Point(mid);
        }
        if s > 0 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Cell::Gap(lo - 1)
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { bps: vec![ProjPoint::infinity()], bits: vec![false, false] }
    }

    pub fn full() -> Self {
        ArcSet { bps: vec![ProjPoint::infinity()], bits: vec![true, true] }
    }

    pub fn point(p: &ProjPoint) -> Self {
        Self::from_predicate(vec![p.clone()], |q| q == p)
    }

    /// Builds the set on the given breakpoints from a membership test evaluated at
    /// one point per cell; the test must be constant on cells.
    pub fn from_predicate(mut bps: Vec<ProjPoint>, pred: impl Fn(&ProjPoint) -> bool) -> Self {
        bps.push(ProjPoint::infinity());
        bps.sort();
        bps.dedup();
        let mut bits = Vec::with_capacity(2 * bps.len());
        for j in 0..bps.len() {
            bits.push(pred(&bps[j]));
            bits.push(pred(&gap_rep(&bps, j)));
        }
        let mut s = ArcSet { bps, bits };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let mut bps = vec![self.bps[0].clone()];
        let mut bits = vec![self.bits[0], self.bits[1]];
        for j in 1..self.bps.len() {
            let (p, g) = (self.bits[2 * j], self.bits[2 * j + 1]);
            let prev_gap = *bits.last().unwrap();
            if p == prev_gap && g == prev_gap {
                continue;
            }
            bps.push(self.bps[j].clone());
            bits.push(p);
            bits.push(g);
        }
        self.bps = bps;
        self.bits = bits;
    }

    pub fn breakpoints(&self) -> &[ProjPoint] {
        &self.bps
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|b| *b)
    }

    fn cell_bit(&self, c: Cell) -> bool {
        match c {
            Cell::Point(j) => self.bits[2 * j],
            Cell::Gap(j) => self.bits[2 * j + 1],
        }
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.cell_bit(locate(&self.bps, p))
    }

    pub fn contains_quad(&self, q: &QuadPoint) -> bool {
        self.cell_bit(locate_quad(&self.bps, q))
    }

    /// The point lies in the set together with a neighbourhood of it.
    pub fn interior_contains_quad(&self, q: &QuadPoint) -> bool {
        match locate_quad(&self.bps, q) {
            Cell::Gap(j) => self.bits[2 * j + 1],
            Cell::Point(j) => {
                let before = if j == 0 { *self.bits.last().unwrap() } else { self.bits[2 * j - 1] };
                self.bits[2 * j] && self.bits[2 * j + 1] && before
            }
        }
    }

    pub fn interior_contains(&self, p: &ProjPoint) -> bool {
        let (a, b) = p.coords();
        self.interior_contains_quad(&rational_quad(&a, &b))
    }

    fn combine(&self, o: &ArcSet, f: impl Fn(bool, bool) -> bool) -> ArcSet {
        let bps: Vec<ProjPoint> = self.bps.iter().chain(o.bps.iter()).cloned().collect();
        Self::from_predicate(bps, |p| f(self.contains(p), o.contains(p)))
    }

    pub fn union(&self, o: &ArcSet) -> ArcSet {
        self.combine(o, |a, b| a || b)
    }

    pub fn intersection(&self, o: &ArcSet) -> ArcSet {
        self.combine(o, |a, b| a && b)
    }

    pub fn difference(&self, o: &ArcSet) -> ArcSet {
        self.combine(o, |a, b| a && !b)
    }

    pub fn complement(&self) -> ArcSet {
        ArcSet { bps: self.bps.clone(), bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn is_subset(&self, o: &ArcSet) -> bool {
        self.difference(o).is_empty()
    }

    pub fn is_disjoint(&self, o: &ArcSet) -> bool {
        self.intersection(o).is_empty()
    }

    /// Some point of the set, if nonempty.
    pub fn sample_point(&self) -> Option<ProjPoint> {
        (0..self.bps.len()).find_map(|j| {
            if self.bits[2 * j + 1] {
                Some(gap_rep(&self.bps, j))
            } else if self.bits[2 * j] {
                Some(self.bps[j].clone())
            } else {
                None
            }
        })
    }

    /// Representative points of all cells, in order.
    pub fn cell_representatives(bps: &[ProjPoint]) -> Vec<ProjPoint> {
        let mut out = Vec::with_capacity(2 * bps.len());
        for j in 0..bps.len() {
            out.push(bps[j].clone());
            out.push(gap_rep(bps, j));
        }
        out
    }

    /// The ccw arc from `from` to `to`.
    pub fn ccw_arc(arc: &Arc) -> ArcSet {
        let (s, e) = (&arc.from, &arc.to);
        if s == e {
            return if arc.from_closed && arc.to_closed {
                Self::point(s)
            } else if arc.from_closed || arc.to_closed {
                Self::full()
            } else {
                Self::point(s).complement()
            };
        }
        Self::from_predicate(vec![s.clone(), e.clone()], |p| {
            if p == s {
                arc.from_closed
            } else if p == e {
                arc.to_closed
            } else if s < e {
                s < p && p < e
            } else {
                p > s || p < e
            }
        })
    }

    /// Maximal arcs making up the set; runs touching the cut at (1:0) are joined.
    pub fn arcs(&self) -> Vec<Arc> {
        if self.is_full() || self.is_empty() {
            return Vec::new();
        }
        let n = self.bits.len();
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut c = 0;
        while c < n {
            if !self.bits[c] {
                c += 1;
                continue;
            }
            let start = c;
            while c + 1 < n && self.bits[c + 1] {
                c += 1;
            }
            runs.push((start, c));
            c += 1;
        }
        if runs.len() > 1 && runs[0].0 == 0 && runs.last().unwrap().1 == n - 1 {
            let first = runs.remove(0);
            runs.last_mut().unwrap().1 = first.1 + n;
        }
        let k = self.bps.len();
        runs.into_iter()
            .map(|(a, b)| {
                let (from, from_closed) = if a % 2 == 0 { (self.bps[a / 2].clone(), true) } else { (self.bps[a / 2].clone(), false) };
                let b_cell = b % n;
                let (to, to_closed) = if b_cell % 2 == 0 {
                    (self.bps[b_cell / 2].clone(), true)
                } else {
                    let j = b_cell / 2;
                    (if j + 1 < k { self.bps[j + 1].clone() } else { ProjPoint::infinity() }, false)
                };
                Arc { from, to, from_closed, to_closed }
            })
            .collect()
    }

    pub fn from_arcs(full: bool, arcs: &[Arc]) -> ArcSet {
        if full {
            return Self::full();
        }
        arcs.iter().fold(Self::empty(), |acc, a| acc.union(&Self::ccw_arc(a)))
    }

    /// Image under the projective map of an invertible 2×2 matrix.
    pub fn image(&self, g: &QMatrix) -> ArcSet {
        if self.is_full() || self.is_empty() {
            return self.clone();
        }
        let reverse = g.det().is_negative();
        self.arcs().iter().fold(Self::empty(), |acc, a| {
            let (gs, ge) = (a.from.apply(g), a.to.apply(g));
            let img = if reverse {
                Arc { from: ge, to: gs, from_closed: a.to_closed, to_closed: a.from_closed }
            } else {
                Arc { from: gs, to: ge, from_closed: a.from_closed, to_closed: a.to_closed }
            };
            acc.union(&Self::ccw_arc(&img))
        })
    }
}

/// A rational point as a (degenerate) quadratic point.
pub fn rational_quad(a: &crate::exact::Rational, b: &crate::exact::Rational) -> QuadPoint {
    let one = crate::exact::Rational::one();
    QuadPoint { x: QuadSurd::rational(a.clone(), &one), y: QuadSurd::rational(b.clone(), &one) }
}

#[derive(Serialize, Deserialize)]
struct ArcRepr {
    from: ProjPoint,
    to: ProjPoint,
    orientation: String,
    closed: [bool; 2],
}

#[derive(Serialize, Deserialize)]
struct ArcSetRepr {
    full: bool,
    arcs: Vec<ArcRepr>,
}

impl Serialize for ArcSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ArcSetRepr {
            full: self.is_full(),
            arcs: self
                .arcs()
                .into_iter()
                .map(|a| ArcRepr { from: a.from, to: a.to, orientation: "ccw".into(), closed: [a.from_closed, a.to_closed] })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArcSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ArcSetRepr::deserialize(d)?;
        let mut arcs = Vec::with_capacity(r.arcs.len());
        for a in r.arcs {
            if a.orientation != "ccw" {
                return Err(serde::de::Error::custom(format!("unknown arc orientation {:?}", a.orientation)));
            }
            arcs.push(Arc { from: a.from, to: a.to, from_closed: a.closed[0], to_closed: a.closed[1] });
        }
        Ok(ArcSet::from_arcs(r.full, &arcs))
    }
}

/// Largest number of sets sharing a point, with such a point and the sets containing it.
pub fn max_multiplicity_arcs(sets: &[ArcSet]) -> (usize, ProjPoint, Vec<usize>) {
    let mut bps: Vec<ProjPoint> = sets.iter().flat_map(|s| s.bps.iter().cloned()).collect();
    bps.push(ProjPoint::infinity());
    bps.sort();
    bps.dedup();
    let cells = 2 * bps.len();
    let mut diff = vec![0i64; cells + 1];
    let index = |p: &ProjPoint| bps.binary_search(p).expect("breakpoint of the refinement");
    for s in sets {
        // map each own cell to its range of refined cells
        let k = s.bps.len();
        let own: Vec<usize> = s.bps.iter().map(index).collect();
        for j in 0..k {
            if s.bits[2 * j] {
                diff[2 * own[j]] += 1;
                diff[2 * own[j] + 1] -= 1;
            }
            if s.bits[2 * j + 1] {
                let lo = 2 * own[j] + 1;
                let hi = if j + 1 < k { 2 * own[j + 1] } else { cells };
                diff[lo] += 1;
                diff[hi] -= 1;
            }
        }
    }
    let (mut best, mut at, mut run) = (0i64, 0usize, 0i64);
    for (c, d) in diff.iter().take(cells).enumerate() {
        run += d;
        if run > best {
            best = run;
            at = c;
        }
    }
    let reps = ArcSet::cell_representatives(&bps);
    let witness = reps[at].clone();
    let members = sets.iter().enumerate().filter(|(_, s)| s.contains(&witness)).map(|(i, _)| i).collect();
    (best as usize, witness, members)
}

/// The rational point of the chart [0, 1) at t, see `ProjPoint::from_chart`.
pub fn chart_arc(t0: &crate::exact::Rational, t1: &crate::exact::Rational, closed: bool) -> ArcSet {
    ArcSet::ccw_arc(&Arc {
        from: ProjPoint::from_chart(t0),
        to: ProjPoint::from_chart(t1),
        from_closed: closed,
        to_closed: closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn p(a: i64, b: i64) -> ProjPoint {
        ProjPoint::from_i64(a, b)
    }

    #[test]
    fn boolean_algebra() {
        let a = ArcSet::ccw_arc(&Arc { from: p(1, 1), to: p(-1, 1), from_closed: true, to_closed: false });
        let b = ArcSet::ccw_arc(&Arc { from: p(0, 1), to: p(1, 0), from_closed: true, to_closed: true });
        assert!(a.contains(&p(1, 1)) && !a.contains(&p(-1, 1)) && a.contains(&p(0, 1)));
        assert!(b.contains(&p(1, 0)) && b.contains(&p(-1, 1)));
        let i = a.intersection(&b);
        assert_eq!(i, ArcSet::ccw_arc(&Arc { from: p(0, 1), to: p(-1, 1), from_closed: true, to_closed: false }));
        assert_eq!(a.union(&a.complement()), ArcSet::full());
        assert!(i.is_subset(&a) && i.is_subset(&b));
        assert!(a.complement().is_disjoint(&a));
    }

    #[test]
    fn wrapping_arcs_round_trip() {
        let w = ArcSet::ccw_arc(&Arc { from: p(-1, 1), to: p(1, 1), from_closed: false, to_closed: true });
        assert!(w.contains(&p(1, 0)) && w.contains(&p(1, 1)) && !w.contains(&p(-1, 1)) && !w.contains(&p(0, 1)));
        let arcs = w.arcs();
        assert_eq!(arcs.len(), 1);
        assert_eq!(ArcSet::from_arcs(false, &arcs), w);
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(serde_json::from_str::<ArcSet>(&json).unwrap(), w);
        let punctured = ArcSet::point(&p(1, 0)).complement();
        let arcs = punctured.arcs();
        assert_eq!(arcs, vec![Arc { from: p(1, 0), to: p(1, 0), from_closed: false, to_closed: false }]);
    }

    #[test]
    fn images_are_exact() {
        // slope map x ↦ x/16 as a map of lines (x, y) ↦ (4x, y/4) on direction (1, s): s ↦ s/16
        let g = QMatrix::diag(&[int(4), rat(1, 4)]);
        let u = ArcSet::ccw_arc(&Arc { from: p(10, -1), to: p(10, 1), from_closed: true, to_closed: true });
        let img = u.image(&g);
        assert_eq!(img, ArcSet::ccw_arc(&Arc { from: p(160, -1), to: p(160, 1), from_closed: true, to_closed: true }));
        let flip = QMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let a = ArcSet::ccw_arc(&Arc { from: p(2, 1), to: p(1, 1), from_closed: true, to_closed: false });
        let b = a.image(&flip);
        assert_eq!(b, ArcSet::ccw_arc(&Arc { from: p(1, 1), to: p(1, 2), from_closed: false, to_closed: true }));
    }

    #[test]
    fn multiplicity_examples() {
        let a = chart_arc(&rat(0, 1), &rat(3, 10), true);
        let b = chart_arc(&rat(2, 10), &rat(5, 10), true);
        let c = chart_arc(&rat(4, 10), &rat(7, 10), true);
        assert_eq!(max_multiplicity_arcs(&[a.clone(), b.clone(), c.clone()]).0, 2);
        let d = chart_arc(&rat(8, 10), &rat(9, 10), true);
        assert_eq!(max_multiplicity_arcs(&[a.clone(), d.clone()]).0, 1);
        let nested: Vec<ArcSet> = (1..=5).map(|k| chart_arc(&rat(10 - k, 20), &rat(10 + k, 20), false)).collect();
        let (m, w, members) = max_multiplicity_arcs(&nested);
        assert_eq!(m, 5);
        assert_eq!(members.len(), 5);
        assert!(nested.iter().all(|s| s.contains(&w)));
    }
}
