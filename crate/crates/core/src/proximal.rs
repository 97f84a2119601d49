//! Cartan and Jordan projections, loxodromic elements, their fixed flags, and
//! contraction of the flag space towards the attracting flag.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::exact::interval::{ln2, ln_bounds, IntervalReal};
use crate::exact::poly::char_poly;
use crate::exact::quad::{surd, QuadPoint, QuadSurd};
use crate::exact::rational::{floor_dyadic, int, pow2, rat, Rational};
use crate::exact::roots::{isolate_real_roots, refine_real_relative};
use crate::exact::spectral::{has_distinct_moduli, log_eigen_moduli_with, log_singular_values_with, Precision};
use crate::exact::{smith_valuations, QMatrix};
use crate::flag::{canonicalize, transversality_defect_f64, transversal, Flag};
use crate::group::{enumerate_ball, GroupPresentation, Word};
use crate::php::sets::{Membership, SampledSet, SetDescriptor};
use crate::position::{kernel_basis, random_flag, structured_candidate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "place", rename_all = "kebab-case")]
pub enum Place {
    Real,
    Padic { p: u64 },
}

/// A weakly decreasing traceless vector, entries as enclosures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylVector {
    #[serde(flatten)]
    pub place: Place,
    pub entries: Vec<IntervalReal>,
    /// Exact elementary-divisor valuations behind a p-adic vector, weakly increasing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Vec<i64>>,
}

impl WeylVector {
    /// The opposition involution: reverse and negate.
    pub fn opposite(&self) -> WeylVector {
        WeylVector {
            place: self.place,
            entries: self.entries.iter().rev().map(|x| x.neg()).collect(),
            valuations: self.valuations.as_ref().map(|v| v.iter().rev().map(|x| -x).collect()),
        }
    }

    /// α_i = x_i − x_{i+1}.
    pub fn simple_roots(&self) -> Vec<IntervalReal> {
        self.entries.windows(2).map(|w| w[0].sub(&w[1])).collect()
    }

    pub fn overlaps(&self, o: &WeylVector) -> bool {
        self.entries.len() == o.entries.len() && self.entries.iter().zip(&o.entries).all(|(a, b)| a.overlaps(b))
    }
}

pub fn cartan(g: &QMatrix, place: Place, eps: &Rational) -> Result<WeylVector> {
    cartan_with(g, place, eps, Precision::default())
}

pub fn cartan_with(g: &QMatrix, place: Place, eps: &Rational, prec: Precision) -> Result<WeylVector> {
    match place {
        Place::Real => {
            let entries = log_singular_values_with(g, eps, prec)?;
            Ok(WeylVector { place, entries, valuations: None })
        }
        Place::Padic { p } => {
            if g.det().is_zero() {
                return Err(Error::Singular);
            }
            let vals = smith_valuations(g, p).vals;
            let bits = 64.max(prec.start_bits);
            let (lo, hi) = ln_bounds(&int(p as i64), bits);
            let lnp = IntervalReal::new(lo, hi);
            let entries = vals.iter().map(|&v| lnp.scale(&int(-v))).collect();
            Ok(WeylVector { place, entries, valuations: Some(vals) })
        }
    }
}

pub fn jordan(g: &QMatrix, eps: &Rational) -> Result<WeylVector> {
    let entries = log_eigen_moduli_with(g, eps, Precision::default())?;
    Ok(WeylVector { place: Place::Real, entries, valuations: None })
}

/// All eigenvalue moduli pairwise distinct, decided exactly.
pub fn is_loxodromic(g: &QMatrix) -> bool {
    g.is_square() && !g.det().is_zero() && has_distinct_moduli(g)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProximalData {
    pub g: QMatrix,
    /// Rational representatives of the fixed flags (exact when the eigenvectors are rational).
    pub attracting: Flag,
    pub repelling: Flag,
    /// Lower bound enclosure of min_i (λ_i − λ_{i+1}).
    pub gap: IntervalReal,
    /// Exact fixed lines in dimension 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attracting_line: Option<QuadPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repelling_line: Option<QuadPoint>,
}

/// Exact eigenline of a 2×2 matrix for the eigenvalue μ.
fn eigenline(g: &QMatrix, mu: &QuadSurd) -> QuadPoint {
    let (a, b, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    let r = mu.radicand.clone();
    if !b.is_zero() {
        QuadPoint::new(QuadSurd::rational(b.clone(), &r), mu.sub(&QuadSurd::rational(a.clone(), &r)))
    } else if !c.is_zero() {
        QuadPoint::new(mu.sub(&QuadSurd::rational(d.clone(), &r)), QuadSurd::rational(c.clone(), &r))
    } else if mu.sub(&QuadSurd::rational(a.clone(), &r)).is_zero() {
        QuadPoint::new(QuadSurd::rational(int(1), &r), QuadSurd::rational(int(0), &r))
    } else {
        QuadPoint::new(QuadSurd::rational(int(0), &r), QuadSurd::rational(int(1), &r))
    }
}

/// Exact (attracting, repelling) lines of a loxodromic 2×2 matrix.
pub fn fixed_lines(g: &QMatrix) -> Result<(QuadPoint, QuadPoint)> {
    if g.dim() != 2 || !is_loxodromic(g) {
        return Err(Error::NotLoxodromic);
    }
    let t = g.trace();
    let disc = &t * &t - int(4) * g.det();
    let half = rat(1, 2);
    let s = if t.is_negative() { -half.clone() } else { half.clone() };
    let big = surd(&t * &half, s.clone(), &disc);
    let small = surd(&t * &half, -s, &disc);
    Ok((eigenline(g, &big), eigenline(g, &small)))
}

/// Rational approximate eigenvector for a real eigenvalue isolated to high precision.
fn eigenvector(g: &QMatrix, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let d = g.dim();
    if lo == hi {
        let m = g.sub(&QMatrix::identity(d).scale(lo));
        return kernel_basis(&m).remove(0);
    }
    let mu = (lo + hi) / int(2);
    let m = g.sub(&QMatrix::identity(d).scale(&mu));
    if m.det().is_zero() {
        return kernel_basis(&m).remove(0);
    }
    let w: Vec<Rational> = (0..d).map(|i| int(2 * i as i64 + 1)).collect();
    let mut v = m.solve(&w).expect("shift is not an eigenvalue");
    for _ in 0..2 {
        let s = v.iter().map(|x| x.abs()).max().unwrap();
        let scaled: Vec<Rational> = v.iter().map(|x| x / &s).collect();
        v = m.solve(&scaled).expect("shift is not an eigenvalue");
    }
    let s = v.iter().map(|x| x.abs()).max().unwrap();
    v.iter().map(|x| floor_dyadic(&(x / &s), 96)).collect()
}

pub fn attracting_repelling(g: &QMatrix) -> Result<ProximalData> {
    if !is_loxodromic(g) {
        return Err(Error::NotLoxodromic);
    }
    let d = g.dim();
    let lam = jordan(g, &pow2(-30))?;
    let gap = lam
        .entries
        .windows(2)
        .map(|w| w[0].sub(&w[1]))
        .reduce(|a, b| IntervalReal::new(a.lo.clone().min(b.lo), a.hi.clone().min(b.hi)))
        .unwrap_or_else(IntervalReal::zero);
    if d == 2 {
        let (att, rep) = fixed_lines(g)?;
        let attracting = Flag::from_line(&att.approximate(128));
        let repelling = Flag::from_line(&rep.approximate(128));
        return Ok(ProximalData { g: g.clone(), attracting, repelling, gap, attracting_line: Some(att), repelling_line: Some(rep) });
    }
    let p = char_poly(g);
    let mut roots = isolate_real_roots(&p);
    for r in &mut roots {
        refine_real_relative(&p, r, 160);
    }
    // distinct moduli: order by |midpoint| descending once the moduli intervals separate
    roots.sort_by(|a, b| b.midpoint().abs().cmp(&a.midpoint().abs()));
    let vecs: Vec<Vec<Rational>> = roots.iter().map(|r| eigenvector(g, &r.lo, &r.hi)).collect();
    let attracting = canonicalize(&QMatrix::from_columns(&vecs))?;
    let rev: Vec<Vec<Rational>> = vecs.iter().rev().cloned().collect();
    let repelling = canonicalize(&QMatrix::from_columns(&rev))?;
    debug_assert!(transversal(&attracting, &repelling));
    Ok(ProximalData { g: g.clone(), attracting, repelling, gap, attracting_line: None, repelling_line: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "level", rename_all = "kebab-case")]
pub enum Certification {
    Exact,
    Sampled { grid: usize, adversarial: usize, margin: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contraction {
    pub n: u32,
    pub certification: Certification,
}

/// Least N ≤ N_max with g^N(𝓑 ∖ V⁻) ⊆ U⁺.
pub fn certify_contraction(
    g: &QMatrix,
    v_minus: &SetDescriptor,
    u_plus: &SetDescriptor,
    n_max: u32,
    cfg: &RunConfig,
) -> Result<Contraction> {
    if !is_loxodromic(g) {
        return Err(Error::NotLoxodromic);
    }
    if let (Some(v), Some(u)) = (v_minus.as_arcs(), u_plus.as_arcs()) {
        let (att, rep) = fixed_lines(g)?;
        if !u.interior_contains_quad(&att) {
            return Err(Error::MisalignedFixedPoints("attracting line is not interior to U+".into()));
        }
        if !v.interior_contains_quad(&rep) {
            return Err(Error::MisalignedFixedPoints("repelling line is not interior to V-".into()));
        }
        let outside = v.complement();
        let mut power = QMatrix::identity(2);
        for n in 1..=n_max {
            power = &power * g;
            if outside.image(&power).is_subset(u) {
                return Ok(Contraction { n, certification: Certification::Exact });
            }
        }
        return Err(Error::ExceededNMax { n_max });
    }
    let data = attracting_repelling(g)?;
    let u = SampledSet::new(u_plus);
    let v = SampledSet::new(v_minus);
    let margin = crate::exact::rational::to_f64(&cfg.sample_margin);
    if u.classify(&data.attracting.orthonormal_f64(), margin) != Membership::Inside {
        return Err(Error::MisalignedFixedPoints("attracting flag is not interior to U+".into()));
    }
    if v.classify(&data.repelling.orthonormal_f64(), margin) != Membership::Inside {
        return Err(Error::MisalignedFixedPoints("repelling flag is not interior to V-".into()));
    }
    let samples = outside_samples(v_minus, g.dim(), cfg);
    let gf = to_f64_matrix(g);
    let mut current: Vec<DMatrix<f64>> = samples;
    for n in 1..=n_max {
        current = current.iter().map(|q| (&gf * q).qr().q()).collect();
        if current.iter().all(|q| u.classify(q, margin) == Membership::Inside) {
            return Ok(Contraction {
                n,
                certification: Certification::Sampled {
                    grid: cfg.grid_samples,
                    adversarial: cfg.adversarial_samples,
                    margin: crate::exact::rational::rational_to_string(&cfg.sample_margin),
                },
            });
        }
    }
    Err(Error::ExceededNMax { n_max })
}

pub fn to_f64_matrix(g: &QMatrix) -> DMatrix<f64> {
    let rows = g.to_f64_rows();
    DMatrix::from_fn(g.rows(), g.cols(), |i, j| rows[i][j])
}

/// Orthonormal flags outside a d ≥ 3 descriptor by the sampling margin: a random
/// grid plus points pushed up against the boundary.
pub fn outside_samples(v: &SetDescriptor, d: usize, cfg: &RunConfig) -> Vec<DMatrix<f64>> {
    let set = SampledSet::new(v);
    let margin = crate::exact::rational::to_f64(&cfg.sample_margin);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut out = Vec::new();
    for _ in 0..cfg.grid_samples {
        let q = random_flag(&mut rng, d, cfg.flag_entry_bound).orthonormal_f64();
        if set.classify(&q, margin) == Membership::Outside {
            out.push(q);
        }
    }
    let anchors: Vec<(Flag, f64, bool)> = match v {
        SetDescriptor::TubeUnion { tubes } => {
            tubes.iter().map(|t| (t.around.clone(), crate::exact::rational::to_f64(&t.radius), true)).collect()
        }
        SetDescriptor::BallUnion { balls } => {
            balls.iter().map(|b| (b.center.clone(), crate::exact::rational::to_f64(&b.radius), false)).collect()
        }
        SetDescriptor::ArcUnion(_) => Vec::new(),
    };
    if anchors.is_empty() {
        return out;
    }
    for k in 0..cfg.adversarial_samples {
        let (x, r, tube) = &anchors[k % anchors.len()];
        let inner = if *tube {
            match structured_candidate(&mut rng, &[x], d, cfg.flag_entry_bound) {
                Some(z) => z.orthonormal_f64(),
                None => continue,
            }
        } else {
            x.orthonormal_f64()
        };
        let outer = random_flag(&mut rng, d, cfg.flag_entry_bound).orthonormal_f64();
        let xq = x.orthonormal_f64();
        let measure = |q: &DMatrix<f64>| {
            if *tube {
                transversality_defect_f64(&xq, q)
            } else {
                crate::flag::flag_distance_f64(&xq, q)
            }
        };
        let target = r * (1.0 + 2.0 * margin);
        if measure(&outer) <= target {
            continue;
        }
        // bisect along the segment of bases towards the boundary of the anchor part
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            let q = (&inner * (1.0 - mid) + &outer * mid).qr().q();
            if measure(&q) > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let q = (&inner * (1.0 - hi) + &outer * hi).qr().q();
        if set.classify(&q, margin) == Membership::Outside {
            out.push(q);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub radius: usize,
    /// Enclosure of max over the ball of α_i(κ(w)), i = 1..d−1.
    pub suprema: Vec<IntervalReal>,
    /// 1-based indices of the simple roots whose supremum certainly exceeds the threshold.
    pub flagged: Vec<usize>,
    pub threshold: IntervalReal,
}

pub fn theta_estimate(group: &GroupPresentation, radius: usize, cfg: &RunConfig) -> Result<ThetaEstimate> {
    let d = group.dim();
    let threshold = ln2(64).scale(&cfg.theta_threshold_ln2);
    let ball = enumerate_ball(group, radius);
    let mut sup: Vec<IntervalReal> = vec![IntervalReal::zero(); d.saturating_sub(1)];
    let mut first = true;
    for e in &ball.entries {
        let k = cartan_with(&e.matrix, Place::Real, &pow2(-24), cfg.precision)?;
        let roots = k.simple_roots();
        for (s, r) in sup.iter_mut().zip(roots) {
            *s = if first {
                r
            } else {
                IntervalReal::new(s.lo.clone().max(r.lo), s.hi.clone().max(r.hi))
            };
        }
        first = false;
    }
    let flagged = sup.iter().enumerate().filter(|(_, s)| s.certainly_gt(&threshold)).map(|(i, _)| i + 1).collect();
    Ok(ThetaEstimate { radius, suprema: sup, flagged, threshold })
}

/// Shortest-first search of the word ball for a loxodromic element.
pub fn find_loxodromic(group: &GroupPresentation, max_radius: usize) -> Result<(Word, ProximalData)> {
    let ball = enumerate_ball(group, max_radius);
    for e in &ball.entries {
        if is_loxodromic(&e.matrix) {
            return Ok((e.word.clone(), attracting_repelling(&e.matrix)?));
        }
    }
    Err(Error::NoneFoundWithinRadius { radius: max_radius })
}
