//! Building witnesses: conjugates of powers of one loxodromic element, with
//! neighbourhoods of the conjugated fixed points.

use nalgebra::DMatrix;
use num_traits::Signed;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arcs::{chart_arc, ArcSet};
use super::sets::SetDescriptor;
use super::verify::verify_witness;
use super::witness::{choose_n, PhpInstance, PhpWitness, Provenance, WitnessElement, WITNESS_VERSION};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::exact::quad::QuadPoint;
use crate::exact::rational::{floor_dyadic, floor_log2, from_f64, int, to_f64, Rational};
use crate::exact::QMatrix;
use crate::flag::{act, flag_distance_f64, Flag};
use crate::group::{GroupPresentation, Letter, Word};
use crate::position::{general_position_check, pipeline_k, Configuration, GpMode};
use crate::proximal::{certify_contraction, find_loxodromic, Certification};

const CHART_BITS: u32 = 192;
const MIN_SEPARATION: f64 = 1e-6;

/// A point of the flag space that the pipeline moves around: an exact (possibly
/// irrational) line when d = 2, a rational flag otherwise.
#[derive(Clone, Debug)]
pub enum Anchor {
    Line(QuadPoint),
    Flag(Flag),
}

impl Anchor {
    pub fn act(&self, g: &QMatrix) -> Result<Anchor> {
        Ok(match self {
            Anchor::Line(q) => Anchor::Line(q.apply([g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1)])),
            Anchor::Flag(x) => Anchor::Flag(act(g, x)?),
        })
    }

    pub fn coincides(&self, o: &Anchor) -> bool {
        match (self, o) {
            (Anchor::Line(p), Anchor::Line(q)) => p.same_point(q),
            (Anchor::Flag(x), Anchor::Flag(y)) => x == y,
            (Anchor::Line(p), Anchor::Flag(y)) | (Anchor::Flag(y), Anchor::Line(p)) => {
                let l = y.line();
                p.det_sign_from(&l.coords().0, &l.coords().1) == 0
            }
        }
    }

    /// A rational flag equal to the anchor, or within 2^-192 of it for irrational lines.
    pub fn to_flag(&self) -> Flag {
        match self {
            Anchor::Line(q) => Flag::from_line(&q.approximate(CHART_BITS)),
            Anchor::Flag(x) => x.clone(),
        }
    }

    fn chart(&self) -> Rational {
        match self {
            Anchor::Line(q) => q.approximate(CHART_BITS).to_chart(),
            Anchor::Flag(x) => x.line().to_chart(),
        }
    }

    /// Membership in the interior of an arc set, decided exactly.
    fn interior_of(&self, s: &ArcSet) -> bool {
        match self {
            Anchor::Line(q) => s.interior_contains_quad(q),
            Anchor::Flag(x) => s.interior_contains(&x.line()),
        }
    }
}

/// Uniform over reduced words of length ≤ max_len: lengths weighted by their word counts.
fn random_word(rng: &mut impl Rng, alphabet: &[Letter], max_len: usize) -> Word {
    if alphabet.is_empty() {
        return Word::identity();
    }
    let k = alphabet.len() as f64;
    let weights: Vec<f64> =
        (0..=max_len).map(|l| if l == 0 { 1.0 } else { k * (k - 1.0).powi(l as i32 - 1) }).collect();
    let len = WeightedIndex::new(&weights).map(|w| w.sample(rng)).unwrap_or(max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = alphabet[rng.gen_range(0..alphabet.len())];
        if letters.last().is_some_and(|&p| p == l.inverse()) {
            continue;
        }
        letters.push(l);
    }
    Word::from_letters(letters)
}

/// First pair of coinciding points in the family a·s_i·x^• (a ∈ F ∪ {e}).
fn first_coincidence(points: &[Anchor]) -> Option<(usize, usize)> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].coincides(&points[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Rational flags standing in for irrational fixed flags are only close to the true
/// points, so distinct d ≥ 3 anchors must also be apart in floating point.
fn numerically_separated(points: &[Anchor]) -> bool {
    let qs: Vec<DMatrix<f64>> = points
        .iter()
        .filter_map(|p| match p {
            Anchor::Flag(x) if x.dim() > 2 => Some(x.orthonormal_f64()),
            _ => None,
        })
        .collect();
    (0..qs.len()).all(|i| (i + 1..qs.len()).all(|j| flag_distance_f64(&qs[i], &qs[j]) > MIN_SEPARATION))
}

fn with_identity(group: &GroupPresentation, f: &[Word]) -> Result<Vec<QMatrix>> {
    let mut mats = vec![QMatrix::identity(group.dim())];
    for w in f {
        mats.push(group.eval(w)?);
    }
    Ok(mats)
}

/// Translates a·x for a in `mats`, x in `points`, grouped by a.
fn translates(mats: &[QMatrix], points: &[Anchor]) -> Result<Vec<Anchor>> {
    let mut out = Vec::with_capacity(mats.len() * points.len());
    for a in mats {
        for x in points {
            out.push(x.act(a)?);
        }
    }
    Ok(out)
}

/// Random conjugators s_1..s_n such that all points a·s_i·x^• are distinct and each
/// family {s_i x^•} is in general position.
#[allow(clippy::too_many_arguments)]
pub fn search_generic_tuple(
    group: &GroupPresentation,
    f: &[Word],
    x_plus: &Anchor,
    x_minus: &Anchor,
    n: usize,
    seed: u64,
    max_tries: usize,
    word_len: usize,
) -> Result<Vec<Word>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mats = with_identity(group, f)?;
    let alphabet = group.alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut distinct_failures, mut gp_failures) = (0usize, 0usize);
    for _ in 0..max_tries {
        let words: Vec<Word> = (0..n).map(|_| random_word(&mut rng, &alphabet, word_len)).collect();
        let mut base = Vec::with_capacity(2 * n);
        for w in &words {
            let s = group.eval(w)?;
            base.push(x_plus.act(&s)?);
            base.push(x_minus.act(&s)?);
        }
        let all = translates(&mats, &base)?;
        if first_coincidence(&all).is_some() || !numerically_separated(&all) {
            distinct_failures += 1;
            continue;
        }
        if !tuple_in_general_position(&base, group.dim(), seed)? {
            gp_failures += 1;
            continue;
        }
        return Ok(words);
    }
    let diagnostic = if distinct_failures >= gp_failures {
        format!("translated points kept coinciding ({distinct_failures} of {max_tries} tries)")
    } else {
        format!("general position kept failing ({gp_failures} of {max_tries} tries)")
    };
    Err(Error::ExhaustedTries { tries: max_tries, diagnostic })
}

/// General position of {s_i x^+} and of {s_i x^-}, given interleaved points.
pub fn tuple_in_general_position(base: &[Anchor], d: usize, seed: u64) -> Result<bool> {
    for parity in 0..2 {
        let flags: Vec<Flag> = base.iter().skip(parity).step_by(2).map(Anchor::to_flag).collect();
        let mode = if d == 2 { GpMode::ExactD2 } else { GpMode::monte_carlo(seed) };
        let config = match Configuration::new(flags) {
            Ok(c) => c,
            Err(_) => return Ok(false),
        };
        match general_position_check(&config, mode) {
            Ok(v) if v.holds() => {}
            Ok(_) | Err(Error::DuplicatePoints(..)) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Neighbourhoods U_i^± ⊂ V_i^± of the points x_i^±.
#[derive(Clone, Debug)]
pub struct Neighborhoods {
    pub u_plus: Vec<SetDescriptor>,
    pub u_minus: Vec<SetDescriptor>,
    pub v_plus: Vec<SetDescriptor>,
    pub v_minus: Vec<SetDescriptor>,
    pub radius_u: Rational,
    pub radius_v: Rational,
}

fn circle_distance(s: &Rational, t: &Rational) -> Rational {
    let d = (s - t).abs();
    let other = int(1) - &d;
    if other < d {
        other
    } else {
        d
    }
}

fn wrap(t: Rational) -> Rational {
    let f = t.floor();
    t - f
}

/// Closed chart arc of radius r around the chart parameter of x.
fn chart_ball(x: &Anchor, r: &Rational) -> ArcSet {
    let p = (-floor_log2(r)).max(0) as u32 + 8;
    let c = floor_dyadic(&x.chart(), p);
    chart_arc(&wrap(&c - r), &wrap(&c + r), true)
}

/// Neighbourhoods for interleaved points [x_1^+, x_1^-, x_2^+, …]: radius
/// `safety · separation / 3` for V and half that for U, separation taken over all
/// F-translates. For d = 2 the arcs are checked exactly and shrunk until the
/// F ∪ {e}-translates of the U-arcs and the V-arcs are pairwise disjoint.
pub fn build_neighborhoods(
    points: &[Anchor],
    f_mats: &[QMatrix],
    safety: &Rational,
    d: usize,
) -> Result<Neighborhoods> {
    let mut mats = vec![QMatrix::identity(d)];
    mats.extend(f_mats.iter().cloned());
    let all = translates(&mats, points)?;
    if let Some((i, j)) = first_coincidence(&all) {
        return Err(Error::ZeroSeparation(i, j));
    }
    if d == 2 {
        neighborhoods_on_line(points, &mats, &all, safety)
    } else {
        neighborhoods_sampled(points, &all, safety)
    }
}

fn neighborhoods_on_line(
    points: &[Anchor],
    mats: &[QMatrix],
    all: &[Anchor],
    safety: &Rational,
) -> Result<Neighborhoods> {
    let charts: Vec<Rational> = all.iter().map(Anchor::chart).collect();
    let mut sep: Option<Rational> = None;
    for i in 0..charts.len() {
        for j in i + 1..charts.len() {
            let c = circle_distance(&charts[i], &charts[j]);
            if sep.as_ref().map_or(true, |s| c < *s) {
                sep = Some(c);
            }
        }
    }
    let sep = sep.unwrap_or_else(|| int(1));
    let raw = safety * sep / int(3);
    let mut radius_v = floor_dyadic(&raw, (-floor_log2(&raw)).max(0) as u32 + 4);
    for _ in 0..64 {
        let radius_u = &radius_v / int(2);
        let u: Vec<ArcSet> = points.iter().map(|x| chart_ball(x, &radius_u)).collect();
        let v: Vec<ArcSet> = points.iter().map(|x| chart_ball(x, &radius_v)).collect();
        let centred = points.iter().zip(&u).all(|(x, s)| x.interior_of(s))
            && u.iter().zip(&v).all(|(a, b)| a.is_subset(b));
        if centred && pairwise_disjoint(&v) && pairwise_disjoint(&translated(&u, mats)) {
            let pick = |sets: &[ArcSet], parity: usize| -> Vec<SetDescriptor> {
                sets.iter().skip(parity).step_by(2).cloned().map(SetDescriptor::ArcUnion).collect()
            };
            return Ok(Neighborhoods {
                u_plus: pick(&u, 0),
                u_minus: pick(&u, 1),
                v_plus: pick(&v, 0),
                v_minus: pick(&v, 1),
                radius_u,
                radius_v,
            });
        }
        radius_v /= int(2);
    }
    Err(Error::ExhaustedTries { tries: 64, diagnostic: "neighbourhood radii could not be made disjoint".into() })
}

fn translated(sets: &[ArcSet], mats: &[QMatrix]) -> Vec<ArcSet> {
    mats.iter().flat_map(|a| sets.iter().map(move |s| s.image(a))).collect()
}

fn pairwise_disjoint(sets: &[ArcSet]) -> bool {
    (0..sets.len()).all(|i| (i + 1..sets.len()).all(|j| sets[i].is_disjoint(&sets[j])))
}

fn neighborhoods_sampled(points: &[Anchor], all: &[Anchor], safety: &Rational) -> Result<Neighborhoods> {
    let qs: Vec<DMatrix<f64>> = all.iter().map(|x| x.to_flag().orthonormal_f64()).collect();
    let mut sep = f64::INFINITY;
    for i in 0..qs.len() {
        for j in i + 1..qs.len() {
            sep = sep.min(flag_distance_f64(&qs[i], &qs[j]));
        }
    }
    if !sep.is_finite() {
        sep = 1.0;
    }
    if sep <= 0.0 {
        return Err(Error::ZeroSeparation(0, 1));
    }
    let raw = from_f64(to_f64(safety) * sep / 3.0);
    let radius_v = floor_dyadic(&raw, (-floor_log2(&raw)).max(0) as u32 + 4);
    let radius_u = &radius_v / int(2);
    let flags: Vec<Flag> = points.iter().map(Anchor::to_flag).collect();
    let ball = |parity: usize, r: &Rational| -> Vec<SetDescriptor> {
        flags.iter().skip(parity).step_by(2).map(|x| SetDescriptor::ball(x.clone(), r.clone())).collect()
    };
    let tube = |parity: usize, r: &Rational| -> Vec<SetDescriptor> {
        flags.iter().skip(parity).step_by(2).map(|x| SetDescriptor::tube(x.clone(), r.clone())).collect()
    };
    Ok(Neighborhoods {
        u_plus: ball(0, &radius_u),
        u_minus: ball(1, &radius_u),
        v_plus: tube(0, &radius_v),
        v_minus: tube(1, &radius_v),
        radius_u,
        radius_v,
    })
}

/// g^m(𝓑 ∖ V) ⊆ U, exactly, for arc sets.
fn contracts_at(g: &QMatrix, m: u32, v: &ArcSet, u: &ArcSet) -> bool {
    let power = g.pow(m as i64).expect("invertible");
    v.complement().image(&power).is_subset(u)
}

/// Least m such that h^m and h^{-m} both contract: h^m(𝓑∖V⁻) ⊆ U⁺, h^{-m}(𝓑∖V⁺) ⊆ U⁻.
fn common_power(
    h: &QMatrix,
    nb: &Neighborhoods,
    i: usize,
    cfg: &RunConfig,
) -> Result<(u32, Certification)> {
    let h_inv = h.inverse().ok_or(Error::Singular)?;
    let fwd = certify_contraction(h, &nb.v_minus[i], &nb.u_plus[i], cfg.n_max, cfg)?;
    let bwd = certify_contraction(&h_inv, &nb.v_plus[i], &nb.u_minus[i], cfg.n_max, cfg)?;
    let start = fwd.n.max(bwd.n);
    if let (Some(vm), Some(up), Some(vp), Some(um)) =
        (nb.v_minus[i].as_arcs(), nb.u_plus[i].as_arcs(), nb.v_plus[i].as_arcs(), nb.u_minus[i].as_arcs())
    {
        for m in start..=cfg.n_max {
            if contracts_at(h, m, vm, up) && contracts_at(&h_inv, m, vp, um) {
                return Ok((m, Certification::Exact));
            }
        }
        return Err(Error::ExceededNMax { n_max: cfg.n_max });
    }
    Ok((start, fwd.certification))
}

/// The full pipeline: γ_0, K, n, conjugators, neighbourhoods, powers; the result is
/// checked with the verifier before being returned.
pub fn construct_witness(instance: &PhpInstance, cfg: &RunConfig) -> Result<PhpWitness> {
    let group = &instance.group;
    let d = group.dim();
    let (gamma0, data) = find_loxodromic(group, cfg.loxodromic_radius)?;
    let k: u128 = if d == 2 { 1 } else { pipeline_k(d) };
    let n = choose_n(&instance.epsilon, k);
    if d > 2 && n > cfg.sampled_n_limit {
        return Err(Error::Unsupported(format!(
            "sampled pipeline needs n = {n}, above the configured limit {}",
            cfg.sampled_n_limit
        )));
    }
    let (x_plus, x_minus) = match (&data.attracting_line, &data.repelling_line) {
        (Some(a), Some(r)) => (Anchor::Line(a.clone()), Anchor::Line(r.clone())),
        _ => (Anchor::Flag(data.attracting.clone()), Anchor::Flag(data.repelling.clone())),
    };
    let conjugators = search_generic_tuple(
        group,
        &instance.f,
        &x_plus,
        &x_minus,
        n as usize,
        cfg.seed,
        cfg.tuple_retries,
        cfg.tuple_word_len,
    )?;
    let f_mats: Vec<QMatrix> = instance.f.iter().map(|w| group.eval(w)).collect::<Result<_>>()?;
    let s_mats: Vec<QMatrix> = conjugators.iter().map(|w| group.eval(w)).collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(2 * s_mats.len());
    for s in &s_mats {
        points.push(x_plus.act(s)?);
        points.push(x_minus.act(s)?);
    }
    let mut safety = cfg.safety.clone();
    let mut last_failure = String::new();
    for _ in 0..6 {
        let nb = build_neighborhoods(&points, &f_mats, &safety, d)?;
        let mut gammas = Vec::with_capacity(s_mats.len());
        let mut powers = Vec::with_capacity(s_mats.len());
        let mut certification = Certification::Exact;
        for (i, (s, sw)) in s_mats.iter().zip(&conjugators).enumerate() {
            let s_inv = s.inverse().ok_or(Error::Singular)?;
            let h = &(s * &data.g) * &s_inv;
            let (m, level) = common_power(&h, &nb, i, cfg)?;
            certification = level;
            let word = sw.concat(&gamma0.pow(m)).concat(&sw.inverse());
            let matrix = group.eval(&word)?;
            gammas.push(WitnessElement { word, matrix });
            powers.push(m);
        }
        let witness = PhpWitness {
            version: WITNESS_VERSION,
            group: group.clone(),
            f: instance.f.clone(),
            epsilon: instance.epsilon.clone(),
            n,
            gammas,
            c: nb.u_plus.clone(),
            d: nb.v_plus.clone(),
            provenance: Provenance {
                gamma0: gamma0.clone(),
                conjugators: conjugators.clone(),
                powers,
                k,
                radius_u: nb.radius_u.clone(),
                radius_v: nb.radius_v.clone(),
                seed: cfg.seed,
                certification,
            },
        };
        let report = verify_witness(&witness, &instance.f, &instance.epsilon, cfg)?;
        if report.passes() {
            return Ok(witness);
        }
        last_failure = report.summary();
        safety /= int(2);
    }
    Err(Error::ExhaustedTries { tries: 6, diagnostic: format!("verification kept failing: {last_failure}") })
}
