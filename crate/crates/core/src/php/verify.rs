//! Checking a witness against the two defining conditions, independently of how
//! it was produced.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::arcs::{max_multiplicity_arcs, ArcSet};
use super::sets::{Membership, SampledSet, SetDescriptor};
use super::witness::{below_threshold, PhpWitness};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::exact::interval::IntervalReal;
use crate::exact::rational::{int, rational_to_string, serde_rational, Rational};
use crate::exact::QMatrix;
use crate::flag::{act, Flag};
use crate::group::{GroupPresentation, Word};
use crate::position::random_flag;
use crate::proj::ProjPoint;
use crate::proximal::{to_f64_matrix, Certification};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// a·C_i
    TranslatedC,
    /// a·γ_i⁻¹(X ∖ D_i)
    TranslatedComplementD,
    /// D_i
    D,
    /// γ_i⁻¹(X ∖ C_i)
    PulledComplementC,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetLabel {
    pub family: Family,
    /// 1-based index i.
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translate: Option<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Condition1 {
    Pass { sets: usize },
    Fail { first: SetLabel, second: SetLabel, point: Option<ProjPoint> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityFinding {
    pub m: usize,
    /// Enclosure of ε·√n.
    pub bound: IntervalReal,
    pub members: Vec<SetLabel>,
    pub point: Option<ProjPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Condition2 {
    Pass(MultiplicityFinding),
    Fail(MultiplicityFinding),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: u64,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub condition1: Condition1,
    pub condition2: Condition2,
    pub certification: Certification,
    /// How condition (2) was decided.
    pub criterion: String,
}

impl VerificationReport {
    pub fn passes(&self) -> bool {
        matches!(self.condition1, Condition1::Pass { .. }) && matches!(self.condition2, Condition2::Pass(_))
    }

    pub fn summary(&self) -> String {
        let c1 = match &self.condition1 {
            Condition1::Pass { .. } => "condition1 pass".to_string(),
            Condition1::Fail { first, second, .. } => format!(
                "condition1 fail ({:?} {} meets {:?} {})",
                first.family, first.index, second.family, second.index
            ),
        };
        let c2 = match &self.condition2 {
            Condition2::Pass(f) => format!("condition2 pass (m = {}, bound {})", f.m, f.bound),
            Condition2::Fail(f) => format!("condition2 fail (m = {}, bound {})", f.m, f.bound),
        };
        format!("{c1}; {c2}")
    }
}

const CRITERION: &str = "maximal covering multiplicity m of {D_i} and {γ_i⁻¹(X∖C_i)} compared strictly: m < ε·√n";

fn bound_enclosure(epsilon: &Rational, n: u64) -> IntervalReal {
    IntervalReal::point(epsilon * epsilon * int(n as i64)).sqrt(64)
}

fn label(family: Family, index: usize, translate: Option<&Word>) -> SetLabel {
    SetLabel { family, index: index + 1, translate: translate.cloned() }
}

pub fn verify_witness(w: &PhpWitness, f: &[Word], epsilon: &Rational, cfg: &RunConfig) -> Result<VerificationReport> {
    w.check_shape()?;
    if f.is_empty() {
        return Err(Error::EmptyList);
    }
    let f_mats: Vec<QMatrix> = f.iter().map(|a| w.group.eval(a)).collect::<Result<_>>()?;
    let inv: Vec<QMatrix> = w
        .gammas
        .iter()
        .map(|g| g.matrix.inverse().ok_or_else(|| Error::MalformedWitness("singular gamma".into())))
        .collect::<Result<_>>()?;
    if w.group.dim() == 2 {
        verify_exact(w, f, &f_mats, &inv, epsilon)
    } else {
        verify_sampled(w, f, &f_mats, epsilon, cfg)
    }
}

fn verify_exact(
    w: &PhpWitness,
    f: &[Word],
    f_mats: &[QMatrix],
    inv: &[QMatrix],
    epsilon: &Rational,
) -> Result<VerificationReport> {
    let c: Vec<&ArcSet> = w.c.iter().map(|s| s.as_arcs().unwrap()).collect();
    let d: Vec<&ArcSet> = w.d.iter().map(|s| s.as_arcs().unwrap()).collect();
    for i in 0..c.len() {
        if !c[i].is_subset(d[i]) {
            return Err(Error::MalformedWitness(format!("C_{} is not contained in D_{}", i + 1, i + 1)));
        }
    }
    let mut family1: Vec<(SetLabel, ArcSet)> = Vec::new();
    for (a, am) in f.iter().zip(f_mats) {
        for i in 0..c.len() {
            family1.push((label(Family::TranslatedC, i, Some(a)), c[i].image(am)));
            family1.push((label(Family::TranslatedComplementD, i, Some(a)), d[i].complement().image(&(am * &inv[i]))));
        }
    }
    let mut condition1 = Condition1::Pass { sets: family1.len() };
    'outer: for x in 0..family1.len() {
        for y in x + 1..family1.len() {
            let meet = family1[x].1.intersection(&family1[y].1);
            if !meet.is_empty() {
                condition1 = Condition1::Fail {
                    first: family1[x].0.clone(),
                    second: family1[y].0.clone(),
                    point: meet.sample_point(),
                };
                break 'outer;
            }
        }
    }
    let mut labels = Vec::new();
    let mut family2 = Vec::new();
    for i in 0..c.len() {
        labels.push(label(Family::D, i, None));
        family2.push(d[i].clone());
        labels.push(label(Family::PulledComplementC, i, None));
        family2.push(c[i].complement().image(&inv[i]));
    }
    let (m, point, members) = if family2.is_empty() {
        (0, None, Vec::new())
    } else {
        let (m, p, members) = max_multiplicity_arcs(&family2);
        (m, Some(p), members)
    };
    let finding = MultiplicityFinding {
        m,
        bound: bound_enclosure(epsilon, w.n),
        members: members.into_iter().map(|k| labels[k].clone()).collect(),
        point,
    };
    let condition2 =
        if below_threshold(m, epsilon, w.n) { Condition2::Pass(finding) } else { Condition2::Fail(finding) };
    Ok(VerificationReport {
        n: w.n,
        epsilon: epsilon.clone(),
        condition1,
        condition2,
        certification: Certification::Exact,
        criterion: CRITERION.into(),
    })
}

/// A set z ∈ S ⟺ (pull·z ∈ base) xor complement.
struct PulledSet {
    base: SampledSet,
    pull: DMatrix<f64>,
    complement: bool,
}

impl PulledSet {
    /// Counted as a member unless certainly outside by the margin.
    fn may_contain(&self, q: &DMatrix<f64>, margin: f64) -> bool {
        let moved = (&self.pull * q).qr().q();
        let m = self.base.classify(&moved, margin);
        if self.complement {
            m != Membership::Inside
        } else {
            m != Membership::Outside
        }
    }
}

fn verify_sampled(
    w: &PhpWitness,
    f: &[Word],
    f_mats: &[QMatrix],
    epsilon: &Rational,
    cfg: &RunConfig,
) -> Result<VerificationReport> {
    let dim = w.group.dim();
    let margin = crate::exact::rational::to_f64(&cfg.sample_margin);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7e51);
    let mut samples: Vec<DMatrix<f64>> =
        (0..cfg.grid_samples).map(|_| random_flag(&mut rng, dim, cfg.flag_entry_bound).orthonormal_f64()).collect();
    for s in w.c.iter().chain(&w.d) {
        let centres: Vec<&Flag> = match s {
            SetDescriptor::BallUnion { balls } => balls.iter().map(|b| &b.center).collect(),
            SetDescriptor::TubeUnion { tubes } => tubes.iter().map(|t| &t.around).collect(),
            SetDescriptor::ArcUnion(_) => Vec::new(),
        };
        for x in centres {
            samples.push(x.orthonormal_f64());
            for a in f_mats {
                samples.push(act(a, x)?.orthonormal_f64());
            }
        }
    }
    let mut family1: Vec<(SetLabel, PulledSet)> = Vec::new();
    for (a, am) in f.iter().zip(f_mats) {
        let a_inv = am.inverse().ok_or(Error::Singular)?;
        for i in 0..w.c.len() {
            family1.push((
                label(Family::TranslatedC, i, Some(a)),
                PulledSet { base: SampledSet::new(&w.c[i]), pull: to_f64_matrix(&a_inv), complement: false },
            ));
            let g = &w.gammas[i].matrix * &a_inv;
            family1.push((
                label(Family::TranslatedComplementD, i, Some(a)),
                PulledSet { base: SampledSet::new(&w.d[i]), pull: to_f64_matrix(&g), complement: true },
            ));
        }
    }
    let mut condition1 = Condition1::Pass { sets: family1.len() };
    'samples: for q in &samples {
        let hits: Vec<usize> = (0..family1.len()).filter(|&k| family1[k].1.may_contain(q, margin)).collect();
        if hits.len() >= 2 {
            condition1 =
                Condition1::Fail { first: family1[hits[0]].0.clone(), second: family1[hits[1]].0.clone(), point: None };
            break 'samples;
        }
    }
    let mut family2: Vec<(SetLabel, PulledSet)> = Vec::new();
    let identity = DMatrix::<f64>::identity(dim, dim);
    for i in 0..w.c.len() {
        family2.push((
            label(Family::D, i, None),
            PulledSet { base: SampledSet::new(&w.d[i]), pull: identity.clone(), complement: false },
        ));
        family2.push((
            label(Family::PulledComplementC, i, None),
            PulledSet { base: SampledSet::new(&w.c[i]), pull: to_f64_matrix(&w.gammas[i].matrix), complement: true },
        ));
    }
    let mut best: Vec<usize> = Vec::new();
    for q in &samples {
        let hits: Vec<usize> = (0..family2.len()).filter(|&k| family2[k].1.may_contain(q, margin)).collect();
        if hits.len() > best.len() {
            best = hits;
        }
    }
    let finding = MultiplicityFinding {
        m: best.len(),
        bound: bound_enclosure(epsilon, w.n),
        members: best.iter().map(|&k| family2[k].0.clone()).collect(),
        point: None,
    };
    let condition2 =
        if below_threshold(finding.m, epsilon, w.n) { Condition2::Pass(finding) } else { Condition2::Fail(finding) };
    Ok(VerificationReport {
        n: w.n,
        epsilon: epsilon.clone(),
        condition1,
        condition2,
        certification: Certification::Sampled {
            grid: cfg.grid_samples,
            adversarial: samples.len() - cfg.grid_samples,
            margin: rational_to_string(&cfg.sample_margin),
        },
        criterion: CRITERION.into(),
    })
}

/// Â = {γ : γ·x ∈ A} restricted to `words`; exact for arc unions.
pub fn pullback_hat(
    a: &SetDescriptor,
    basepoint: &Flag,
    words: &[Word],
    group: &GroupPresentation,
) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for w in words {
        let g = group.eval(w)?;
        let moved = act(&g, basepoint)?;
        if a.contains_flag(&moved) {
            out.push(w.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::php::arcs::chart_arc;
    use crate::exact::rational::rat;

    #[test]
    fn hat_edge_cases() {
        let g = GroupPresentation::sanov();
        let words: Vec<Word> = ["e", "a", "b", "ab", "BA"].iter().map(|s| s.parse().unwrap()).collect();
        let x = Flag::from_line(&ProjPoint::from_i64(1, 1));
        let full = SetDescriptor::ArcUnion(ArcSet::full());
        assert_eq!(pullback_hat(&full, &x, &words, &g).unwrap(), words);
        let empty = SetDescriptor::ArcUnion(ArcSet::empty());
        assert!(pullback_hat(&empty, &x, &words, &g).unwrap().is_empty());
        let t = x.line().to_chart();
        let around = SetDescriptor::ArcUnion(chart_arc(&(&t - rat(1, 100)), &(&t + rat(1, 100)), true));
        assert!(pullback_hat(&around, &x, &words, &g).unwrap().contains(&Word::identity()));
    }
}
