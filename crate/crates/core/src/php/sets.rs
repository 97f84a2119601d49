//! Set descriptors for the ping-pong sets: exact arc unions on ℝℙ¹, and for
//! d ≥ 3 unions of metric balls around flags or tubes around the loci Y_x.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::arcs::{max_multiplicity_arcs, ArcSet};
use crate::error::{Error, Result};
use crate::exact::rational::{serde_rational, to_f64, Rational};
use crate::flag::{flag_distance_f64, transversality_defect_f64, Flag};
use crate::proj::ProjPoint;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagBall {
    pub center: Flag,
    #[serde(with = "serde_rational")]
    pub radius: Rational,
}

/// {z : transversality defect of (around, z) < radius}, an open neighbourhood of Y_around.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagTube {
    pub around: Flag,
    #[serde(with = "serde_rational")]
    pub radius: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetDescriptor {
    ArcUnion(ArcSet),
    BallUnion { balls: Vec<FlagBall> },
    TubeUnion { tubes: Vec<FlagTube> },
}

/// Sampled membership with a relative margin around the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    Boundary,
}

impl SetDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            SetDescriptor::ArcUnion(_) => "arc-union",
            SetDescriptor::BallUnion { .. } => "ball-union",
            SetDescriptor::TubeUnion { .. } => "tube-union",
        }
    }

    pub fn as_arcs(&self) -> Option<&ArcSet> {
        match self {
            SetDescriptor::ArcUnion(a) => Some(a),
            _ => None,
        }
    }

    pub fn ball(center: Flag, radius: Rational) -> Self {
        SetDescriptor::BallUnion { balls: vec![FlagBall { center, radius }] }
    }

    pub fn tube(around: Flag, radius: Rational) -> Self {
        SetDescriptor::TubeUnion { tubes: vec![FlagTube { around, radius }] }
    }

    /// Exact membership of a flag of dimension 2; sampled membership otherwise (boundary counts as inside).
    pub fn contains_flag(&self, z: &Flag) -> bool {
        match self {
            SetDescriptor::ArcUnion(a) => a.contains(&z.line()),
            _ => SampledSet::new(self).classify(&z.orthonormal_f64(), 0.0) != Membership::Outside,
        }
    }
}

/// A d ≥ 3 descriptor with orthonormalized centres, for repeated sampling.
pub struct SampledSet {
    parts: Vec<(DMatrix<f64>, f64, bool)>,
}

impl SampledSet {
    pub fn new(desc: &SetDescriptor) -> Self {
        let parts = match desc {
            SetDescriptor::ArcUnion(_) => panic!("arc unions are handled exactly"),
            SetDescriptor::BallUnion { balls } => {
                balls.iter().map(|b| (b.center.orthonormal_f64(), to_f64(&b.radius), false)).collect()
            }
            SetDescriptor::TubeUnion { tubes } => {
                tubes.iter().map(|t| (t.around.orthonormal_f64(), to_f64(&t.radius), true)).collect()
            }
        };
        SampledSet { parts }
    }

    /// Inside if some part holds z with room `margin·radius` to spare, outside if every
    /// part misses z by at least that much, boundary otherwise.
    pub fn classify(&self, q: &DMatrix<f64>, margin: f64) -> Membership {
        let mut all_out = true;
        for (c, r, tube) in &self.parts {
            let v = if *tube { transversality_defect_f64(c, q) } else { flag_distance_f64(c, q) };
            if v < r * (1.0 - margin) {
                return Membership::Inside;
            }
            if v <= r * (1.0 + margin) {
                all_out = false;
            }
        }
        if all_out {
            Membership::Outside
        } else {
            Membership::Boundary
        }
    }
}

/// Maximal covering multiplicity: exact for arc unions, sampled for the other kinds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub m: usize,
    pub members: Vec<usize>,
    pub witness: Option<ProjPoint>,
    pub exact: bool,
}

pub fn max_multiplicity(sets: &[SetDescriptor], samples: &[DMatrix<f64>]) -> Result<Multiplicity> {
    let Some(first) = sets.first() else {
        return Ok(Multiplicity { m: 0, members: Vec::new(), witness: None, exact: true });
    };
    if sets.iter().any(|s| std::mem::discriminant(s) != std::mem::discriminant(first)) {
        return Err(Error::MixedKinds);
    }
    if let SetDescriptor::ArcUnion(_) = first {
        let arcs: Vec<ArcSet> = sets.iter().map(|s| s.as_arcs().unwrap().clone()).collect();
        let (m, w, members) = max_multiplicity_arcs(&arcs);
        return Ok(Multiplicity { m, members, witness: Some(w), exact: true });
    }
    let sampled: Vec<SampledSet> = sets.iter().map(SampledSet::new).collect();
    let mut best = Multiplicity { m: 0, members: Vec::new(), witness: None, exact: false };
    for q in samples {
        let members: Vec<usize> =
            (0..sets.len()).filter(|&i| sampled[i].classify(q, 0.0) != Membership::Outside).collect();
        if members.len() > best.m {
            best.m = members.len();
            best.members = members;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;
    use crate::php::arcs::chart_arc;

    #[test]
    fn descriptors_serialize_with_kind_tag() {
        let a = SetDescriptor::ArcUnion(chart_arc(&rat(1, 10), &rat(2, 10), true));
        let v = serde_json::to_value(&a).unwrap();
        assert_eq!(v["kind"], "arc-union");
        assert_eq!(v["full"], false);
        assert_eq!(serde_json::from_value::<SetDescriptor>(v).unwrap(), a);
        let b = SetDescriptor::ball(Flag::standard(3), rat(1, 8));
        let v = serde_json::to_value(&b).unwrap();
        assert_eq!(v["kind"], "ball-union");
        assert_eq!(serde_json::from_value::<SetDescriptor>(v).unwrap(), b);
    }

    #[test]
    fn mixed_kinds_rejected() {
        let a = SetDescriptor::ArcUnion(ArcSet::full());
        let b = SetDescriptor::ball(Flag::standard(3), rat(1, 8));
        assert!(matches!(max_multiplicity(&[a, b], &[]), Err(Error::MixedKinds)));
    }

    #[test]
    fn sampled_ball_membership() {
        let e = Flag::standard(3);
        let b = SetDescriptor::ball(e.clone(), rat(1, 10));
        assert!(b.contains_flag(&e));
        assert!(!b.contains_flag(&e.transversal_partner()));
        let t = SetDescriptor::tube(e.clone(), rat(1, 10));
        assert!(t.contains_flag(&e));
        assert!(!t.contains_flag(&e.transversal_partner()));
    }
}
