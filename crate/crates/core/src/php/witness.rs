//! Instances and witnesses of the dynamical pigeonhole property, and their file format.

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::sets::SetDescriptor;
use crate::error::{Error, Result};
use crate::exact::rational::{int, serde_rational, Rational};
use crate::exact::QMatrix;
use crate::group::{GroupPresentation, Word};
use crate::proximal::Certification;

pub const WITNESS_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct PhpInstance {
    pub group: GroupPresentation,
    pub f: Vec<Word>,
    pub epsilon: Rational,
}

impl PhpInstance {
    pub fn new(group: GroupPresentation, f: Vec<Word>, epsilon: Rational) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::EmptyList);
        }
        if !epsilon.is_positive() {
            return Err(Error::PreconditionUnmet("epsilon must be positive".into()));
        }
        for w in &f {
            group.eval(w)?;
        }
        Ok(PhpInstance { group, f, epsilon })
    }

    /// F = generators and their inverses.
    pub fn symmetric_generators(group: GroupPresentation, epsilon: Rational) -> Result<Self> {
        let f = group.alphabet().into_iter().map(|l| Word::from_letters([l])).collect();
        Self::new(group, f, epsilon)
    }
}

/// Least n with ε²·n > 4K².
pub fn choose_n(epsilon: &Rational, k: u128) -> u64 {
    assert!(epsilon.is_positive() && k > 0);
    let k = Rational::from_integer(k.into());
    let q = int(4) * &k * &k / (epsilon * epsilon);
    let n: num_bigint::BigInt = q.floor().to_integer() + 1;
    n.to_u64().expect("n fits in u64")
}

/// ε·√n > 2K, decided exactly.
pub fn satisfies_bound(epsilon: &Rational, n: u64, k: u128) -> bool {
    let k = Rational::from_integer(k.into());
    epsilon * epsilon * int(n as i64) > int(4) * &k * &k
}

/// m < ε·√n, decided exactly.
pub fn below_threshold(m: usize, epsilon: &Rational, n: u64) -> bool {
    let m = int(m as i64);
    &m * &m < epsilon * epsilon * int(n as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessElement {
    pub word: Word,
    pub matrix: QMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub gamma0: Word,
    pub conjugators: Vec<Word>,
    pub powers: Vec<u32>,
    #[serde(rename = "K")]
    pub k: u128,
    #[serde(with = "serde_rational")]
    pub radius_u: Rational,
    #[serde(with = "serde_rational")]
    pub radius_v: Rational,
    pub seed: u64,
    pub certification: Certification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhpWitness {
    pub version: u32,
    #[serde(with = "serde_group")]
    pub group: GroupPresentation,
    #[serde(rename = "F")]
    pub f: Vec<Word>,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub n: u64,
    pub gammas: Vec<WitnessElement>,
    #[serde(rename = "C")]
    pub c: Vec<SetDescriptor>,
    #[serde(rename = "D")]
    pub d: Vec<SetDescriptor>,
    pub provenance: Provenance,
}

impl PhpWitness {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let w: PhpWitness = serde_json::from_str(text)?;
        if w.version != WITNESS_VERSION {
            return Err(Error::Schema(format!("unsupported witness version {}", w.version)));
        }
        Ok(w)
    }

    /// Structural checks shared by every verifier: counts, matrices matching words, kinds.
    pub fn check_shape(&self) -> Result<()> {
        let n = self.n as usize;
        if self.gammas.len() != n || self.c.len() != n || self.d.len() != n {
            return Err(Error::MalformedWitness(format!(
                "n = {} but {} gammas, {} C-sets, {} D-sets",
                n,
                self.gammas.len(),
                self.c.len(),
                self.d.len()
            )));
        }
        for (i, g) in self.gammas.iter().enumerate() {
            if self.group.eval(&g.word)? != g.matrix {
                return Err(Error::MalformedWitness(format!("gamma {} does not match its word", i + 1)));
            }
        }
        let arcs = self.group.dim() == 2;
        for s in self.c.iter().chain(&self.d) {
            if s.as_arcs().is_some() != arcs {
                return Err(Error::MalformedWitness(format!("{} set in dimension {}", s.kind(), self.group.dim())));
            }
        }
        Ok(())
    }
}

mod serde_group {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: Serializer>(g: &GroupPresentation, s: S) -> std::result::Result<S::Ok, S::Error> {
        g.to_value().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<GroupPresentation, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        GroupPresentation::from_value(&v).map_err(D::Error::custom)
    }
}
