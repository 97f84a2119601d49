//! Finitely generated subgroups of SL_d(ℚ) given by generator matrices.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::word::{Letter, Word};
use crate::error::{Error, Result};
use crate::exact::rational::rational_to_string;
use crate::exact::QMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: char,
    pub matrix: QMatrix,
    pub inverse: QMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    dim: usize,
    generators: Vec<Generator>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorDoc {
    label: String,
    matrix: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupDoc {
    version: u32,
    dimension: usize,
    field: String,
    generators: Vec<GeneratorDoc>,
}

impl GroupPresentation {
    pub fn new(dim: usize, gens: Vec<(char, QMatrix)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Schema("dimension must be positive".into()));
        }
        let mut generators = Vec::with_capacity(gens.len());
        for (label, m) in gens {
            if !label.is_ascii_lowercase() || label == 'e' {
                return Err(Error::Schema(format!("generator label {label:?} must be a lowercase letter other than 'e'")));
            }
            if generators.iter().any(|g: &Generator| g.label == label) {
                return Err(Error::Schema(format!("duplicate generator label {label:?}")));
            }
            if !m.is_square() {
                return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
            }
            if m.rows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: m.rows() });
            }
            let det = m.det();
            if !det.is_one() {
                return Err(Error::DeterminantNotOne { label: label.to_string(), det: rational_to_string(&det) });
            }
            let inverse = m.inverse().expect("determinant one");
            generators.push(Generator { label, matrix: m, inverse });
        }
        Ok(GroupPresentation { dim, generators })
    }

    pub fn from_i64(gens: &[(char, &[&[i64]])]) -> Result<Self> {
        let dim = gens.first().map_or(1, |g| g.1.len());
        Self::new(dim, gens.iter().map(|(l, m)| (*l, QMatrix::from_i64(m))).collect())
    }

    /// The Sanov subgroup ⟨[[1,2],[0,1]], [[1,0],[2,1]]⟩ of SL_2(ℤ), free of rank 2.
    pub fn sanov() -> Self {
        Self::from_i64(&[('a', &[&[1, 2], &[0, 1]]), ('b', &[&[1, 0], &[2, 1]])]).unwrap()
    }

    pub fn trivial(dim: usize) -> Self {
        GroupPresentation { dim, generators: Vec::new() }
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let doc: GroupDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn from_value(v: &serde_json::Value) -> Result<Self> {
        let doc: GroupDoc = serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_doc(doc)
    }

    fn from_doc(doc: GroupDoc) -> Result<Self> {
        if doc.version != 1 {
            return Err(Error::Schema(format!("unsupported group version {}", doc.version)));
        }
        if doc.field != "Q" {
            return Err(Error::Schema(format!("unsupported field {:?}", doc.field)));
        }
        let mut gens = Vec::new();
        for g in doc.generators {
            let mut chars = g.label.chars();
            let (Some(label), None) = (chars.next(), chars.next()) else {
                return Err(Error::Schema(format!("generator label {:?} must be one letter", g.label)));
            };
            let rows = g.matrix.iter().map(|r| r.iter().map(|s| crate::exact::rational::parse_rational(s)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
            let m = QMatrix::from_rows(rows)?;
            gens.push((label, m));
        }
        Self::new(doc.dimension, gens)
    }

    pub fn to_value(&self) -> serde_json::Value {
        let doc = GroupDoc {
            version: 1,
            dimension: self.dim,
            field: "Q".into(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorDoc { label: g.label.to_string(), matrix: g.matrix.to_strings() })
                .collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("serializable")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Generators followed by their inverses.
    pub fn alphabet(&self) -> Vec<Letter> {
        let g: Vec<Letter> = self.generators.iter().map(|g| Letter::generator(g.label)).collect();
        g.iter().copied().chain(g.iter().map(|l| l.inverse())).collect()
    }

    pub fn letter_matrix(&self, l: Letter) -> Result<&QMatrix> {
        let g = self
            .generators
            .iter()
            .find(|g| g.label == l.label())
            .ok_or_else(|| Error::Schema(format!("unknown generator {:?}", l.as_char())))?;
        Ok(if l.is_inverse() { &g.inverse } else { &g.matrix })
    }

    /// Matrix of a word, multiplying left to right.
    pub fn eval(&self, w: &Word) -> Result<QMatrix> {
        let mut acc = QMatrix::identity(self.dim);
        for &l in w.letters() {
            acc = &acc * self.letter_matrix(l)?;
        }
        Ok(acc)
    }

    pub fn letter_table(&self) -> BTreeMap<Letter, QMatrix> {
        self.alphabet().into_iter().map(|l| (l, self.letter_matrix(l).unwrap().clone())).collect()
    }

    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("d={};", self.dim));
        for g in &self.generators {
            h.update(format!("{}:{};", g.label, g.matrix.content_hash()));
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validate() {
        let text = r#"{"version":1,"dimension":2,"field":"Q","generators":[
            {"label":"a","matrix":[["1","2"],["0","1"]]},{"label":"b","matrix":[["1","0"],["2","1"]]}]}"#;
        let g = GroupPresentation::parse_json(text).unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g, GroupPresentation::sanov());
        assert_eq!(GroupPresentation::parse_json(&g.to_json()).unwrap(), g);
        let ab = g.eval(&"ab".parse().unwrap()).unwrap();
        assert_eq!(ab, QMatrix::from_i64(&[&[5, 2], &[2, 1]]));

        let bad = r#"{"version":1,"dimension":2,"field":"Q","generators":[{"label":"a","matrix":[["2","0"],["0","1"]]}]}"#;
        assert!(matches!(GroupPresentation::parse_json(bad), Err(Error::DeterminantNotOne { .. })));
        let rect = r#"{"version":1,"dimension":2,"field":"Q","generators":[{"label":"a","matrix":[["1","0","0"],["0","1","0"]]}]}"#;
        assert!(matches!(GroupPresentation::parse_json(rect), Err(Error::NonSquare { .. })));
        assert!(matches!(GroupPresentation::parse_json("{}"), Err(Error::Schema(_))));
    }
}
