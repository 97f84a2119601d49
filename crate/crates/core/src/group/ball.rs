//! Word balls with deduplication by matrix.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::presentation::GroupPresentation;
use super::word::Word;
use crate::exact::QMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallEntry {
    pub word: Word,
    pub matrix: QMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub radius: usize,
    /// Distinct elements in breadth-first order, each with its first reduced word.
    pub entries: Vec<BallEntry>,
    /// Reduced words whose matrix had already been seen (relations detected).
    pub collisions: usize,
    /// Index of the first entry of each word length 0..=radius, plus the total.
    pub level_starts: Vec<usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries of word length ≤ r, a prefix of the full list.
    pub fn within(&self, r: usize) -> &[BallEntry] {
        &self.entries[..self.level_starts[r.min(self.radius) + 1]]
    }
}

/// Breadth-first enumeration: each new element is extended by every letter except
/// the inverse of its last letter; an element reached again is counted as a collision.
pub fn enumerate_ball(group: &GroupPresentation, radius: usize) -> Ball {
    let alphabet = group.alphabet();
    let table = group.letter_table();
    let id = QMatrix::identity(group.dim());
    let mut seen: HashMap<QMatrix, usize> = HashMap::new();
    seen.insert(id.clone(), 0);
    let mut entries = vec![BallEntry { word: Word::identity(), matrix: id }];
    let mut level_starts = vec![0, 1];
    let mut collisions = 0;
    for _ in 0..radius {
        let (start, end) = (level_starts[level_starts.len() - 2], level_starts[level_starts.len() - 1]);
        for idx in start..end {
            let (word, m) = (entries[idx].word.clone(), entries[idx].matrix.clone());
            for &l in &alphabet {
                if word.last() == Some(l.inverse()) {
                    continue;
                }
                let next = &m * &table[&l];
                if seen.contains_key(&next) {
                    collisions += 1;
                    continue;
                }
                seen.insert(next.clone(), entries.len());
                entries.push(BallEntry { word: word.push(l), matrix: next });
            }
        }
        level_starts.push(entries.len());
    }
    Ball { radius, entries, collisions, level_starts }
}

/// All freely reduced words of length exactly `len`, in alphabet order.
pub fn reduced_words(group: &GroupPresentation, len: usize) -> Vec<Word> {
    let alphabet = group.alphabet();
    let mut cur = vec![Word::identity()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &cur {
            for &l in &alphabet {
                if w.last() != Some(l.inverse()) {
                    next.push(w.push(l));
                }
            }
        }
        cur = next;
    }
    cur
}
