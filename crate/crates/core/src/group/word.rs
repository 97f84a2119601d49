//! Freely reduced words. Generators are single lowercase letters; the
//! uppercase letter is the formal inverse.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(char);

impl Letter {
    pub fn new(c: char) -> Option<Letter> {
        c.is_ascii_alphabetic().then_some(Letter(c))
    }

    pub fn generator(label: char) -> Letter {
        assert!(label.is_ascii_lowercase());
        Letter(label)
    }

    pub fn label(self) -> char {
        self.0.to_ascii_lowercase()
    }

    pub fn is_inverse(self) -> bool {
        self.0.is_ascii_uppercase()
    }

    pub fn inverse(self) -> Letter {
        if self.is_inverse() {
            Letter(self.0.to_ascii_lowercase())
        } else {
            Letter(self.0.to_ascii_uppercase())
        }
    }

    pub fn as_char(self) -> char {
        self.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Freely reduces the given letters.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(o.0.iter()).copied())
    }

    pub fn pow(&self, k: u32) -> Word {
        let mut acc = Word::identity();
        for _ in 0..k {
            acc = acc.concat(self);
        }
        acc
    }

    /// Appends a letter; the caller guarantees the result stays reduced.
    pub fn push(&self, l: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(l);
        Word(v)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts "abA" and primed inverses "ab a'"; whitespace and "e" (empty word) are ignored.
    fn from_str(s: &str) -> Result<Word, Error> {
        let mut letters: Vec<Letter> = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            if c.is_whitespace() || (c == 'e' && s.trim() == "e") {
                continue;
            }
            let mut l = Letter::new(c).ok_or_else(|| Error::Schema(format!("bad letter {c:?} in word {s:?}")))?;
            if chars.peek() == Some(&'\'') {
                chars.next();
                l = l.inverse();
            }
            letters.push(l);
        }
        Ok(Word::from_letters(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for l in &self.0 {
            write!(f, "{}", l.0)?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text: String = self.0.iter().map(|l| l.0).collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let w: Word = s.parse().map_err(serde::de::Error::custom)?;
        if w.len() != s.chars().filter(|c| !c.is_whitespace()).count() {
            return Err(serde::de::Error::custom(format!("word {s:?} is not freely reduced")));
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing_and_reduction() {
        let w: Word = "abBa".parse().unwrap();
        assert_eq!(w.to_string(), "aa");
        let p: Word = "a'b".parse().unwrap();
        assert_eq!(p.to_string(), "Ab");
        assert_eq!("e".parse::<Word>().unwrap(), Word::identity());
        assert_eq!(w.inverse().to_string(), "AA");
        assert!("a1".parse::<Word>().is_err());
        assert!(serde_json::from_str::<Word>("\"aA\"").is_err());
    }
}
