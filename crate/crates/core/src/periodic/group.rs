use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

/// A finitely generated group with decidable equality.
///
/// Implement this for other carriers to unfold their voltage graphs.
pub trait Group: Clone + Debug + PartialEq {
    type Element: Clone + Eq + Ord + Hash + Debug;

    fn identity(&self) -> Self::Element;
    fn compose(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Self::Element;
    /// Rejects elements that do not belong to this group.
    fn validate(&self, a: &Self::Element) -> Result<()>;
    /// Whitespace-free text form, inverted by [`Group::parse`].
    fn format(&self, a: &Self::Element) -> String;
    fn parse(&self, s: &str) -> Result<Self::Element>;

    fn is_identity(&self, a: &Self::Element) -> bool {
        *a == self.identity()
    }
}

/// The free abelian group `Z^d`; elements are integer vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zd {
    pub dim: usize,
}

impl Zd {
    pub fn unit(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }
}

impl Group for Zd {
    type Element = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.dim]
    }

    fn compose(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inverse(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn validate(&self, a: &Vec<i64>) -> Result<()> {
        if a.len() == self.dim {
            Ok(())
        } else {
            Err(Error::Voltage(format!(
                "label {a:?} is not in Z^{}",
                self.dim
            )))
        }
    }

    fn format(&self, a: &Vec<i64>) -> String {
        a.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
    }

    fn parse(&self, s: &str) -> Result<Vec<i64>> {
        let v = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad Z^d element {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.validate(&v)?;
        Ok(v)
    }
}

/// A letter of a free-group word: `+(k+1)` is generator `k`, `-(k+1)` its
/// inverse.
pub type Letter = i8;

/// Free group on `rank` generators written `a, b, c, ...`; upper case
/// letters denote inverses and `1` the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Free {
    pub rank: usize,
}

/// A reduced word in a free group.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeWord(pub Vec<Letter>);

impl FreeWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn generator(k: usize) -> Self {
        FreeWord(vec![k as Letter + 1])
    }
}

impl Free {
    pub const MAX_RANK: usize = 26;

    pub fn generator(&self, k: usize) -> FreeWord {
        FreeWord::generator(k)
    }
}

impl Group for Free {
    type Element = FreeWord;

    fn identity(&self) -> FreeWord {
        FreeWord::default()
    }

    fn compose(&self, a: &FreeWord, b: &FreeWord) -> FreeWord {
        let mut out = a.0.clone();
        for &l in &b.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    fn inverse(&self, a: &FreeWord) -> FreeWord {
        FreeWord(a.0.iter().rev().map(|l| -l).collect())
    }

    fn validate(&self, a: &FreeWord) -> Result<()> {
        let ok_letters =
            a.0.iter()
                .all(|&l| l != 0 && (l.unsigned_abs() as usize) <= self.rank);
        let reduced = a.0.windows(2).all(|w| w[0] != -w[1]);
        if ok_letters && reduced {
            Ok(())
        } else {
            Err(Error::Voltage(format!(
                "{a:?} is not a reduced word of rank {}",
                self.rank
            )))
        }
    }

    fn format(&self, a: &FreeWord) -> String {
        if a.is_empty() {
            return "1".into();
        }
        a.0.iter()
            .map(|&l| {
                let c = (b'a' + l.unsigned_abs() - 1) as char;
                if l > 0 {
                    c
                } else {
                    c.to_ascii_uppercase()
                }
            })
            .collect()
    }

    /// Reads a word and reduces it.
    fn parse(&self, s: &str) -> Result<FreeWord> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(self.identity());
        }
        let mut word = self.identity();
        for c in s.chars() {
            if !c.is_ascii_alphabetic() {
                return Err(Error::Parse(format!("bad free-group word {s:?}")));
            }
            let k = (c.to_ascii_lowercase() as u8 - b'a') as Letter + 1;
            let l = if c.is_ascii_lowercase() { k } else { -k };
            word = self.compose(&word, &FreeWord(vec![l]));
        }
        self.validate(&word)?;
        Ok(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_words_reduce() {
        let f = Free { rank: 2 };
        let w = f.parse("abBA").unwrap();
        assert!(w.is_empty());
        let ab = f.parse("ab").unwrap();
        assert_eq!(f.format(&f.inverse(&ab)), "BA");
        assert_eq!(f.compose(&ab, &f.inverse(&ab)), f.identity());
        assert!(f.parse("c").is_err());
        assert_eq!(f.format(&f.identity()), "1");
    }

    #[test]
    fn zd_arithmetic() {
        let z = Zd { dim: 2 };
        let a = z.parse("1,-2").unwrap();
        assert_eq!(z.compose(&a, &z.inverse(&a)), z.identity());
        assert_eq!(z.format(&a), "1,-2");
        assert!(z.parse("1").is_err());
    }
}
