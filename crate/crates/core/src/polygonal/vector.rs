use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted multiset of positive coefficients `a_1 <= a_2 <= ... <= a_k`.
///
/// The derived ordering is lexicographic on the sorted coefficients, which is
/// the canonical order used for every level set and serialized listing.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CoeffVector(Vec<u64>);

impl CoeffVector {
    /// Builds a vector from coefficients in any order.
    pub fn new(mut coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.contains(&0) {
            return Err(Error::ZeroCoefficient);
        }
        coeffs.sort_unstable();
        Ok(CoeffVector(coeffs))
    }

    pub fn single(a: u64) -> Result<Self> {
        Self::new(vec![a])
    }

    pub fn empty() -> Self {
        CoeffVector(Vec::new())
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u64> {
        self.0.first().copied()
    }

    /// `a * g`: insert `g` after the last coefficient `<= g`.
    pub fn insert(&self, g: u64) -> Self {
        assert!(g > 0, "coefficients must be positive");
        let at = self.0.partition_point(|&a| a <= g);
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.extend_from_slice(&self.0[..at]);
        out.push(g);
        out.extend_from_slice(&self.0[at..]);
        CoeffVector(out)
    }

    /// `a * b`: the multiset union.
    pub fn merge(&self, other: &CoeffVector) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        out.sort_unstable();
        CoeffVector(out)
    }

    /// `c * a`: every coefficient multiplied by `c`.
    pub fn scaled(&self, c: u64) -> Self {
        assert!(c > 0);
        CoeffVector(self.0.iter().map(|&a| a * c).collect())
    }

    /// True when `self` is a sub-multiset of `other` (`self ≼ other`).
    pub fn is_submultiset_of(&self, other: &CoeffVector) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut rest = other.0.iter();
        'outer: for &a in &self.0 {
            for &b in rest.by_ref() {
                if b == a {
                    continue 'outer;
                }
                if b > a {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// True when `self` is a proper sub-multiset of `other` (`self ≺ other`).
    pub fn is_proper_submultiset_of(&self, other: &CoeffVector) -> bool {
        self.len() < other.len() && self.is_submultiset_of(other)
    }

    /// The distinct sub-multisets obtained by dropping one coefficient.
    pub fn drop_one(&self) -> Vec<CoeffVector> {
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            if i > 0 && self.0[i] == self.0[i - 1] {
                continue;
            }
            let mut v = self.0.clone();
            v.remove(i);
            out.push(CoeffVector(v));
        }
        out
    }

    /// All coefficients but the last.
    pub fn prefix(&self) -> CoeffVector {
        CoeffVector(self.0[..self.0.len().saturating_sub(1)].to_vec())
    }

    pub fn last(&self) -> Option<u64> {
        self.0.last().copied()
    }
}

impl TryFrom<Vec<u64>> for CoeffVector {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        CoeffVector::new(v)
    }
}

impl From<CoeffVector> for Vec<u64> {
    fn from(v: CoeffVector) -> Self {
        v.0
    }
}

impl fmt::Display for CoeffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Parses `1,2,3`, `(1,2,3)` or `1 2 3`.
impl FromStr for CoeffVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coeffs = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::EmptyVector);
        }
        CoeffVector::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[u64]) -> CoeffVector {
        CoeffVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn star_insertion() {
        // 3*7*2*5 = (2,3,5,7)
        let a = v(&[3]).insert(7).insert(2).insert(5);
        assert_eq!(a.as_slice(), &[2, 3, 5, 7]);
        assert_eq!(v(&[2, 3]).insert(3).as_slice(), &[2, 3, 3]);
        assert_eq!(v(&[2, 2, 3]), v(&[2, 3]).insert(2));
        assert_eq!(v(&[2, 2, 3]), v(&[2, 2]).insert(3));
    }

    #[test]
    fn zero_rejected() {
        assert!(matches!(
            CoeffVector::new(vec![1, 0]),
            Err(Error::ZeroCoefficient)
        ));
    }

    #[test]
    fn submultiset() {
        assert!(v(&[1, 2]).is_submultiset_of(&v(&[1, 1, 2])));
        assert!(v(&[1, 1]).is_proper_submultiset_of(&v(&[1, 1, 2])));
        assert!(!v(&[1, 1, 1]).is_submultiset_of(&v(&[1, 1, 2])));
        assert!(!v(&[3]).is_submultiset_of(&v(&[1, 2])));
        assert!(v(&[1, 2]).is_submultiset_of(&v(&[1, 2])));
        assert!(!v(&[1, 2]).is_proper_submultiset_of(&v(&[1, 2])));
        assert!(CoeffVector::empty().is_submultiset_of(&v(&[4])));
    }

    #[test]
    fn drop_one_is_distinct() {
        let subs = v(&[1, 1, 2, 2, 3]).drop_one();
        assert_eq!(
            subs,
            vec![v(&[1, 2, 2, 3]), v(&[1, 1, 2, 3]), v(&[1, 1, 2, 2])]
        );
    }

    #[test]
    fn parse_and_display() {
        let a: CoeffVector = "3,1,2".parse().unwrap();
        assert_eq!(a.to_string(), "(1,2,3)");
        assert_eq!("(1, 2, 3)".parse::<CoeffVector>().unwrap(), a);
        assert!("".parse::<CoeffVector>().is_err());
        assert!("1,x".parse::<CoeffVector>().is_err());
    }

    #[test]
    fn serde_as_array() {
        let a = v(&[2, 3, 3]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[2,3,3]");
        let back: CoeffVector = serde_json::from_str("[3,2,3]").unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<CoeffVector>("[0]").is_err());
    }
}
