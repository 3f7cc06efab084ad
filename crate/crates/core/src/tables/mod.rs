//! Candidate rows in the published "conditions on a_k" layout, bundled
//! reference tables, golden diffs and serialization.

mod emit;
mod reference;

pub use emit::{emit, parse_json, Emit, Format, GammaTable, JSON_SCHEMA_VERSION};
pub use reference::{
    diff_reference, is_classified, Computed, CsEntry, DiffReport, GammaEntry, ReferenceData,
    ReferenceTable, RowDiff, RowStatus, Span, TABLE_IDS,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygonal::CoeffVector;

/// A group of candidate vectors sharing every coefficient but the last.
///
/// With no condition the row is the single vector `prefix`. Otherwise the
/// last coefficient ranges over `values ∪ ([lo, hi] − except)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub prefix: CoeffVector,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(u64, u64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub except: Vec<u64>,
}

impl CandidateRow {
    pub fn fixed(vector: CoeffVector) -> Self {
        CandidateRow {
            prefix: vector,
            values: Vec::new(),
            range: None,
            except: Vec::new(),
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.values.is_empty() && self.range.is_none()
    }

    /// Position `k` of the varying coefficient (the full length for fixed rows).
    pub fn free_len(&self) -> usize {
        if self.is_fixed() {
            self.prefix.len()
        } else {
            self.prefix.len() + 1
        }
    }

    /// The shared leading coefficients and the set of last coefficients.
    pub fn key_and_lasts(&self) -> (CoeffVector, BTreeSet<u64>) {
        if self.is_fixed() {
            let last = self.prefix.last().into_iter().collect();
            return (self.prefix.prefix(), last);
        }
        let mut lasts: BTreeSet<u64> = self.values.iter().copied().collect();
        if let Some((lo, hi)) = self.range {
            lasts.extend((lo..=hi).filter(|x| !self.except.contains(x)));
        }
        (self.prefix.clone(), lasts)
    }

    pub fn expand(&self) -> Vec<CoeffVector> {
        if self.is_fixed() {
            return vec![self.prefix.clone()];
        }
        let (prefix, lasts) = self.key_and_lasts();
        lasts.into_iter().map(|a| prefix.insert(a)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::Parse(format!("row {}: {why}", self.prefix)));
        if let Some((lo, hi)) = self.range {
            if lo > hi {
                return bad("empty range");
            }
            if !self.except.windows(2).all(|w| w[0] < w[1]) {
                return bad("exceptions not strictly ascending");
            }
            if self.except.iter().any(|&x| x <= lo || x >= hi) {
                return bad("exception outside the open range");
            }
        } else if !self.except.is_empty() {
            return bad("exceptions without a range");
        }
        if !self.values.windows(2).all(|w| w[0] < w[1]) {
            return bad("values not strictly ascending");
        }
        let last = self.prefix.last().unwrap_or(0);
        if !self.is_fixed() && self.key_and_lasts().1.iter().any(|&a| a < last) {
            return bad("last coefficient below the prefix");
        }
        Ok(())
    }

    /// The condition column, e.g. `6≤a3≤9, a3≠8` or `a5=6 or 11≤a5≤16`.
    pub fn condition_text(&self) -> String {
        if self.is_fixed() {
            return String::new();
        }
        let var = format!("a{}", self.free_len());
        let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let mut parts = Vec::new();
        if !self.values.is_empty() {
            parts.push(format!("{var}={}", join(&self.values)));
        }
        if let Some((lo, hi)) = self.range {
            let mut s = format!("{lo}≤{var}≤{hi}");
            if !self.except.is_empty() {
                s.push_str(&format!(", {var}≠{}", join(&self.except)));
            }
            parts.push(s);
        }
        parts.join(" or ")
    }
}

impl fmt::Display for CandidateRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.prefix.as_slice().iter().map(u64::to_string).collect();
        write!(f, "{}", coeffs.join(" "))?;
        if !self.is_fixed() {
            write!(f, " a{}: {}", self.free_len(), self.condition_text())?;
        }
        Ok(())
    }
}

/// Groups vectors by everything but their last coefficient and encodes each
/// group as compactly as the row shapes allow. Rows come out ordered by
/// length, then prefix.
pub fn compress<'a, I: IntoIterator<Item = &'a CoeffVector>>(vectors: I) -> Vec<CandidateRow> {
    let mut groups: BTreeMap<(usize, CoeffVector), BTreeSet<u64>> = BTreeMap::new();
    for v in vectors {
        let Some(last) = v.last() else { continue };
        groups
            .entry((v.len(), v.prefix()))
            .or_default()
            .insert(last);
    }
    groups
        .into_iter()
        .map(|((_, prefix), lasts)| encode_group(prefix, &lasts.into_iter().collect::<Vec<_>>()))
        .collect()
}

fn encode_group(prefix: CoeffVector, lasts: &[u64]) -> CandidateRow {
    if let [only] = lasts {
        return CandidateRow::fixed(prefix.insert(*only));
    }
    let (lo, hi) = (lasts[0], lasts[lasts.len() - 1]);
    let except: Vec<u64> = (lo..=hi)
        .filter(|x| lasts.binary_search(x).is_err())
        .collect();
    let ranged = CandidateRow {
        prefix: prefix.clone(),
        values: Vec::new(),
        range: Some((lo, hi)),
        except,
    };
    let listed = CandidateRow {
        prefix: prefix.clone(),
        values: lasts.to_vec(),
        range: None,
        except: Vec::new(),
    };
    let mut best = (cost(&ranged), ranged);
    if cost(&listed) < best.0 {
        best = (cost(&listed), listed);
    }
    // isolated values plus the longest consecutive run
    let (start, len) = longest_run(lasts);
    if len >= 3 {
        let run = (lasts[start], lasts[start + len - 1]);
        let mut values = lasts[..start].to_vec();
        values.extend_from_slice(&lasts[start + len..]);
        let mixed = CandidateRow {
            prefix,
            values,
            range: Some(run),
            except: Vec::new(),
        };
        if cost(&mixed) < best.0 {
            best = (cost(&mixed), mixed);
        }
    }
    best.1
}

fn cost(row: &CandidateRow) -> usize {
    row.values.len() + row.except.len() + if row.range.is_some() { 2 } else { 0 }
}

fn longest_run(sorted: &[u64]) -> (usize, usize) {
    let mut best = (0, 1);
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] != sorted[i - 1] + 1 {
            if i - start > best.1 {
                best = (start, i - start);
            }
            start = i;
        }
    }
    best
}

/// Every vector encoded by `rows`.
pub fn expand(rows: &[CandidateRow]) -> BTreeSet<CoeffVector> {
    rows.iter().flat_map(CandidateRow::expand).collect()
}
