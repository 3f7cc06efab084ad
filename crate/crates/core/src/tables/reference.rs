use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CandidateRow;
use crate::criterion::CriterionSet;
use crate::error::{Error, Result};
use crate::escalation::EscalationResult;
use crate::polygonal::CoeffVector;

pub const TABLE_IDS: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

const RAW: [&str; 8] = [
    include_str!("../../data/table1.json"),
    include_str!("../../data/table2.json"),
    include_str!("../../data/table3.json"),
    include_str!("../../data/table4.json"),
    include_str!("../../data/table5.json"),
    include_str!("../../data/table6.json"),
    include_str!("../../data/table7.json"),
    include_str!("../../data/table8.json"),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub id: u32,
    pub caption: String,
    #[serde(flatten)]
    pub data: ReferenceData,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceData {
    Gamma {
        entries: Vec<GammaEntry>,
    },
    CriterionSets {
        entries: Vec<CsEntry>,
    },
    Candidates {
        m: u64,
        n: u64,
        rows: Vec<CandidateRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub m: u64,
    pub gamma: u64,
    /// The universal forms for this `m` are completely classified.
    pub proved: bool,
}

/// A parameter range in the criterion-set table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Span {
    Exact(u64),
    Between(u64, u64),
    AtLeast(u64),
    /// `n >= 2m - c`.
    #[serde(rename = "at_least_2m_minus")]
    AtLeastTwiceMMinus(u64),
}

impl Span {
    fn contains(self, x: u64, m: u64) -> bool {
        match self {
            Span::Exact(a) => x == a,
            Span::Between(lo, hi) => (lo..=hi).contains(&x),
            Span::AtLeast(lo) => x >= lo,
            Span::AtLeastTwiceMMinus(c) => x + c >= 2 * m,
        }
    }

    /// Smallest value in the span (for `m` given).
    pub fn least(self, m: u64) -> u64 {
        match self {
            Span::Exact(a) | Span::Between(a, _) | Span::AtLeast(a) => a,
            Span::AtLeastTwiceMMinus(c) => (2 * m).saturating_sub(c).max(1),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Span::Exact(a) => write!(f, "{a}"),
            Span::Between(lo, hi) => write!(f, "{lo}..{hi}"),
            Span::AtLeast(lo) => write!(f, "≥{lo}"),
            Span::AtLeastTwiceMMinus(c) => write!(f, "≥2m-{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsEntry {
    pub m: Span,
    pub n: Span,
    /// Explicit elements, or
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cs: Option<Vec<u64>>,
    /// `{n, n + 1, ..., 2n - c}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub through_2n_minus: Option<u64>,
    pub proved: bool,
}

impl CsEntry {
    pub fn covers(&self, m: u64, n: u64) -> bool {
        self.m.contains(m, m) && self.n.contains(n, m)
    }

    pub fn expected(&self, n: u64) -> Vec<u64> {
        match (&self.cs, self.through_2n_minus) {
            (Some(cs), _) => cs.clone(),
            (None, Some(c)) => (n..=2 * n - c).collect(),
            (None, None) => Vec::new(),
        }
    }
}

impl ReferenceTable {
    pub fn load(id: u32) -> Result<Self> {
        let raw = id
            .checked_sub(1)
            .and_then(|i| RAW.get(i as usize))
            .ok_or(Error::UnknownTable(id))?;
        let table: ReferenceTable = serde_json::from_str(raw)?;
        if let ReferenceData::Candidates { rows, .. } = &table.data {
            rows.iter().try_for_each(CandidateRow::validate)?;
        }
        Ok(table)
    }

    /// `(m, n)` for candidate tables.
    pub fn pair(&self) -> Option<(u64, u64)> {
        match self.data {
            ReferenceData::Candidates { m, n, .. } => Some((m, n)),
            _ => None,
        }
    }

    /// Representative pairs whose criterion sets this table pins down: every
    /// explicit row, plus the smallest `(m, n)` of each parametric row.
    pub fn representative_pairs(&self) -> Vec<(u64, u64)> {
        match &self.data {
            ReferenceData::Gamma { entries } => entries.iter().map(|e| (e.m, 1)).collect(),
            ReferenceData::CriterionSets { entries } => entries
                .iter()
                .map(|e| {
                    let m = e.m.least(0);
                    (m, e.n.least(m))
                })
                .collect(),
            ReferenceData::Candidates { m, n, .. } => vec![(*m, *n)],
        }
    }
}

/// Whether the criterion set for `(m, n)` is backed by a complete
/// classification, as opposed to a bounded computation only.
pub fn is_classified(m: u64, n: u64) -> bool {
    let Ok(table) = ReferenceTable::load(4) else {
        return false;
    };
    match table.data {
        ReferenceData::CriterionSets { entries } => {
            entries.iter().any(|e| e.covers(m, n) && e.proved)
        }
        _ => false,
    }
}

/// Computed data to compare against a reference table.
#[derive(Clone, Copy, Debug)]
pub enum Computed<'a> {
    /// `m -> γ(m, 1)`.
    Gammas(&'a BTreeMap<u64, u64>),
    Criteria(&'a [CriterionSet]),
    Candidates(&'a EscalationResult),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowStatus {
    Match,
    Mismatch {
        expected: String,
        actual: String,
    },
    /// Reference row with no computed counterpart.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDiff {
    pub label: String,
    #[serde(flatten)]
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    pub table: u32,
    pub rows: Vec<RowDiff>,
}

impl DiffReport {
    pub fn compared(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status != RowStatus::Skipped)
            .count()
    }

    pub fn mismatches(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.status, RowStatus::Mismatch { .. }))
            .count()
    }

    pub fn skipped(&self) -> usize {
        self.rows.len() - self.compared()
    }

    pub fn is_exact(&self) -> bool {
        self.mismatches() == 0 && self.compared() > 0
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "table {}: {} rows, {} mismatches",
            self.table,
            self.compared(),
            self.mismatches()
        );
        if self.skipped() > 0 {
            s.push_str(&format!(" ({} skipped)", self.skipped()));
        }
        s
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            match &row.status {
                RowStatus::Match => writeln!(f, "  ok        {}", row.label)?,
                RowStatus::Skipped => writeln!(f, "  skipped   {}", row.label)?,
                RowStatus::Mismatch { expected, actual } => writeln!(
                    f,
                    "  MISMATCH  {}\n            expected {expected}\n            actual   {actual}",
                    row.label
                )?,
            }
        }
        write!(f, "{}", self.summary())
    }
}

/// Compares computed results with bundled table `table_id`.
///
/// Candidate tables are compared as sets: each row's shared prefix against
/// the set of last coefficients actually found, so differences in how a
/// condition is written do not count.
pub fn diff_reference(computed: Computed<'_>, table_id: u32) -> Result<DiffReport> {
    let table = ReferenceTable::load(table_id)?;
    let rows = match (&table.data, computed) {
        (ReferenceData::Gamma { entries }, Computed::Gammas(gammas)) => {
            diff_gammas(entries, gammas)
        }
        (ReferenceData::CriterionSets { entries }, Computed::Criteria(sets)) => {
            diff_criteria(entries, sets)
        }
        (ReferenceData::Candidates { m, n, rows }, Computed::Candidates(run)) => {
            if (run.m, run.n) != (*m, *n) {
                return Err(Error::InvalidParameter(format!(
                    "table {table_id} lists (m, n) = ({m}, {n}), run has ({}, {})",
                    run.m, run.n
                )));
            }
            diff_candidates(rows, run.new_universal())
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "computed data does not fit table {table_id}"
            )))
        }
    };
    Ok(DiffReport {
        table: table_id,
        rows,
    })
}

fn diff_gammas(entries: &[GammaEntry], gammas: &BTreeMap<u64, u64>) -> Vec<RowDiff> {
    let mut rows: Vec<RowDiff> = entries
        .iter()
        .map(|e| RowDiff {
            label: format!("m={}", e.m),
            status: match gammas.get(&e.m) {
                None => RowStatus::Skipped,
                Some(&g) if g == e.gamma => RowStatus::Match,
                Some(&g) => RowStatus::Mismatch {
                    expected: e.gamma.to_string(),
                    actual: g.to_string(),
                },
            },
        })
        .collect();
    for (&m, &g) in gammas {
        if !entries.iter().any(|e| e.m == m) {
            rows.push(RowDiff {
                label: format!("m={m}"),
                status: RowStatus::Mismatch {
                    expected: "no entry".into(),
                    actual: g.to_string(),
                },
            });
        }
    }
    rows
}

fn diff_criteria(entries: &[CsEntry], sets: &[CriterionSet]) -> Vec<RowDiff> {
    let mut sets: Vec<&CriterionSet> = sets.iter().collect();
    sets.sort_by_key(|cs| (cs.m, cs.n));
    sets.iter()
        .map(|cs| {
            let label = format!("m={} n={}", cs.m, cs.n);
            let status = match entries.iter().find(|e| e.covers(cs.m, cs.n)) {
                None => RowStatus::Mismatch {
                    expected: "no entry".into(),
                    actual: fmt_set(&cs.elements),
                },
                Some(e) if e.expected(cs.n) == cs.elements => RowStatus::Match,
                Some(e) => RowStatus::Mismatch {
                    expected: fmt_set(&e.expected(cs.n)),
                    actual: fmt_set(&cs.elements),
                },
            };
            RowDiff { label, status }
        })
        .collect()
}

fn diff_candidates<'a>(
    reference: &[CandidateRow],
    found: impl Iterator<Item = &'a CoeffVector>,
) -> Vec<RowDiff> {
    let mut actual: BTreeMap<CoeffVector, BTreeSet<u64>> = BTreeMap::new();
    for v in found {
        if let Some(last) = v.last() {
            actual.entry(v.prefix()).or_default().insert(last);
        }
    }
    let mut rows = Vec::new();
    for row in reference {
        let (key, expected) = row.key_and_lasts();
        let got = actual.remove(&key).unwrap_or_default();
        let status = if got == expected {
            RowStatus::Match
        } else {
            RowStatus::Mismatch {
                expected: fmt_set(&expected.iter().copied().collect::<Vec<_>>()),
                actual: fmt_set(&got.iter().copied().collect::<Vec<_>>()),
            }
        };
        rows.push(RowDiff {
            label: row.to_string(),
            status,
        });
    }
    for (key, got) in actual {
        rows.push(RowDiff {
            label: format!("{key} + a_k (unlisted)"),
            status: RowStatus::Mismatch {
                expected: "{}".into(),
                actual: fmt_set(&got.into_iter().collect::<Vec<_>>()),
            },
        });
    }
    rows
}

fn fmt_set(xs: &[u64]) -> String {
    let inner: Vec<String> = xs.iter().map(u64::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_tables_load() {
        for id in TABLE_IDS {
            let t = ReferenceTable::load(id).unwrap();
            assert_eq!(t.id, id);
        }
        assert!(matches!(
            ReferenceTable::load(0),
            Err(Error::UnknownTable(0))
        ));
        assert!(matches!(
            ReferenceTable::load(9),
            Err(Error::UnknownTable(9))
        ));
    }

    #[test]
    fn candidate_table_sizes() {
        let count = |id| match ReferenceTable::load(id).unwrap().data {
            ReferenceData::Candidates { rows, .. } => super::super::expand(&rows).len(),
            _ => unreachable!(),
        };
        // row-by-row sums of the transcribed conditions
        assert_eq!(count(2), 254);
        assert_eq!(count(3), 116);
        assert_eq!(count(5), 242);
    }

    #[test]
    fn cs_entries_cover_parametric_rows() {
        let table = ReferenceTable::load(4).unwrap();
        let ReferenceData::CriterionSets { entries } = &table.data else {
            panic!()
        };
        let find = |m, n| {
            entries
                .iter()
                .find(|e| e.covers(m, n))
                .map(|e| e.expected(n))
        };
        assert_eq!(find(4, 5), Some(vec![5, 6, 7, 8, 9, 10]));
        assert_eq!(find(4, 7), Some((7..=14).collect()));
        assert_eq!(find(5, 4), Some(vec![4, 5, 6, 7]));
        assert_eq!(
            find(9, 4),
            Some(vec![4, 5, 6, 7, 8, 23, 25, 27, 28, 32, 33])
        );
        assert_eq!(find(12, 19), Some((19..=38).collect()));
        assert_eq!(find(12, 18), None);
        assert_eq!(find(6, 1), None);
    }

    #[test]
    fn classified_pairs() {
        assert!(is_classified(3, 1));
        assert!(is_classified(4, 9));
        assert!(!is_classified(7, 1));
        assert!(!is_classified(5, 2));
        assert!(is_classified(10, 15));
        assert!(!is_classified(10, 14));
    }

    #[test]
    fn gamma_diff_with_subset() {
        let gammas = BTreeMap::from([(3, 8), (4, 15), (8, 60)]);
        let report = diff_reference(Computed::Gammas(&gammas), 1).unwrap();
        assert!(report.is_exact());
        assert_eq!(report.compared(), 3);
        assert_eq!(report.skipped(), 5);

        let wrong = BTreeMap::from([(3, 9)]);
        let report = diff_reference(Computed::Gammas(&wrong), 1).unwrap();
        assert_eq!(report.mismatches(), 1);
    }

    #[test]
    fn mismatched_kind_is_an_error() {
        let gammas = BTreeMap::new();
        assert!(diff_reference(Computed::Gammas(&gammas), 2).is_err());
        assert!(matches!(
            diff_reference(Computed::Gammas(&gammas), 12),
            Err(Error::UnknownTable(12))
        ));
    }
}
