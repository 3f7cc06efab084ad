//! Criterion sets `CS(m, n)` and their witnesses.
//!
//! A form that represents nothing in `[1, n - 1]` and every element of
//! `CS(m, n)` is tight `T(n)`-universal. Each element `g` is necessary:
//! [`minimality_witness`] builds a form missing exactly `g`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escalation::EscalationResult;
use crate::polygonal::{repr_set, CoeffVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionSet {
    pub m: u64,
    pub n: u64,
    /// Ascending; the first element is `n`.
    #[serde(rename = "cs")]
    pub elements: Vec<u64>,
    pub gamma: u64,
    pub bound: u64,
    /// For each element other than `n`, the shortest (then lexicographically
    /// smallest) active vector with that truant.
    pub provenance: BTreeMap<u64, CoeffVector>,
}

impl CriterionSet {
    pub fn contains(&self, g: u64) -> bool {
        self.elements.binary_search(&g).is_ok()
    }
}

/// `{n}` together with the truants of every active vector of a finished run.
pub fn criterion_set(run: &EscalationResult) -> Result<CriterionSet> {
    if !run.terminated() {
        return Err(Error::Unterminated { m: run.m, n: run.n });
    }
    let mut provenance = BTreeMap::new();
    // Levels run shortest first and nodes are canonical within a level, so
    // the first vector seen for a truant is the preferred one.
    for level in &run.levels {
        for node in level.active() {
            if let Some(t) = node.truant.finite() {
                provenance.entry(t).or_insert_with(|| node.vector.clone());
            }
        }
    }
    let mut elements: Vec<u64> = provenance.keys().copied().collect();
    elements.push(run.n);
    elements.sort_unstable();
    elements.dedup();
    provenance.remove(&run.n);
    let gamma = *elements.last().expect("n is always present");
    Ok(CriterionSet {
        m: run.m,
        n: run.n,
        bound: run.bound,
        elements,
        gamma,
        provenance,
    })
}

pub fn gamma(cs: &CriterionSet) -> u64 {
    cs.elements.iter().copied().max().unwrap_or(cs.n)
}

/// `m` copies of `n` followed by `n + 1, ..., 2n - 1`.
///
/// The first `m` coefficients represent exactly the multiples of `n` (every
/// non-negative integer is a sum of `m` m-gonal numbers); the tail fills in
/// the other residues, so the form is tight `T(n)`-universal.
pub fn fermat_witness(m: u64, n: u64) -> CoeffVector {
    assert!(m >= 3 && n >= 1);
    let mut coeffs = vec![n; m as usize];
    coeffs.extend(n + 1..2 * n);
    CoeffVector::new(coeffs).expect("positive coefficients")
}

/// A form whose nonzero values in `[1, bound]` are exactly `[n, bound]`
/// without `g`, verified at `bound` before it is returned.
///
/// For `g = n` this is the witness for `T(n + 1)`; otherwise it joins the
/// provenance vector (truant `g`) with the witness for `T(g + 1)`.
pub fn minimality_witness(
    m: u64,
    n: u64,
    g: u64,
    cs: &CriterionSet,
    bound: u64,
) -> Result<CoeffVector> {
    if !cs.contains(g) {
        return Err(Error::NotACriterion { g });
    }
    let tail = fermat_witness(m, g + 1);
    let b = if g == n {
        tail
    } else {
        let c = cs.provenance.get(&g).ok_or(Error::NotACriterion { g })?;
        c.merge(&tail)
    };
    verify_misses_exactly(m, n, g, &b, bound)?;
    Ok(b)
}

fn verify_misses_exactly(m: u64, n: u64, g: u64, b: &CoeffVector, bound: u64) -> Result<()> {
    let fail = |detail: String| Error::WitnessFailed {
        vector: b.to_string(),
        bound,
        detail,
    };
    let r = repr_set(m, b, bound)?;
    if n > 1 {
        if let Some(x) = r.first_member(1, n - 1) {
            return Err(fail(format!("represents {x} < n")));
        }
    }
    let missed = r.missing(n, bound);
    let expected: Vec<u64> = if g <= bound { vec![g] } else { Vec::new() };
    if missed != expected {
        let shown: Vec<u64> = missed.into_iter().take(10).collect();
        return Err(fail(format!("misses {shown:?}, expected {expected:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::escalation::{is_tight_universal, run_escalation, truant, Truant};

    fn v(c: &[u64]) -> CoeffVector {
        CoeffVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn fermat_witness_shapes() {
        assert_eq!(fermat_witness(3, 2), v(&[2, 2, 2, 3]));
        assert_eq!(fermat_witness(5, 1), v(&[1, 1, 1, 1, 1]));
        let w = fermat_witness(4, 3);
        assert_eq!(w, v(&[3, 3, 3, 3, 4, 5]));
        assert!(is_tight_universal(4, 3, &w, 10_000).unwrap());
    }

    #[test]
    fn cs_of_triangular_and_squares() {
        let cs = criterion_set(&run_escalation(3, 1, 10_000, 18).unwrap()).unwrap();
        assert_eq!(cs.elements, vec![1, 2, 4, 5, 8]);
        assert_eq!(gamma(&cs), 8);
        assert_eq!(cs.gamma, 8);
        let cs = criterion_set(&run_escalation(4, 1, 10_000, 18).unwrap()).unwrap();
        assert_eq!(cs.elements, vec![1, 2, 3, 5, 6, 7, 10, 14, 15]);
        assert_eq!(cs.gamma, 15);
    }

    #[test]
    fn provenance_truants_match_elements() {
        let cs = criterion_set(&run_escalation(4, 2, 10_000, 20).unwrap()).unwrap();
        assert!(!cs.provenance.contains_key(&2));
        for (&g, c) in &cs.provenance {
            assert_eq!(truant(4, 2, c, 10_000).unwrap(), Truant::Finite(g), "{c}");
        }
        assert_eq!(cs.provenance.len() + 1, cs.elements.len());
    }

    #[test]
    fn unterminated_run_is_refused() {
        let mut run = run_escalation(3, 1, 10_000, 18).unwrap();
        run.terminal_depth = None;
        assert!(matches!(
            criterion_set(&run),
            Err(Error::Unterminated { .. })
        ));
    }

    #[test]
    fn witnesses_for_heptagonal_n2() {
        let cs = criterion_set(&run_escalation(7, 2, 10_000, 20).unwrap()).unwrap();
        assert_eq!(cs.provenance[&3], v(&[2]));
        let b = minimality_witness(7, 2, 3, &cs, 10_000).unwrap();
        assert_eq!(b, v(&[2]).merge(&fermat_witness(7, 4)));
        let b = minimality_witness(7, 2, 2, &cs, 10_000).unwrap();
        assert_eq!(b, fermat_witness(7, 3));
        assert!(matches!(
            minimality_witness(7, 2, 5, &cs, 10_000),
            Err(Error::NotACriterion { g: 5 })
        ));
    }

    #[test]
    fn witness_failure_reported_on_bad_provenance() {
        let mut cs = criterion_set(&run_escalation(3, 1, 10_000, 18).unwrap()).unwrap();
        cs.provenance.insert(8, v(&[1]));
        assert!(matches!(
            minimality_witness(3, 1, 8, &cs, 10_000),
            Err(Error::WitnessFailed { .. })
        ));
    }
}
