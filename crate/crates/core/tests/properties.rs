use std::collections::BTreeSet;

use gonal_core::tables::{compress, emit, expand, parse_json, Format};
use gonal_core::{
    criterion_set, is_tight_universal, run_escalation, CoeffVector, CriterionSet, EscalationResult,
};
use proptest::prelude::*;

const BOUND: u64 = 10_000;

fn vectors() -> impl Strategy<Value = BTreeSet<CoeffVector>> {
    let one = prop::collection::vec(1u64..=30, 1..=4).prop_map(|c| CoeffVector::new(c).unwrap());
    prop::collection::btree_set(one, 0..40)
}

proptest! {
    #[test]
    fn compress_then_expand_is_identity(set in vectors()) {
        let rows = compress(&set);
        for row in &rows {
            prop_assert!(row.validate().is_ok(), "{}", row);
        }
        prop_assert_eq!(expand(&rows), set);
    }

    #[test]
    fn compressed_rows_share_their_prefix(set in vectors()) {
        for row in compress(&set) {
            for a in row.expand() {
                prop_assert!(set.contains(&a));
                if !row.is_fixed() {
                    prop_assert_eq!(a.prefix(), row.prefix.clone());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn escalation_json_round_trip(m in 3u64..=11, n in 1u64..=3) {
        let run = run_escalation(m, n, 3000, 24).unwrap();
        let text = emit(&run, Format::Json).unwrap();
        let back: EscalationResult = parse_json(&text).unwrap();
        prop_assert_eq!(&back, &run);
        prop_assert_eq!(emit(&back, Format::Json).unwrap(), text);

        let cs = criterion_set(&run).unwrap();
        let text = emit(&cs, Format::Json).unwrap();
        let back: CriterionSet = parse_json(&text).unwrap();
        prop_assert_eq!(back, cs);
    }
}

#[test]
fn json_kind_is_checked() {
    let run = run_escalation(3, 1, 1000, 18).unwrap();
    let text = emit(&run, Format::Json).unwrap();
    assert!(parse_json::<CriterionSet>(&text).is_err());
}

/// Every proper nonempty sub-multiset, by index mask.
fn proper_subs(a: &CoeffVector) -> BTreeSet<CoeffVector> {
    let c = a.as_slice();
    (1..(1u32 << c.len()) - 1)
        .map(|mask| {
            let kept = (0..c.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| c[i])
                .collect();
            CoeffVector::new(kept).unwrap()
        })
        .collect()
}

/// Newness as the search reports it (with its memo and containment
/// shortcuts) against the definition: no proper sub-multiset is tight
/// universal, checked over all of them.
#[test]
fn newness_matches_definition() {
    for (m, n) in [(3, 1), (4, 1), (5, 2), (7, 1), (8, 2), (9, 3)] {
        let run = run_escalation(m, n, BOUND, 2 * n as usize + 16).unwrap();
        let new: BTreeSet<&CoeffVector> = run.new_universal().collect();
        let mut universal = 0;
        for level in &run.levels {
            for node in level.universal() {
                universal += 1;
                let a = &node.vector;
                assert!(
                    is_tight_universal(m, n, a, BOUND).unwrap(),
                    "m={m} n={n} {a}"
                );
                let by_definition = !proper_subs(a)
                    .iter()
                    .any(|b| is_tight_universal(m, n, b, BOUND).unwrap());
                assert_eq!(new.contains(a), by_definition, "m={m} n={n} {a}");
            }
        }
        assert!(universal > 0, "m={m} n={n}");
    }
}
