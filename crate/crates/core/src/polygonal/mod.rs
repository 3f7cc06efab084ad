//! Generalized m-gonal numbers and the representation sets of m-gonal forms.
//!
//! A form `a_1 P_m(x_1) + ... + a_k P_m(x_k)` is identified with its sorted
//! coefficient multiset ([`CoeffVector`]). Its value set below a bound is a
//! dense bitset ([`ReprSet`]) built by repeated shifted-OR passes.

pub(crate) mod repr;
mod vector;

pub use repr::{repr_base, repr_extend, repr_oracle, repr_set, ReprSet};
pub use vector::CoeffVector;

use crate::error::{Error, Result};

/// `P_m(u) = ((m - 2) u^2 - (m - 4) u) / 2`, exact and overflow-checked.
///
/// The value is non-negative for every integer `u` once `m >= 3`.
pub fn polygonal_number(m: u64, u: i64) -> Result<u64> {
    if m < 3 {
        return Err(Error::InvalidOrder(m));
    }
    let overflow = || Error::Overflow { m, u };
    let m = i128::from(m);
    let u = i128::from(u);
    let twice = (m - 2)
        .checked_mul(u)
        .and_then(|x| x.checked_mul(u))
        .and_then(|x| x.checked_sub((m - 4) * u))
        .ok_or_else(overflow)?;
    debug_assert!(twice >= 0 && twice % 2 == 0);
    u64::try_from(twice / 2).map_err(|_| overflow())
}

/// The distinct generalized m-gonal numbers in `[0, bound]`, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonalSequence {
    m: u64,
    bound: u64,
    values: Vec<u64>,
}

impl PolygonalSequence {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Values not exceeding `limit` (a prefix, since the list is sorted).
    pub fn up_to(&self, limit: u64) -> &[u64] {
        let end = self.values.partition_point(|&v| v <= limit);
        &self.values[..end]
    }

    pub fn contains(&self, v: u64) -> bool {
        self.values.binary_search(&v).is_ok()
    }
}

/// Every `P_m(u)` with `u` in `Z` lying in `[0, bound]`.
///
/// Walks `u = 0, 1, -1, 2, -2, ...`; both branches increase in `|u|`, so the
/// walk stops once both sides exceed `bound`.
pub fn polygonal_sequence(m: u64, bound: u64) -> Result<PolygonalSequence> {
    if m < 3 {
        return Err(Error::InvalidOrder(m));
    }
    let mut values = vec![0];
    let mut u: i64 = 1;
    loop {
        let pos = polygonal_number(m, u)?;
        let neg = polygonal_number(m, -u)?;
        if pos > bound && neg > bound {
            break;
        }
        values.extend([pos, neg].into_iter().filter(|&v| v <= bound));
        u += 1;
    }
    values.sort_unstable();
    values.dedup();
    Ok(PolygonalSequence { m, bound, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygonal_number_examples() {
        assert_eq!(polygonal_number(5, -1).unwrap(), 2);
        assert_eq!(polygonal_number(7, 0).unwrap(), 0);
        assert_eq!(polygonal_number(3, 4).unwrap(), 10);
        assert_eq!(polygonal_number(4, -7).unwrap(), 49);
    }

    #[test]
    fn polygonal_number_rejects_small_order_and_overflow() {
        assert!(matches!(
            polygonal_number(2, 1),
            Err(Error::InvalidOrder(2))
        ));
        assert!(matches!(
            polygonal_number(10_000, i64::MAX / 2),
            Err(Error::Overflow { .. })
        ));
        assert!(polygonal_number(4, 3_000_000_000).is_ok());
        assert!(polygonal_number(4, 5_000_000_000).is_err());
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(
            polygonal_sequence(5, 30).unwrap().values(),
            &[0, 1, 2, 5, 7, 12, 15, 22, 26]
        );
        assert_eq!(polygonal_sequence(4, 10).unwrap().values(), &[0, 1, 4, 9]);
        assert_eq!(polygonal_sequence(3, 0).unwrap().values(), &[0]);
    }

    #[test]
    fn triangular_branches_coincide() {
        // P_3(u) = P_3(-u - 1); the merged list must still be strictly ascending.
        let seq = polygonal_sequence(3, 100).unwrap();
        assert_eq!(
            seq.values(),
            &[0, 1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 66, 78, 91]
        );
    }

    #[test]
    fn sequence_matches_brute_force() {
        for m in 3..=20 {
            let bound = 2_000;
            let mut brute: Vec<u64> = (-200i64..=200)
                .map(|u| polygonal_number(m, u).unwrap())
                .filter(|&v| v <= bound)
                .collect();
            brute.sort_unstable();
            brute.dedup();
            let seq = polygonal_sequence(m, bound).unwrap();
            assert_eq!(seq.values(), brute.as_slice(), "m = {m}");
            assert_eq!(&seq.values()[..2], &[0, 1]);
        }
    }

    #[test]
    fn up_to_is_prefix() {
        let seq = polygonal_sequence(7, 1000).unwrap();
        assert_eq!(seq.up_to(13), &[0, 1, 4, 7, 13]);
        assert_eq!(seq.up_to(0), &[0]);
        assert!(seq.contains(18));
        assert!(!seq.contains(2));
    }
}
