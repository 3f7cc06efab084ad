use std::collections::BTreeSet;
use std::fmt;

use super::{polygonal_number, polygonal_sequence, CoeffVector, PolygonalSequence};
use crate::error::{Error, Result};

const WORD: u64 = 64;

/// Membership set of the integers in `[0, bound]` represented by a form.
///
/// Bits above `bound` are always clear, so word-level equality is set
/// equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ReprSet {
    bound: u64,
    words: Vec<u64>,
}

impl ReprSet {
    /// The set `{0}` represented by the empty form.
    pub fn base(bound: u64) -> Self {
        let mut words = vec![0u64; word_count(bound)];
        words[0] = 1;
        ReprSet { bound, words }
    }

    pub fn from_members<I: IntoIterator<Item = u64>>(bound: u64, members: I) -> Self {
        let mut words = vec![0u64; word_count(bound)];
        for x in members {
            assert!(x <= bound, "member {x} exceeds bound {bound}");
            words[(x / WORD) as usize] |= 1 << (x % WORD);
        }
        ReprSet { bound, words }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn contains(&self, x: u64) -> bool {
        x <= self.bound && self.words[(x / WORD) as usize] >> (x % WORD) & 1 == 1
    }

    /// Number of members, including 0.
    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u64 * WORD;
            BitIter(w).map(move |b| base + b)
        })
    }

    /// Smallest integer in `[lo, hi]` (clamped to the bound) that is not a member.
    pub fn first_missing(&self, lo: u64, hi: u64) -> Option<u64> {
        let hi = hi.min(self.bound);
        if lo > hi {
            return None;
        }
        let first = (lo / WORD) as usize;
        let last = (hi / WORD) as usize;
        for i in first..=last {
            let mut holes = !self.words[i];
            if i == first {
                holes &= u64::MAX << (lo % WORD);
            }
            if holes != 0 {
                let x = i as u64 * WORD + u64::from(holes.trailing_zeros());
                return (x <= hi).then_some(x);
            }
        }
        None
    }

    /// Smallest member in `[lo, hi]`.
    pub fn first_member(&self, lo: u64, hi: u64) -> Option<u64> {
        let hi = hi.min(self.bound);
        if lo > hi {
            return None;
        }
        let first = (lo / WORD) as usize;
        let last = (hi / WORD) as usize;
        for i in first..=last {
            let mut bits = self.words[i];
            if i == first {
                bits &= u64::MAX << (lo % WORD);
            }
            if bits != 0 {
                let x = i as u64 * WORD + u64::from(bits.trailing_zeros());
                return (x <= hi).then_some(x);
            }
        }
        None
    }

    /// Integers in `[lo, hi]` that are not members.
    pub fn missing(&self, lo: u64, hi: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut at = lo;
        while let Some(x) = self.first_missing(at, hi) {
            out.push(x);
            at = x + 1;
        }
        out
    }

    pub fn is_subset_of(&self, other: &ReprSet) -> bool {
        self.bound == other.bound
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// The same set cut down to `[0, bound]`.
    pub fn restrict(&self, bound: u64) -> ReprSet {
        assert!(bound <= self.bound);
        let mut words = self.words[..word_count(bound)].to_vec();
        mask_tail(&mut words, bound);
        ReprSet { bound, words }
    }

    /// `R(a * g)` from `R(a)`: the union of copies of `self` shifted by `g p`
    /// for each generalized m-gonal `p` with `g p <= bound`.
    ///
    /// `seq` must cover `[0, bound / g]`.
    pub fn extend_by(&self, seq: &PolygonalSequence, g: u64) -> Result<ReprSet> {
        if g == 0 {
            return Err(Error::ZeroCoefficient);
        }
        let reach = self.bound / g;
        if seq.bound() < reach {
            return Err(Error::BoundMismatch {
                have: seq.bound(),
                want: reach,
            });
        }
        Ok(self.extend_with(seq.up_to(reach), g))
    }

    /// Kernel behind [`ReprSet::extend_by`]; `values` are the polygonal
    /// numbers to use, ascending and starting at 0.
    pub(crate) fn extend_with(&self, values: &[u64], g: u64) -> ReprSet {
        let mut words = self.words.clone();
        for &p in values {
            let shift = p * g;
            if shift == 0 {
                continue;
            }
            if shift > self.bound {
                break;
            }
            or_shifted(&mut words, &self.words, shift as usize);
        }
        mask_tail(&mut words, self.bound);
        ReprSet {
            bound: self.bound,
            words,
        }
    }
}

impl fmt::Debug for ReprSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 32;
        write!(f, "ReprSet(bound={}, {{", self.bound)?;
        for (i, x) in self.iter().take(SHOWN).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        if self.count() > SHOWN as u64 {
            f.write_str(",...")?;
        }
        f.write_str("})")
    }
}

fn word_count(bound: u64) -> usize {
    (bound / WORD + 1) as usize
}

fn mask_tail(words: &mut [u64], bound: u64) {
    let used = bound % WORD + 1;
    if used < WORD {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << used) - 1;
        }
    }
}

/// `dst |= src << shift`, truncated to `dst.len()` words.
fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let ws = shift / WORD as usize;
    let bs = (shift % WORD as usize) as u32;
    if ws >= dst.len() {
        return;
    }
    let n = dst.len() - ws;
    let dst = &mut dst[ws..];
    if bs == 0 {
        for (d, s) in dst.iter_mut().zip(&src[..n]) {
            *d |= *s;
        }
    } else {
        dst[0] |= src[0] << bs;
        let back = 64 - bs;
        for (d, pair) in dst[1..].iter_mut().zip(src[..n].windows(2)) {
            *d |= (pair[1] << bs) | (pair[0] >> back);
        }
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(u64::from(b))
    }
}

/// The empty form's representation set, `{0}`.
pub fn repr_base(bound: u64) -> ReprSet {
    ReprSet::base(bound)
}

/// Extends `r` by one coefficient `g`; `r` is left untouched.
pub fn repr_extend(r: &ReprSet, m: u64, g: u64, bound: u64) -> Result<ReprSet> {
    if g == 0 {
        return Err(Error::ZeroCoefficient);
    }
    if r.bound() != bound {
        return Err(Error::BoundMismatch {
            have: r.bound(),
            want: bound,
        });
    }
    let seq = polygonal_sequence(m, bound / g)?;
    r.extend_by(&seq, g)
}

/// `R(a)` restricted to `[0, bound]`.
pub fn repr_set(m: u64, a: &CoeffVector, bound: u64) -> Result<ReprSet> {
    if a.is_empty() {
        return Err(Error::EmptyVector);
    }
    let seq = polygonal_sequence(m, bound)?;
    Ok(repr_set_with(&seq, a.as_slice(), bound))
}

/// Folds the kernel over `coeffs`, largest first: large coefficients need
/// few passes, and the fold order does not change the result.
pub(crate) fn repr_set_with(seq: &PolygonalSequence, coeffs: &[u64], bound: u64) -> ReprSet {
    debug_assert!(seq.bound() >= bound);
    coeffs.iter().rev().fold(ReprSet::base(bound), |r, &g| {
        r.extend_with(seq.up_to(bound / g), g)
    })
}

/// Direct enumeration of every tuple `(a_1 s_1, ..., a_k s_k)` with sum at
/// most `bound`. Independent of the shifted-OR kernel; test use only.
pub fn repr_oracle(m: u64, a: &CoeffVector, bound: u64) -> Result<ReprSet> {
    if bound > 10_000 || a.len() > 4 {
        return Err(Error::OracleLimit(format!(
            "bound {bound} > 10^4 or length {} > 4",
            a.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::EmptyVector);
    }
    let mut gp = BTreeSet::new();
    // P_m(u) >= |u| (|u| - 1) / 2 for m >= 3, so |u| <= 2 sqrt(bound) + 2 suffices.
    let reach = 2 * ((bound as f64).sqrt() as i64) + 2;
    for u in -reach..=reach {
        let p = polygonal_number(m, u)?;
        if p <= bound {
            gp.insert(p);
        }
    }
    let gp: Vec<u64> = gp.into_iter().collect();
    let mut members = vec![false; bound as usize + 1];
    enumerate(&gp, a.as_slice(), 0, bound, &mut members);
    Ok(ReprSet::from_members(
        bound,
        members
            .iter()
            .enumerate()
            .filter(|(_, &hit)| hit)
            .map(|(x, _)| x as u64),
    ))
}

fn enumerate(gp: &[u64], coeffs: &[u64], partial: u64, bound: u64, out: &mut [bool]) {
    match coeffs.split_first() {
        None => out[partial as usize] = true,
        Some((&a, rest)) => {
            for &s in gp {
                let next = partial + a * s;
                if next > bound {
                    break;
                }
                enumerate(gp, rest, next, bound, out);
            }
        }
    }
}
