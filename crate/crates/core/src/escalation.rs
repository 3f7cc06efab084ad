//! Bounded escalation over sorted coefficient vectors.
//!
//! Starting from `E(1) = {(n)}`, every vector with a finite truant `t` is
//! extended by each escalator `g` in `{n, ..., t - n} ∪ {t}`. Vectors whose
//! truant lies above the bound are the universal candidates `U(k)`; the
//! search stops at the first level where every vector is universal.
//!
//! # Newness
//!
//! A tight-universal `a` is new when no proper sub-multiset is tight
//! universal. Checking only the sub-multisets that drop one coefficient is
//! enough: if some `b ≺ a` were tight universal, every `c` with
//! `b ≼ c ≺ a` and `|c| = |a| - 1` would be too (representation sets grow
//! under `≼`, and `c` cannot represent anything below `n` because `a`
//! doesn't). The algorithm's own definition asks instead that no
//! `b ≺ a` lie in an earlier `U(i)`. The two agree because every tight
//! universal vector contains a new one, and every new one is produced by
//! the search. That equivalence holds verbatim for the bounded notion of
//! universality used here, since the argument only needs `ψ` to be the
//! least unrepresented integer.
//!
//! # Staged truants
//!
//! Membership below `s` only depends on polygonal numbers below `s`, so a
//! truant found while working at a small bound `s` is exact. Truants are
//! searched on a ladder of bounds growing by 16x up to the configured bound;
//! only universal candidates pay for the full-size kernel.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use dashmap::DashMap;
use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygonal::repr::repr_set_with;
use crate::polygonal::{polygonal_sequence, repr_set, CoeffVector, PolygonalSequence, ReprSet};

/// Bound used in practice for the published tables.
pub const DEFAULT_BOUND: u64 = 1_000_000;

const FIRST_STAGE: u64 = 1 << 12;
const STAGE_GROWTH: u64 = 16;

/// The truant `ψ(a)`: least integer in `[n, bound]` the form misses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Option<u64>", into = "Option<u64>")]
pub enum Truant {
    Finite(u64),
    /// Every integer in `[n, bound]` is represented.
    AboveBound,
}

impl Truant {
    pub fn finite(self) -> Option<u64> {
        match self {
            Truant::Finite(t) => Some(t),
            Truant::AboveBound => None,
        }
    }

    pub fn is_above_bound(self) -> bool {
        self == Truant::AboveBound
    }
}

impl From<Option<u64>> for Truant {
    fn from(t: Option<u64>) -> Self {
        t.map_or(Truant::AboveBound, Truant::Finite)
    }
}

impl From<Truant> for Option<u64> {
    fn from(t: Truant) -> Self {
        t.finite()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalationNode {
    pub vector: CoeffVector,
    pub truant: Truant,
    /// Nothing in `[1, n - 1]` is represented.
    pub tight: bool,
}

/// One level `k` of the search: `E(k)` with truants, plus `NU(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub k: usize,
    /// `E(k)` in canonical order.
    pub nodes: Vec<EscalationNode>,
    /// `NU(k)` in canonical order.
    pub new_universal: Vec<CoeffVector>,
}

impl Level {
    pub fn escalated(&self) -> impl Iterator<Item = &CoeffVector> {
        self.nodes.iter().map(|n| &n.vector)
    }

    /// `U(k)`.
    pub fn universal(&self) -> impl Iterator<Item = &EscalationNode> {
        self.nodes.iter().filter(|n| n.truant.is_above_bound())
    }

    /// `A(k)`.
    pub fn active(&self) -> impl Iterator<Item = &EscalationNode> {
        self.nodes.iter().filter(|n| !n.truant.is_above_bound())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalationResult {
    pub m: u64,
    pub n: u64,
    pub bound: u64,
    pub max_depth: usize,
    pub levels: Vec<Level>,
    /// Smallest `l` with `A(l)` empty; `None` when the depth guard stopped the run.
    pub terminal_depth: Option<usize>,
}

impl EscalationResult {
    pub fn level(&self, k: usize) -> Option<&Level> {
        k.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    pub fn terminated(&self) -> bool {
        self.terminal_depth.is_some()
    }

    /// Every new universal candidate, shortest first.
    pub fn new_universal(&self) -> impl Iterator<Item = &CoeffVector> {
        self.levels.iter().flat_map(|l| l.new_universal.iter())
    }

    /// Distinct truants over all active vectors, ascending.
    pub fn active_truants(&self) -> Vec<u64> {
        let mut ts: Vec<u64> = self
            .levels
            .iter()
            .flat_map(|l| l.active().filter_map(|n| n.truant.finite()))
            .collect();
        ts.sort_unstable();
        ts.dedup();
        ts
    }
}

/// Receives every truant the engine computes (not the ones it was seeded with).
pub trait TruantSink: Send + Sync {
    fn record(&self, vector: &CoeffVector, truant: Truant);
}

/// Memoized truant computation for one `(m, n, bound)`.
pub struct TruantEngine {
    m: u64,
    n: u64,
    bound: u64,
    seq: PolygonalSequence,
    stages: Vec<u64>,
    memo: DashMap<CoeffVector, Truant>,
    sink: Option<Arc<dyn TruantSink>>,
}

impl TruantEngine {
    pub fn new(m: u64, n: u64, bound: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if bound < n {
            return Err(Error::InvalidParameter(format!(
                "bound {bound} must be at least n = {n}"
            )));
        }
        let seq = polygonal_sequence(m, bound)?;
        let mut stages = Vec::new();
        let mut s = FIRST_STAGE.max(n);
        while s < bound {
            stages.push(s);
            s = s.saturating_mul(STAGE_GROWTH);
        }
        stages.push(bound);
        Ok(TruantEngine {
            m,
            n,
            bound,
            seq,
            stages,
            memo: DashMap::new(),
            sink: None,
        })
    }

    pub fn with_sink(mut self, sink: Arc<dyn TruantSink>) -> Self {
        self.sink = Some(sink);
        self
    }

    pub fn set_sink(&mut self, sink: Arc<dyn TruantSink>) {
        self.sink = Some(sink);
    }

    /// Preloads known truants, e.g. from an on-disk cache.
    pub fn seed<I: IntoIterator<Item = (CoeffVector, Truant)>>(&self, known: I) {
        for (v, t) in known {
            self.memo.insert(v, t);
        }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn cached(&self, a: &CoeffVector) -> Option<Truant> {
        self.memo.get(a).map(|t| *t)
    }

    fn remember(&self, a: &CoeffVector, t: Truant) {
        if self.memo.insert(a.clone(), t).is_none() {
            if let Some(sink) = &self.sink {
                sink.record(a, t);
            }
        }
    }

    fn truant_in(&self, r: &ReprSet) -> Option<u64> {
        r.first_missing(self.n, r.bound())
    }

    /// `ψ(a)` at this engine's bound.
    pub fn truant(&self, a: &CoeffVector) -> Truant {
        if let Some(t) = self.cached(a) {
            return t;
        }
        let mut t = Truant::AboveBound;
        for &s in &self.stages {
            let r = repr_set_with(&self.seq, a.as_slice(), s);
            if let Some(x) = self.truant_in(&r) {
                t = Truant::Finite(x);
                break;
            }
        }
        self.remember(a, t);
        t
    }

    /// Truants of `parent * g` for each `g`, sharing the parent's sets
    /// across children. Results land in the memo.
    pub fn truants_of_children(&self, parent: &CoeffVector, escalators: &[u64]) {
        let mut parent_sets: Vec<Option<ReprSet>> = vec![None; self.stages.len()];
        for &g in escalators {
            let child = parent.insert(g);
            if self.cached(&child).is_some() {
                continue;
            }
            let mut t = Truant::AboveBound;
            for (i, &s) in self.stages.iter().enumerate() {
                let base = parent_sets[i]
                    .get_or_insert_with(|| repr_set_with(&self.seq, parent.as_slice(), s));
                let r = base.extend_with(self.seq.up_to(s / g), g);
                if let Some(x) = self.truant_in(&r) {
                    t = Truant::Finite(x);
                    break;
                }
            }
            self.remember(&child, t);
        }
    }

    /// Tight universality at the engine's bound, through the memo.
    pub fn is_tight_universal(&self, a: &CoeffVector) -> bool {
        // The least nonzero represented value is a_1, since 1 is polygonal.
        a.first().is_some_and(|a1| a1 >= self.n) && self.truant(a).is_above_bound()
    }

    /// Newness of a tight-universal `a`: no one-smaller sub-multiset is
    /// tight universal. `known_new` are previously found new vectors; a
    /// sub-multiset containing one of them is universal without recomputation.
    pub fn is_new(&self, a: &CoeffVector, known_new: &[CoeffVector]) -> bool {
        let subs: Vec<CoeffVector> = a.drop_one().into_iter().filter(|b| !b.is_empty()).collect();
        if subs
            .iter()
            .any(|b| self.cached(b) == Some(Truant::AboveBound))
        {
            return false;
        }
        if subs
            .iter()
            .any(|b| known_new.iter().any(|w| w.is_submultiset_of(b)))
        {
            return false;
        }
        !subs.iter().any(|b| self.is_tight_universal(b))
    }
}

/// `ψ(a)` for a single vector.
pub fn truant(m: u64, n: u64, a: &CoeffVector, bound: u64) -> Result<Truant> {
    if a.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(TruantEngine::new(m, n, bound)?.truant(a))
}

/// `{g : n <= g <= t - n} ∪ {t}`, ascending.
pub fn escalator_candidates(n: u64, t: u64) -> Vec<u64> {
    assert!(t >= n, "truant {t} below n = {n}");
    let mut out: Vec<u64> = if t >= 2 * n {
        (n..=t - n).collect()
    } else {
        Vec::new()
    };
    out.push(t);
    out
}

/// `E(k+1)` from `A(k)`, canonical and duplicate-free.
pub fn escalate_level(
    m: u64,
    n: u64,
    active: &[CoeffVector],
    bound: u64,
) -> Result<Vec<CoeffVector>> {
    let engine = TruantEngine::new(m, n, bound)?;
    let mut parents = Vec::with_capacity(active.len());
    for a in active {
        match engine.truant(a) {
            Truant::Finite(t) => parents.push((a.clone(), t)),
            Truant::AboveBound => {
                return Err(Error::InvalidParameter(format!(
                    "{a} has no truant below {bound}; it cannot be escalated"
                )))
            }
        }
    }
    Ok(children_by_owner(n, &parents).into_keys().collect())
}

/// Each child of `parents` mapped to the first parent (in input order) that
/// produces it, with the escalator used.
fn children_by_owner(
    n: u64,
    parents: &[(CoeffVector, u64)],
) -> BTreeMap<CoeffVector, (usize, u64)> {
    let mut owner = BTreeMap::new();
    for (i, (p, t)) in parents.iter().enumerate() {
        for g in escalator_candidates(n, *t) {
            owner.entry(p.insert(g)).or_insert((i, g));
        }
    }
    owner
}

pub fn is_tight_universal(m: u64, n: u64, a: &CoeffVector, bound: u64) -> Result<bool> {
    let r = repr_set(m, a, bound)?;
    let below = n > 1 && r.first_member(1, n - 1).is_some();
    Ok(!below && r.first_missing(n, bound).is_none())
}

/// Newness by direct check of every one-smaller sub-multiset.
pub fn is_new(m: u64, n: u64, a: &CoeffVector, bound: u64) -> Result<bool> {
    for b in a.drop_one() {
        if !b.is_empty() && is_tight_universal(m, n, &b, bound)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct EscalationConfig {
    pub m: u64,
    pub n: u64,
    pub bound: u64,
    pub max_depth: usize,
    pub jobs: usize,
}

impl EscalationConfig {
    pub fn new(m: u64, n: u64) -> Self {
        EscalationConfig {
            m,
            n,
            bound: DEFAULT_BOUND,
            max_depth: default_max_depth(n),
            jobs: 1,
        }
    }

    pub fn bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }

    pub fn max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.m < 3 {
            return Err(Error::InvalidOrder(self.m));
        }
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if self.bound < 2 * self.n {
            return bad(format!(
                "bound {} must be at least 2n = {}",
                self.bound,
                2 * self.n
            ));
        }
        if self.max_depth < 1 {
            return bad("max_depth must be at least 1".into());
        }
        if self.jobs < 1 {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }
}

pub fn default_max_depth(n: u64) -> usize {
    2 * n as usize + 16
}

/// Runs the search with default parallelism and no cache.
pub fn run_escalation(m: u64, n: u64, bound: u64, max_depth: usize) -> Result<EscalationResult> {
    let config = EscalationConfig::new(m, n)
        .bound(bound)
        .max_depth(max_depth);
    Escalator::new(config)?.run()
}

/// A configured search; owns the truant memo.
pub struct Escalator {
    config: EscalationConfig,
    engine: TruantEngine,
}

impl Escalator {
    pub fn new(config: EscalationConfig) -> Result<Self> {
        config.validate()?;
        let engine = TruantEngine::new(config.m, config.n, config.bound)?;
        Ok(Escalator { config, engine })
    }

    pub fn engine(&self) -> &TruantEngine {
        &self.engine
    }

    pub fn engine_mut(&mut self) -> &mut TruantEngine {
        &mut self.engine
    }

    pub fn run(&self) -> Result<EscalationResult> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| self.run_levels())
    }

    fn run_levels(&self) -> Result<EscalationResult> {
        let EscalationConfig {
            m,
            n,
            bound,
            max_depth,
            ..
        } = self.config;
        let engine = &self.engine;
        let mut result = EscalationResult {
            m,
            n,
            bound,
            max_depth,
            levels: Vec::new(),
            terminal_depth: None,
        };
        let mut escalated = vec![CoeffVector::single(n)?];
        engine.truant(&escalated[0]);
        let mut known_new: Vec<CoeffVector> = Vec::new();

        for k in 1..=max_depth {
            let started = Instant::now();
            let nodes: Vec<EscalationNode> = escalated
                .iter()
                .map(|v| {
                    let truant = engine.cached(v).expect("truant computed before assembly");
                    let tight = v.first().is_some_and(|a1| a1 >= n);
                    debug_assert!(tight, "{v} has a coefficient below n");
                    EscalationNode {
                        vector: v.clone(),
                        truant,
                        tight,
                    }
                })
                .collect();

            let universal: Vec<&CoeffVector> = nodes
                .iter()
                .filter(|x| x.truant.is_above_bound())
                .map(|x| &x.vector)
                .collect();
            let new_universal: Vec<CoeffVector> = universal
                .par_iter()
                .filter(|v| engine.is_new(v, &known_new))
                .map(|v| (*v).clone())
                .collect();
            known_new.extend(new_universal.iter().cloned());

            let parents: Vec<(CoeffVector, u64)> = nodes
                .iter()
                .filter_map(|x| x.truant.finite().map(|t| (x.vector.clone(), t)))
                .collect();
            info!(
                "m={m} n={n} k={k}: |E|={} |U|={} |NU|={} |A|={}",
                nodes.len(),
                universal.len(),
                new_universal.len(),
                parents.len()
            );
            result.levels.push(Level {
                k,
                nodes,
                new_universal,
            });
            if parents.is_empty() {
                result.terminal_depth = Some(k);
                return Ok(result);
            }
            if k == max_depth {
                break;
            }

            let owners = children_by_owner(n, &parents);
            let mut groups: HashMap<usize, Vec<u64>> = HashMap::new();
            for (i, g) in owners.values() {
                groups.entry(*i).or_default().push(*g);
            }
            let mut groups: Vec<(usize, Vec<u64>)> = groups.into_iter().collect();
            groups.sort_unstable_by_key(|(i, _)| *i);
            groups
                .par_iter()
                .for_each(|(i, gs)| engine.truants_of_children(&parents[*i].0, gs));
            escalated = owners.into_keys().collect();
            let secs = started.elapsed().as_secs_f64();
            debug!(
                "k={k} -> {}: {} children in {secs:.2}s ({:.0} nodes/s)",
                k + 1,
                escalated.len(),
                escalated.len() as f64 / secs.max(1e-9)
            );
        }
        Err(Error::DepthExhausted(Box::new(result)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[u64]) -> CoeffVector {
        CoeffVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn truant_examples() {
        assert_eq!(truant(4, 1, &v(&[1]), 100).unwrap(), Truant::Finite(2));
        assert_eq!(truant(4, 1, &v(&[1, 2]), 100).unwrap(), Truant::Finite(5));
        assert_eq!(truant(7, 2, &v(&[2]), 100).unwrap(), Truant::Finite(3));
        assert_eq!(
            truant(4, 1, &v(&[1, 1, 1, 1]), 100).unwrap(),
            Truant::AboveBound
        );
    }

    #[test]
    fn truant_staging_agrees_with_single_pass() {
        // bound far above the first stage forces several ladder steps
        let engine = TruantEngine::new(4, 1, 200_000).unwrap();
        for a in [
            v(&[1, 1, 1]),
            v(&[1, 2, 3]),
            v(&[1, 1, 1, 1]),
            v(&[1, 2, 5, 5]),
        ] {
            let direct = repr_set(4, &a, 200_000).unwrap().first_missing(1, 200_000);
            assert_eq!(engine.truant(&a).finite(), direct, "{a}");
        }
    }

    #[test]
    fn escalators() {
        assert_eq!(escalator_candidates(2, 3), vec![3]);
        assert_eq!(escalator_candidates(1, 2), vec![1, 2]);
        assert_eq!(escalator_candidates(2, 10), vec![2, 3, 4, 5, 6, 7, 8, 10]);
        assert_eq!(escalator_candidates(3, 3), vec![3]);
        assert_eq!(escalator_candidates(3, 6), vec![3, 6]);
    }

    #[test]
    fn escalate_level_examples() {
        // ψ(2) = 3 < 2n, so the only escalator is 3
        assert_eq!(
            escalate_level(7, 2, &[v(&[2])], 100).unwrap(),
            vec![v(&[2, 3])]
        );
        assert!(escalate_level(7, 2, &[], 100).unwrap().is_empty());
        // chain (n, ..., n+k-1) -> (n, ..., n+k) for m != 5, k < n
        assert_eq!(
            escalate_level(8, 4, &[v(&[4, 5])], 10_000).unwrap(),
            vec![v(&[4, 5, 6])]
        );
        assert!(escalate_level(4, 1, &[v(&[1, 1, 1, 1])], 100).is_err());
    }

    #[test]
    fn duplicate_children_are_merged() {
        // (2,2,3) arises from both (2,2) and (2,3)
        let children = escalate_level(5, 2, &[v(&[2, 2]), v(&[2, 3])], 1_000).unwrap();
        let mut dedup = children.clone();
        dedup.dedup();
        assert_eq!(children, dedup);
        assert!(children.contains(&v(&[2, 2, 3])));
    }

    #[test]
    fn tight_universal_examples() {
        assert!(is_tight_universal(4, 1, &v(&[1, 1, 1, 1]), 100).unwrap());
        assert!(!is_tight_universal(4, 2, &v(&[1, 1, 1, 1]), 100).unwrap());
        assert!(!is_tight_universal(4, 1, &v(&[1, 1, 1]), 100).unwrap());
    }

    #[test]
    fn newness_examples() {
        assert!(is_new(4, 1, &v(&[1, 1, 1, 1]), 10_000).unwrap());
        assert!(!is_new(4, 1, &v(&[1, 1, 1, 1, 1]), 10_000).unwrap());
        let engine = TruantEngine::new(4, 1, 10_000).unwrap();
        assert!(engine.is_new(&v(&[1, 1, 1, 1]), &[]));
        assert!(!engine.is_new(&v(&[1, 1, 1, 1, 1]), &[]));
        assert!(!engine.is_new(&v(&[1, 1, 1, 1, 7]), &[v(&[1, 1, 1, 1])]));
    }

    #[test]
    fn lagrange_four_squares_is_found() {
        let run = run_escalation(4, 1, 10_000, 18).unwrap();
        let u4: Vec<_> = run
            .level(4)
            .unwrap()
            .universal()
            .map(|x| x.vector.clone())
            .collect();
        assert!(u4.contains(&v(&[1, 1, 1, 1])));
        assert!(run
            .level(4)
            .unwrap()
            .new_universal
            .contains(&v(&[1, 1, 1, 1])));
        assert_eq!(run.level(1).unwrap().nodes[0].vector, v(&[1]));
    }

    #[test]
    fn depth_guard_carries_partial_result() {
        match run_escalation(4, 1, 10_000, 2) {
            Err(Error::DepthExhausted(partial)) => {
                assert_eq!(partial.levels.len(), 2);
                assert!(partial.terminal_depth.is_none());
            }
            other => panic!("expected depth guard, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(EscalationConfig::new(2, 1).validate().is_err());
        assert!(EscalationConfig::new(4, 0).validate().is_err());
        assert!(EscalationConfig::new(4, 3).bound(5).validate().is_err());
        assert!(EscalationConfig::new(4, 3).jobs(0).validate().is_err());
        assert!(EscalationConfig::new(4, 3).max_depth(0).validate().is_err());
        assert!(EscalationConfig::new(4, 3).validate().is_ok());
    }

    #[test]
    fn truant_serializes_as_nullable_number() {
        assert_eq!(serde_json::to_string(&Truant::Finite(7)).unwrap(), "7");
        assert_eq!(serde_json::to_string(&Truant::AboveBound).unwrap(), "null");
    }
}
