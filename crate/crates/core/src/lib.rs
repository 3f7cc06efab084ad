//! Escalation search for tight `T(n)`-universal sums of generalized m-gonal
//! numbers: truants, escalator sets, new universal candidates, criterion
//! sets `CS(m, n)` with their maximum `γ(m, n)`, and the reference tables.

pub mod criterion;
pub mod error;
pub mod escalation;
pub mod polygonal;
pub mod tables;

pub use criterion::{criterion_set, fermat_witness, gamma, minimality_witness, CriterionSet};
pub use error::{Error, Result};
pub use escalation::{
    escalate_level, escalator_candidates, is_new, is_tight_universal, run_escalation, truant,
    EscalationConfig, EscalationNode, EscalationResult, Escalator, Level, Truant, TruantEngine,
    TruantSink, DEFAULT_BOUND,
};
pub use polygonal::{
    polygonal_number, polygonal_sequence, repr_base, repr_extend, repr_oracle, repr_set,
    CoeffVector, PolygonalSequence, ReprSet,
};
