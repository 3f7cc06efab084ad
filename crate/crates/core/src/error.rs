use thiserror::Error;

use crate::escalation::EscalationResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polygonal order m must be at least 3, got {0}")]
    InvalidOrder(u64),
    #[error("P_{m}({u}) overflows 64-bit arithmetic")]
    Overflow { m: u64, u: i64 },
    #[error("coefficients must be positive")]
    ZeroCoefficient,
    #[error("coefficient vector must not be empty")]
    EmptyVector,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bound mismatch: set covers [0, {have}] but [0, {want}] was requested")]
    BoundMismatch { have: u64, want: u64 },
    #[error("oracle precondition violated: {0}")]
    OracleLimit(String),
    #[error("escalation hit the depth guard at k = {}", .0.max_depth)]
    DepthExhausted(Box<EscalationResult>),
    #[error("run for (m, n) = ({m}, {n}) did not terminate; no criterion set")]
    Unterminated { m: u64, n: u64 },
    #[error("{g} is not an element of the criterion set")]
    NotACriterion { g: u64 },
    #[error("witness {vector} failed verification at bound {bound}: {detail}")]
    WitnessFailed {
        vector: String,
        bound: u64,
        detail: String,
    },
    #[error("unknown reference table {0}")]
    UnknownTable(u32),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
