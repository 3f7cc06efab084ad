//! Benchmark inputs shared by the bench targets.

use gonal_core::CoeffVector;

/// Vectors with a large truant, so representation sets run to the bound.
pub fn hard_vectors() -> Vec<(u64, CoeffVector)> {
    [(3, "1,2,5,5"), (5, "1,1,2,3,4,4"), (7, "1,1,1,2,2,3,4,6,7")]
        .into_iter()
        .map(|(m, v)| (m, v.parse().expect("valid vector")))
        .collect()
}
