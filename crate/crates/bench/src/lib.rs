//! Inputs shared by the benchmarks.

use parcalc::{reduction_algorithm, Algorithm, RefinementLevel};

/// Fully refined pairwise reduction of `n` numbers.
pub fn full_reduction(n: u64) -> Algorithm {
    reduction_algorithm(n, RefinementLevel::Full).expect("n is a power of two")
}
