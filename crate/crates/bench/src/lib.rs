//! Benchmark fixtures shared by the criterion benches.

use ladderlab::rng::{path_stream, Domain};
use ladderlab::walk::simulate_to_ladder;
use ladderlab::{JumpLaw, PathRecord};

/// First `n` complete ladder paths of `law` under `seed`, skipping truncated ones.
pub fn ladder_paths(law: &JumpLaw, n: usize, seed: u64) -> Vec<PathRecord> {
    (0u64..)
        .filter_map(|i| {
            simulate_to_ladder(law, 1, path_stream(seed, Domain::Walk, i), 1 << 16).ok()
        })
        .filter(|p| !p.truncated())
        .take(n)
        .collect()
}
