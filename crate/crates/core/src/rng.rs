//! Counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 keystream whose
//! key is derived from `(seed, domain, index)` and whose stream id selects a
//! lane inside that key. A walk for path `i` therefore never depends on which
//! worker simulated it or on how many other paths ran before it, and a bond
//! value never depends on the order in which bonds were first touched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which family of random variables a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Walk,
    SceneryPlus,
    SceneryMinus,
    Medium,
    Auxiliary(u32),
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Walk => 0x5741_4c4b,
            Domain::SceneryPlus => 0x5343_4e50,
            Domain::SceneryMinus => 0x5343_4e4d,
            Domain::Medium => 0x4d45_4449,
            Domain::Auxiliary(k) => 0x4155_5800_0000_0000 | u64::from(k),
        }
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_key(words: &[u64]) -> [u8; 32] {
    let mut state = 0x243f_6a88_85a3_08d3_u64;
    for &w in words {
        state = splitmix64(state ^ w);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    key
}

/// Stream for path `index` of `domain` under `seed`.
pub fn path_stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(derive_key(&[seed, domain.tag()]));
    rng.set_stream(index);
    rng
}

/// Lane `lane` of the sub-key belonging to path `index`.
///
/// Bond fields use lane 0 for bonds `k >= 1` and lane 1 for bonds `k <= 0`.
pub fn lane_stream(seed: u64, domain: Domain, index: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(derive_key(&[seed, domain.tag(), index, 0x4c41_4e45]));
    rng.set_stream(lane);
    rng
}
