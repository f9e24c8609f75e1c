//! The control walk on the integers, its ladder times, heights and lengths.

use rand::RngCore;

use crate::error::{invalid, Error, Result};
use crate::laws::{JumpKind, JumpLaw};

/// A source of walk increments.
///
/// Random sources never run dry; scripted sources return `None` once their
/// script is exhausted, which ends the path as truncated.
pub trait IncrementSource {
    fn next_increment(&mut self) -> Option<i64>;
}

/// Increments drawn from a jump law.
///
/// The simple walk reads one bit per step, least significant bit first, from
/// successive 64-bit words of the stream.
pub struct LawStream<'a, R> {
    law: &'a JumpLaw,
    rng: R,
    bits: u64,
    left: u32,
}

impl<'a, R: RngCore> LawStream<'a, R> {
    pub fn new(law: &'a JumpLaw, rng: R) -> Self {
        LawStream {
            law,
            rng,
            bits: 0,
            left: 0,
        }
    }
}

impl<R: RngCore> IncrementSource for LawStream<'_, R> {
    fn next_increment(&mut self) -> Option<i64> {
        if self.law.kind() == JumpKind::SimpleSymmetric {
            if self.left == 0 {
                self.bits = self.rng.next_u64();
                self.left = 64;
            }
            let up = self.bits & 1 == 1;
            self.bits >>= 1;
            self.left -= 1;
            Some(if up { 1 } else { -1 })
        } else {
            Some(self.law.sample(&mut self.rng))
        }
    }
}

/// A fixed list of increments, for hand-built paths.
#[derive(Debug, Clone)]
pub struct ScriptedIncrements {
    values: Vec<i64>,
    next: usize,
}

impl ScriptedIncrements {
    pub fn new(values: impl Into<Vec<i64>>) -> Self {
        ScriptedIncrements {
            values: values.into(),
            next: 0,
        }
    }
}

impl IncrementSource for ScriptedIncrements {
    fn next_increment(&mut self) -> Option<i64> {
        let v = self.values.get(self.next).copied();
        self.next += 1;
        v
    }
}

/// A realized walk `S_0 = 0, S_1, ..., S_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathRecord {
    increments: Vec<i64>,
    positions: Vec<i64>,
    truncated: bool,
}

impl PathRecord {
    /// Path through the given positions, which must start at 0.
    pub fn from_positions(positions: &[i64]) -> Result<Self> {
        if positions.first() != Some(&0) {
            return Err(invalid("positions", "a path starts at S_0 = 0"));
        }
        let increments = positions
            .windows(2)
            .enumerate()
            .map(|(j, w)| {
                w[1].checked_sub(w[0])
                    .ok_or(Error::Overflow { step: j + 1 })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PathRecord {
            increments,
            positions: positions.to_vec(),
            truncated: false,
        })
    }

    /// `xi_1, ..., xi_n`.
    pub fn increments(&self) -> &[i64] {
        &self.increments
    }

    /// `S_0, ..., S_n`.
    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    /// Number of steps `n`.
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Set when the step cap was hit before the requested ladder.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Smallest and largest visited position.
    pub fn range(&self) -> (i64, i64) {
        let lo = self.positions.iter().copied().min().unwrap_or(0);
        let hi = self.positions.iter().copied().max().unwrap_or(0);
        (lo, hi)
    }
}

/// Ladder times `T_j`, heights `S_{T_j}` and lengths `L_{T_j}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LadderStats {
    pub ladder_times: Vec<usize>,
    pub ladder_heights: Vec<i64>,
    pub ladder_lengths: Vec<u64>,
}

impl LadderStats {
    pub fn count(&self) -> usize {
        self.ladder_times.len()
    }
}

/// Run `source` until the `n`-th ladder time or until a ladder takes more
/// than `max_steps` steps.
pub fn simulate_with<S: IncrementSource>(
    source: &mut S,
    n: usize,
    max_steps: usize,
) -> Result<PathRecord> {
    if n == 0 {
        return Err(invalid("n", "at least one ladder is required"));
    }
    if max_steps == 0 {
        return Err(invalid("max_steps", "must be positive"));
    }
    let mut increments = Vec::new();
    let mut positions = vec![0i64];
    let (mut pos, mut record, mut found, mut since) = (0i64, 0i64, 0usize, 0usize);
    let truncated = loop {
        if since == max_steps {
            break true;
        }
        let Some(xi) = source.next_increment() else {
            break true;
        };
        pos = pos.checked_add(xi).ok_or(Error::Overflow {
            step: increments.len() + 1,
        })?;
        increments.push(xi);
        positions.push(pos);
        since += 1;
        if pos > record {
            record = pos;
            found += 1;
            since = 0;
            if found == n {
                break false;
            }
        }
    };
    Ok(PathRecord {
        increments,
        positions,
        truncated,
    })
}

/// Simulate the walk with law `law` to its `n`-th ladder time.
pub fn simulate_to_ladder<R: RngCore>(
    law: &JumpLaw,
    n: usize,
    rng: R,
    max_steps: usize,
) -> Result<PathRecord> {
    simulate_with(&mut LawStream::new(law, rng), n, max_steps)
}

/// Ladder statistics of every complete ladder in `path`.
pub fn ladder_stats(path: &PathRecord) -> Result<LadderStats> {
    let mut stats = LadderStats::default();
    let (mut record, mut length) = (0i64, 0u64);
    for (j, (&xi, &s)) in path.increments.iter().zip(&path.positions[1..]).enumerate() {
        length = length
            .checked_add(xi.unsigned_abs())
            .ok_or(Error::Overflow { step: j + 1 })?;
        if s > record {
            record = s;
            stats.ladder_times.push(j + 1);
            stats.ladder_heights.push(s);
            stats.ladder_lengths.push(length);
        }
    }
    Ok(stats)
}

/// `(T, S_T, L_T)` of one first-ladder excursion, without storing the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstLadder {
    /// `T`, or the number of steps taken when truncated.
    pub time: u64,
    pub height: i64,
    pub length: u64,
    pub truncated: bool,
}

// For each byte of steps (bit set = up step, least significant first): the
// net displacement and the highest partial sum reached within the byte.
const fn byte_tables() -> ([i8; 256], [i8; 256]) {
    let mut net = [0i8; 256];
    let mut peak = [0i8; 256];
    let mut b = 0;
    while b < 256 {
        let (mut s, mut m, mut j) = (0i8, i8::MIN, 0);
        while j < 8 {
            s += if (b >> j) & 1 == 1 { 1 } else { -1 };
            if s > m {
                m = s;
            }
            j += 1;
        }
        net[b] = s;
        peak[b] = m;
        b += 1;
    }
    (net, peak)
}

const BYTE_TABLES: ([i8; 256], [i8; 256]) = byte_tables();

/// First ladder `(T, S_T, L_T)` of the walk with law `law`, capped at
/// `max_steps`. Consumes the stream exactly as [`simulate_to_ladder`] does.
pub fn first_ladder<R: RngCore>(law: &JumpLaw, mut rng: R, max_steps: u64) -> Result<FirstLadder> {
    if max_steps == 0 {
        return Err(invalid("max_steps", "must be positive"));
    }
    if law.kind() == JumpKind::SimpleSymmetric {
        return Ok(first_ladder_simple(&mut rng, max_steps));
    }
    let (mut pos, mut length, mut steps) = (0i64, 0u64, 0u64);
    while steps < max_steps {
        let xi = law.sample(&mut rng);
        steps += 1;
        pos = pos.checked_add(xi).ok_or(Error::Overflow {
            step: steps as usize,
        })?;
        length = length
            .checked_add(xi.unsigned_abs())
            .ok_or(Error::Overflow {
                step: steps as usize,
            })?;
        if pos > 0 {
            return Ok(FirstLadder {
                time: steps,
                height: pos,
                length,
                truncated: false,
            });
        }
    }
    Ok(FirstLadder {
        time: steps,
        height: pos,
        length,
        truncated: true,
    })
}

fn first_ladder_simple<R: RngCore>(rng: &mut R, max_steps: u64) -> FirstLadder {
    let (net, peak) = (&BYTE_TABLES.0, &BYTE_TABLES.1);
    let (mut pos, mut steps) = (0i64, 0u64);
    loop {
        let mut word = rng.next_u64();
        for _ in 0..8 {
            let byte = (word & 0xff) as usize;
            if steps + 8 <= max_steps && pos + i64::from(peak[byte]) <= 0 {
                pos += i64::from(net[byte]);
                steps += 8;
            } else {
                for j in 0..8 {
                    if steps == max_steps {
                        return FirstLadder {
                            time: steps,
                            height: pos,
                            length: steps,
                            truncated: true,
                        };
                    }
                    pos += if (byte >> j) & 1 == 1 { 1 } else { -1 };
                    steps += 1;
                    if pos > 0 {
                        return FirstLadder {
                            time: steps,
                            height: pos,
                            length: steps,
                            truncated: false,
                        };
                    }
                }
            }
            word >>= 8;
        }
    }
}

/// `P(T = 2k - 1)` for `k = 1..=n_max` for the simple symmetric walk,
/// `binom(2k-1, k) / ((2k-1) 2^(2k-1))`, by the ratio recurrence.
pub fn ssrw_first_passage_pmf(n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 || n_max > 10_000_000 {
        return Err(invalid("n_max", format!("{n_max} outside 1..=10^7")));
    }
    let mut out = Vec::with_capacity(n_max);
    let mut p = 0.5;
    for k in 1..=n_max {
        out.push(p);
        let kf = k as f64;
        p *= (2.0 * kf - 1.0) / (2.0 * (kf + 1.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{path_stream, Domain};

    #[test]
    fn scripted_path_reaches_first_ladder() {
        let path = simulate_with(&mut ScriptedIncrements::new([-1, 2, 5]), 1, 10).unwrap();
        assert_eq!(path.positions(), &[0, -1, 1]);
        assert!(!path.truncated());
        let s = ladder_stats(&path).unwrap();
        assert_eq!(
            (s.ladder_times[0], s.ladder_heights[0], s.ladder_lengths[0]),
            (2, 1, 3)
        );
    }

    #[test]
    fn hand_evaluated_ladders() {
        let path = PathRecord::from_positions(&[0, 1]).unwrap();
        let s = ladder_stats(&path).unwrap();
        assert_eq!(
            (
                s.ladder_times.clone(),
                s.ladder_heights.clone(),
                s.ladder_lengths.clone()
            ),
            (vec![1], vec![1], vec![1])
        );
        let path = PathRecord::from_positions(&[0, -2, -1, 3, 2, 4]).unwrap();
        let s = ladder_stats(&path).unwrap();
        assert_eq!(s.ladder_times, vec![3, 5]);
        assert_eq!(s.ladder_heights, vec![3, 4]);
        assert_eq!(s.ladder_lengths, vec![7, 10]);
        assert_eq!(
            ladder_stats(&PathRecord::from_positions(&[0]).unwrap())
                .unwrap()
                .count(),
            0
        );
    }

    #[test]
    fn exhausted_script_truncates() {
        let path = simulate_with(&mut ScriptedIncrements::new([-1, -1]), 1, 10).unwrap();
        assert!(path.truncated());
        let path = simulate_with(&mut ScriptedIncrements::new([-1; 20]), 1, 5).unwrap();
        assert!(path.truncated());
        assert_eq!(path.len(), 5);
    }

    #[test]
    fn fast_first_ladder_matches_stored_path() {
        let laws = [
            JumpLaw::simple_symmetric(),
            JumpLaw::custom(&[(1, 0.3), (3, 0.2)]).unwrap(),
        ];
        for law in &laws {
            for i in 0..2000 {
                let cap = 1 + (i % 500) as usize;
                let path =
                    simulate_to_ladder(law, 1, path_stream(5, Domain::Walk, i), cap).unwrap();
                let fast = first_ladder(law, path_stream(5, Domain::Walk, i), cap as u64).unwrap();
                assert_eq!(fast.truncated, path.truncated());
                assert_eq!(fast.time as usize, path.len());
                if !path.truncated() {
                    let s = ladder_stats(&path).unwrap();
                    assert_eq!(fast.height, s.ladder_heights[0]);
                    assert_eq!(fast.length, s.ladder_lengths[0]);
                }
            }
        }
    }

    #[test]
    fn pmf_first_terms() {
        let p = ssrw_first_passage_pmf(3).unwrap();
        assert_eq!(p[0], 0.5);
        assert_eq!(p[1], 0.125);
        assert!((p[2] - 1.0 / 16.0).abs() < 1e-17);
        assert!(ssrw_first_passage_pmf(0).is_err());
    }
}
