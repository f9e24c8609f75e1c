//! Crossing counts of bonds by the walk.
//!
//! Bond `k` is the interval `[k - 1, k]`. Step `j` crosses bond `k` when
//! `[k - 1, k]` lies inside `[min(S_{j-1}, S_j), max(S_{j-1}, S_j)]`; the
//! crossing is upward (`N^+`) when `xi_j > 0` and downward (`N^-`) otherwise.
//! Counts are stored as maximal runs of consecutive bonds sharing the same
//! `(N^+, N^-)`, so a single long jump costs O(1) memory.

use crate::error::{invalid, Error, Result};
use crate::walk::{ladder_stats, LadderStats, PathRecord};

/// Paths whose bond range is at most this are counted with dense arrays.
pub const DENSE_LIMIT: u64 = 1 << 20;

/// Bonds `first..=last`, each crossed `up` times upward and `down` downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BondRun {
    pub first: i64,
    pub last: i64,
    pub up: u64,
    pub down: u64,
}

impl BondRun {
    pub fn count(&self) -> u64 {
        self.up + self.down
    }

    pub fn bonds(&self) -> u64 {
        (self.last - self.first) as u64 + 1
    }

    /// This run clipped to `lo..=hi`.
    fn clip(&self, lo: i64, hi: i64) -> Option<BondRun> {
        let first = self.first.max(lo);
        let last = self.last.min(hi);
        (first <= last).then_some(BondRun {
            first,
            last,
            ..*self
        })
    }
}

/// Local times `N(k)`, `N^+(k)`, `N^-(k)` over the window `(t0, tf]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTimes {
    runs: Vec<BondRun>,
    window: (usize, usize),
}

impl LocalTimes {
    /// Canonical runs, ordered by bond, nonzero counts only, adjacent runs
    /// with equal counts merged.
    pub fn runs(&self) -> &[BondRun] {
        &self.runs
    }

    pub fn window(&self) -> (usize, usize) {
        self.window
    }

    fn find(&self, k: i64) -> Option<&BondRun> {
        let i = self.runs.partition_point(|r| r.last < k);
        self.runs.get(i).filter(|r| r.first <= k)
    }

    /// `N(k)`.
    pub fn count(&self, k: i64) -> u64 {
        self.find(k).map_or(0, BondRun::count)
    }

    /// `N^+(k)`.
    pub fn up(&self, k: i64) -> u64 {
        self.find(k).map_or(0, |r| r.up)
    }

    /// `N^-(k)`.
    pub fn down(&self, k: i64) -> u64 {
        self.find(k).map_or(0, |r| r.down)
    }

    /// Runs clipped to bonds `lo..=hi`.
    pub fn runs_in(&self, lo: i64, hi: i64) -> impl Iterator<Item = BondRun> + '_ {
        let start = self.runs.partition_point(|r| r.last < lo);
        self.runs[start..]
            .iter()
            .take_while(move |r| r.first <= hi)
            .filter_map(move |r| r.clip(lo, hi))
    }

    /// `sum_{lo <= k <= hi} N(k)`.
    pub fn total_in(&self, lo: i64, hi: i64) -> u128 {
        self.runs_in(lo, hi)
            .map(|r| u128::from(r.count()) * u128::from(r.bonds()))
            .sum()
    }

    /// `sum_{k <= 0} N(k)`.
    pub fn total_nonpositive(&self) -> u128 {
        self.total_in(i64::MIN, 0)
    }

    /// `sum_{k > 0} N(k)`.
    pub fn total_positive(&self) -> u128 {
        self.total_in(1, i64::MAX)
    }

    /// Per-bond sum of two sets of local times (window union).
    pub fn merged(&self, other: &LocalTimes) -> LocalTimes {
        let mut events = Vec::with_capacity(2 * (self.runs.len() + other.runs.len()));
        for r in self.runs.iter().chain(&other.runs) {
            events.push((i128::from(r.first), r.up as i128, r.down as i128));
            events.push((i128::from(r.last) + 1, -(r.up as i128), -(r.down as i128)));
        }
        let lo = self.window.0.min(other.window.0);
        let hi = self.window.1.max(other.window.1);
        LocalTimes {
            runs: sweep(events),
            window: (lo, hi),
        }
    }
}

fn push_run(runs: &mut Vec<BondRun>, run: BondRun) {
    if run.up == 0 && run.down == 0 {
        return;
    }
    if let Some(prev) = runs.last_mut() {
        if prev.last + 1 == run.first && prev.up == run.up && prev.down == run.down {
            prev.last = run.last;
            return;
        }
    }
    runs.push(run);
}

// Events (bond, d_up, d_down) mark where counts change.
fn sweep(mut events: Vec<(i128, i128, i128)>) -> Vec<BondRun> {
    events.sort_unstable_by_key(|e| e.0);
    let mut runs = Vec::new();
    let (mut up, mut down) = (0i128, 0i128);
    let mut i = 0;
    while i < events.len() {
        let pos = events[i].0;
        while i < events.len() && events[i].0 == pos {
            up += events[i].1;
            down += events[i].2;
            i += 1;
        }
        if i < events.len() && (up != 0 || down != 0) {
            push_run(
                &mut runs,
                BondRun {
                    first: pos as i64,
                    last: (events[i].0 - 1) as i64,
                    up: up as u64,
                    down: down as u64,
                },
            );
        }
    }
    runs
}

// Bond interval crossed by a step from a to b, or None if a == b.
fn crossed(a: i64, b: i64) -> Option<(i64, i64, bool)> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some((a + 1, b, true)),
        std::cmp::Ordering::Greater => Some((b + 1, a, false)),
        std::cmp::Ordering::Equal => None,
    }
}

fn check_window(path: &PathRecord, t0: usize, tf: usize) -> Result<()> {
    if t0 >= tf || tf > path.len() {
        return Err(Error::Window {
            t0,
            tf,
            len: path.len(),
        });
    }
    Ok(())
}

/// Local times of `path` over the steps `t0 + 1..=tf`.
pub fn compute(path: &PathRecord, t0: usize, tf: usize) -> Result<LocalTimes> {
    check_window(path, t0, tf)?;
    let s = &path.positions()[t0..=tf];
    let lo = s.iter().copied().min().unwrap_or(0);
    let hi = s.iter().copied().max().unwrap_or(0);
    let span = (i128::from(hi) - i128::from(lo)) as u128;
    let runs = if span <= u128::from(DENSE_LIMIT) {
        dense_runs(s, lo, hi)
    } else {
        sparse_runs(s)
    };
    Ok(LocalTimes {
        runs,
        window: (t0, tf),
    })
}

/// Same as [`compute`] but always using the event sweep.
pub fn compute_sparse(path: &PathRecord, t0: usize, tf: usize) -> Result<LocalTimes> {
    check_window(path, t0, tf)?;
    Ok(LocalTimes {
        runs: sparse_runs(&path.positions()[t0..=tf]),
        window: (t0, tf),
    })
}

fn sparse_runs(s: &[i64]) -> Vec<BondRun> {
    let mut events = Vec::with_capacity(2 * s.len());
    for w in s.windows(2) {
        if let Some((a, b, up)) = crossed(w[0], w[1]) {
            let (du, dd) = if up { (1, 0) } else { (0, 1) };
            events.push((i128::from(a), du, dd));
            events.push((i128::from(b) + 1, -du, -dd));
        }
    }
    sweep(events)
}

fn dense_runs(s: &[i64], lo: i64, hi: i64) -> Vec<BondRun> {
    // bonds lo+1..=hi, plus one slot for the closing difference
    let n = (hi - lo) as usize;
    let mut d_up = vec![0i64; n + 1];
    let mut d_down = vec![0i64; n + 1];
    for w in s.windows(2) {
        if let Some((a, b, up)) = crossed(w[0], w[1]) {
            let (i, j) = ((a - lo - 1) as usize, (b - lo) as usize);
            let d = if up { &mut d_up } else { &mut d_down };
            d[i] += 1;
            d[j] -= 1;
        }
    }
    let mut runs = Vec::new();
    let (mut up, mut down) = (0i64, 0i64);
    for i in 0..n {
        up += d_up[i];
        down += d_down[i];
        let k = lo + 1 + i as i64;
        push_run(
            &mut runs,
            BondRun {
                first: k,
                last: k,
                up: up as u64,
                down: down as u64,
            },
        );
    }
    runs
}

/// Outcome of checking the first-ladder local-time identities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityReport {
    /// `N^+(k) = N^-(k)` for every `k <= 0`.
    pub balanced_below: bool,
    /// `sum_{k <= 0} N(k) = L_T - S_T`.
    pub excess_length: bool,
    /// `N(k) = 1` for `0 < k <= S_T` and `0` above.
    pub single_crossings_above: bool,
    /// `sum_{k > 0} N(k) = S_T`.
    pub height: bool,
    pub violations: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.balanced_below && self.excess_length && self.single_crossings_above && self.height
    }
}

/// Check the four first-ladder identities on the window `(0, T_1]`.
pub fn verify_first_ladder_identities(path: &PathRecord) -> Result<IdentityReport> {
    let stats = ladder_stats(path)?;
    let (Some(&t), Some(&height), Some(&length)) = (
        stats.ladder_times.first(),
        stats.ladder_heights.first(),
        stats.ladder_lengths.first(),
    ) else {
        return Err(invalid("path", "no complete first ladder"));
    };
    let lt = compute(path, 0, t)?;
    let mut report = IdentityReport::default();

    let unbalanced: Vec<_> = lt.runs_in(i64::MIN, 0).filter(|r| r.up != r.down).collect();
    report.balanced_below = unbalanced.is_empty();
    if let Some(r) = unbalanced.first() {
        report.violations.push(format!(
            "bonds {}..={}: up {} != down {}",
            r.first, r.last, r.up, r.down
        ));
    }

    let below = lt.total_nonpositive();
    let excess = u128::from(length) - height as u128;
    report.excess_length = below == excess;
    if !report.excess_length {
        report
            .violations
            .push(format!("sum below 0 is {below}, L - S is {excess}"));
    }

    let above: Vec<_> = lt.runs_in(1, i64::MAX).collect();
    let covered = above.first().map_or(height == 0, |r| r.first == 1) && above.len() <= 1;
    report.single_crossings_above = covered
        && above
            .iter()
            .all(|r| r.last == height && r.up == 1 && r.down == 0);
    if !report.single_crossings_above {
        report.violations.push(format!(
            "crossings above 0 are {above:?}, expected bonds 1..={height} once"
        ));
    }

    let total_above = lt.total_positive();
    report.height = total_above == height as u128;
    if !report.height {
        report
            .violations
            .push(format!("sum above 0 is {total_above}, S_T is {height}"));
    }
    Ok(report)
}

/// `sum_{k <= 0} N(k)^gamma`.
pub fn power_sum(lt: &LocalTimes, gamma: f64) -> f64 {
    lt.runs_in(i64::MIN, 0)
        .map(|r| r.bonds() as f64 * (r.count() as f64).powf(gamma))
        .sum()
}

/// Left side of the ladder decomposition identity for the `n`-th ladder:
/// `sum_{k <= 0} N_{(0,T_n]}(k)` plus, for `j = 1..n-1`,
/// `sum over k in (S_{T_{j-1}}, S_{T_j}]` of `N_{(T_j, T_n]}(k)`, with
/// `S_{T_0} = 0`. It equals `L_{T_n} - S_{T_n}`.
pub fn ladder_decomposition_total(
    path: &PathRecord,
    stats: &LadderStats,
    n: usize,
) -> Result<u128> {
    if n == 0 || n > stats.count() {
        return Err(invalid(
            "n",
            format!("ladder {n} not available ({} complete)", stats.count()),
        ));
    }
    let tn = stats.ladder_times[n - 1];
    let mut total = compute(path, 0, tn)?.total_nonpositive();
    let mut prev_height = 0i64;
    for j in 1..n {
        let tj = stats.ladder_times[j - 1];
        let hj = stats.ladder_heights[j - 1];
        if tj < tn {
            total += compute(path, tj, tn)?.total_in(prev_height + 1, hj);
        }
        prev_height = hj;
    }
    Ok(total)
}
