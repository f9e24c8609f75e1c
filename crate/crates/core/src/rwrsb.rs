//! The cost process collected on bonds and its ladder values.
//!
//! Step `j` costs `eta_j = sum of zeta^+_k` over bonds `S_{j-1}+1..=S_j` when
//! `xi_j > 0`, nothing when `xi_j = 0`, and `sum of zeta^-_k` over bonds
//! `S_j+1..=S_{j-1}` when `xi_j < 0`.

use crate::error::{invalid, Result};
use crate::laws::SceneryLaw;
use crate::local_times::{compute, LocalTimes};
use crate::scenery_media::{coupled_even_law, even_part, BondField, Medium, SceneryRealization};
use crate::stats::CompensatedSum;
use crate::walk::{ladder_stats, LadderStats, PathRecord};

/// Named scenery couplings built from one spacing law `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    General,
    /// `(zeta^+, zeta^-) = (zeta, -zeta)`: ladder costs are `Y_{T_n}`.
    YLeapover,
    /// `(zeta, zeta)`: ladder costs are `L_{T_n}(Y)`.
    YLength,
    /// `(0, 2 zeta)`: the first ladder cost is the first-passage time of the
    /// continuous-time walk.
    ContinuousFpt,
}

impl Preset {
    /// `(a, b)` with `zeta^+ = a zeta`, `zeta^- = b zeta`.
    pub fn factors(self) -> Option<(f64, f64)> {
        match self {
            Preset::General => None,
            Preset::YLeapover => Some((1.0, -1.0)),
            Preset::YLength => Some((1.0, 1.0)),
            Preset::ContinuousFpt => Some((0.0, 2.0)),
        }
    }
}

fn times(law: &SceneryLaw, f: f64) -> Result<SceneryLaw> {
    if f == 0.0 {
        Ok(SceneryLaw::zero())
    } else if f > 0.0 {
        SceneryLaw::scaled(law.clone(), f)
    } else {
        Ok(SceneryLaw::negated(SceneryLaw::scaled(law.clone(), -f)?))
    }
}

/// Laws of `zeta^+` and `zeta^-`, possibly coupled through one field.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    preset: Preset,
    plus_law: SceneryLaw,
    minus_law: SceneryLaw,
    base: Option<SceneryLaw>,
}

impl CostSpec {
    /// Independent `zeta^+` and `zeta^-`.
    pub fn general(plus_law: SceneryLaw, minus_law: SceneryLaw) -> Self {
        CostSpec {
            preset: Preset::General,
            plus_law,
            minus_law,
            base: None,
        }
    }

    /// A coupled preset built from `zeta`.
    pub fn preset(preset: Preset, zeta: SceneryLaw) -> Result<Self> {
        let (a, b) = preset.factors().ok_or_else(|| {
            invalid(
                "preset",
                "the general preset needs explicit plus and minus laws",
            )
        })?;
        Ok(CostSpec {
            preset,
            plus_law: times(&zeta, a)?,
            minus_law: times(&zeta, b)?,
            base: Some(zeta),
        })
    }

    pub fn preset_kind(&self) -> Preset {
        self.preset
    }

    pub fn plus_law(&self) -> &SceneryLaw {
        &self.plus_law
    }

    pub fn minus_law(&self) -> &SceneryLaw {
        &self.minus_law
    }

    /// Law of the even part `zeta^0`; `None` for independent laws, whose
    /// even part is a convolution.
    pub fn even_law(&self) -> Option<SceneryLaw> {
        let (a, b) = self.preset.factors()?;
        coupled_even_law(self.base.as_ref()?, a, b).ok()
    }

    /// `gamma-hat` of `zeta^+`.
    pub fn gamma_hat_plus(&self) -> f64 {
        self.plus_law.gamma_hat()
    }

    /// `gamma-hat` of `zeta^0`.
    pub fn gamma_hat_zero(&self) -> f64 {
        match self.even_law() {
            Some(law) => law.gamma_hat(),
            None => self.plus_law.gamma_hat().min(self.minus_law.gamma_hat()),
        }
    }

    /// Scenery for path `index` under `seed`.
    ///
    /// Presets draw `zeta` from the same stream as [`Medium::from_law`], so the
    /// preset costs and the medium of the same `(seed, index)` agree.
    pub fn realize(&self, seed: u64, index: u64) -> SceneryRealization {
        match (self.preset.factors(), &self.base) {
            (Some((a, b)), Some(zeta)) => {
                SceneryRealization::coupled(Medium::spacing_field(zeta.clone(), seed, index), a, b)
            }
            _ => SceneryRealization::realize_indexed(
                self.plus_law.clone(),
                self.minus_law.clone(),
                seed,
                index,
            ),
        }
    }
}

/// How a cost sample was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Step-by-step sum of `eta_j`.
    Direct,
    /// Even part below the origin, windowed local times between ladder heights.
    LadderDecomposition,
    /// `sum_k N^+(k) zeta^+_k + N^-(k) zeta^-_k`.
    Directional,
}

/// Ladder costs `C_{T_1}, ..., C_{T_m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSample {
    pub ladder_costs: Vec<f64>,
    pub stats: LadderStats,
    pub route: Route,
}

fn check_path(path: &PathRecord) -> Result<LadderStats> {
    let (lo, hi) = path.range();
    BondField::check_range(lo + 1, hi)?;
    ladder_stats(path)
}

/// `eta_j` for the step from `a` to `b`.
pub fn step_cost(sc: &mut SceneryRealization, a: i64, b: i64) -> f64 {
    let mut acc = CompensatedSum::new();
    if b > a {
        (a + 1..=b).for_each(|k| acc.add(sc.plus(k)));
    } else {
        (b + 1..=a).for_each(|k| acc.add(sc.minus(k)));
    }
    acc.value()
}

/// Ladder costs by summing `eta_j` step by step.
pub fn cost_direct(path: &PathRecord, sc: &mut SceneryRealization) -> Result<CostSample> {
    let stats = check_path(path)?;
    let s = path.positions();
    let mut ladder_costs = Vec::with_capacity(stats.count());
    let mut total = CompensatedSum::new();
    let mut next = stats.ladder_times.iter().peekable();
    for j in 1..s.len() {
        if next.peek().is_none() {
            break;
        }
        total.add(step_cost(sc, s[j - 1], s[j]));
        if next.peek() == Some(&&j) {
            ladder_costs.push(total.value());
            next.next();
        }
    }
    Ok(CostSample {
        ladder_costs,
        stats,
        route: Route::Direct,
    })
}

fn weighted(
    lt: &LocalTimes,
    lo: i64,
    hi: i64,
    mut weight: impl FnMut(i64) -> f64,
    acc: &mut CompensatedSum,
) {
    for run in lt.runs_in(lo, hi) {
        let n = run.count() as f64;
        for k in run.first..=run.last {
            acc.add(n * weight(k));
        }
    }
}

/// Ladder costs from local times: for the `n`-th ladder,
/// `sum_{k <= 0} N_{(0,T_n]}(k) zeta^0_k`
/// `+ sum_{j < n} sum_{S_{T_{j-1}} < k <= S_{T_j}} N_{(T_j,T_n]}(k) zeta^0_k`
/// `+ sum_{0 < k <= S_{T_n}} zeta^+_k`.
pub fn cost_via_local_times(path: &PathRecord, sc: &mut SceneryRealization) -> Result<CostSample> {
    let stats = check_path(path)?;
    let mut ladder_costs = Vec::with_capacity(stats.count());
    for n in 1..=stats.count() {
        let tn = stats.ladder_times[n - 1];
        let mut acc = CompensatedSum::new();
        let lt = compute(path, 0, tn)?;
        weighted(&lt, i64::MIN, 0, |k| even_part(sc, k), &mut acc);
        let mut prev = 0i64;
        for j in 1..n {
            let (tj, hj) = (stats.ladder_times[j - 1], stats.ladder_heights[j - 1]);
            if tj < tn {
                let window = compute(path, tj, tn)?;
                weighted(&window, prev + 1, hj, |k| even_part(sc, k), &mut acc);
            }
            prev = hj;
        }
        (1..=stats.ladder_heights[n - 1]).for_each(|k| acc.add(sc.plus(k)));
        ladder_costs.push(acc.value());
    }
    Ok(CostSample {
        ladder_costs,
        stats,
        route: Route::LadderDecomposition,
    })
}

/// Ladder costs as `sum_k N^+(k) zeta^+_k + N^-(k) zeta^-_k` over `(0, T_n]`.
pub fn cost_directional(path: &PathRecord, sc: &mut SceneryRealization) -> Result<CostSample> {
    let stats = check_path(path)?;
    let mut ladder_costs = Vec::with_capacity(stats.count());
    for &tn in &stats.ladder_times {
        let lt = compute(path, 0, tn)?;
        let mut acc = CompensatedSum::new();
        for run in lt.runs() {
            let (u, d) = (run.up as f64, run.down as f64);
            for k in run.first..=run.last {
                let (p, m) = sc.pair(k);
                acc.add(u * p);
                acc.add(d * m);
            }
        }
        ladder_costs.push(acc.value());
    }
    Ok(CostSample {
        ladder_costs,
        stats,
        route: Route::Directional,
    })
}

/// `Y_{T_n}`, `L_{T_n}(Y)` and the first-passage time of the continuous walk.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedQuantities {
    /// `Y_{T_n} = omega_{S_{T_n}}`.
    pub y_heights: Vec<f64>,
    /// `L_{T_n}(Y) = sum_{j <= T_n} |omega_{S_j} - omega_{S_{j-1}}|`.
    pub y_lengths: Vec<f64>,
    /// `L_{T_1}(Y) - Y_{T_1}`, when the first ladder is complete.
    pub first_passage_time: Option<f64>,
    pub stats: LadderStats,
}

/// Evaluate the `Y`-process ladder functionals from the medium directly.
pub fn derived_quantities(path: &PathRecord, medium: &mut Medium) -> Result<DerivedQuantities> {
    let stats = check_path(path)?;
    let s = path.positions();
    let mut y_heights = Vec::with_capacity(stats.count());
    let mut y_lengths = Vec::with_capacity(stats.count());
    let mut length = CompensatedSum::new();
    let mut next = stats.ladder_times.iter().peekable();
    let mut prev = medium.omega(0)?;
    for (j, &sj) in s.iter().enumerate().skip(1) {
        if next.peek().is_none() {
            break;
        }
        let cur = medium.omega(sj)?;
        length.add((cur - prev).abs());
        prev = cur;
        if next.peek() == Some(&&j) {
            y_heights.push(cur);
            y_lengths.push(length.value());
            next.next();
        }
    }
    let first_passage_time = y_heights.first().zip(y_lengths.first()).map(|(h, l)| l - h);
    Ok(DerivedQuantities {
        y_heights,
        y_lengths,
        first_passage_time,
        stats,
    })
}
