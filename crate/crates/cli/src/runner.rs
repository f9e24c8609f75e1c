//! Task execution. Every path `i` draws from streams keyed by `(seed, i)`,
//! so results do not depend on the worker count.

use std::time::Instant;

use ladderlab::ensemble::{map_indexed, PartialRun};
use ladderlab::local_times::{compute, ladder_decomposition_total, verify_first_ladder_identities};
use ladderlab::rng::{path_stream, splitmix64, Domain};
use ladderlab::rwrsb::{cost_direct, cost_via_local_times, derived_quantities, step_cost};
use ladderlab::spitzer::{
    order_for, phi_factor, sb_lhs, sb_rhs, symmetric_identity, CostMap, JointLattice, Transform,
};
use ladderlab::tail::{check_against, fit_tail, Censoring, FitMethod, FitOptions, TailSample};
use ladderlab::walk::{first_ladder, ladder_stats, simulate_to_ladder};
use ladderlab::{
    CostSpec, JumpKind, JumpLaw, Medium, PathRecord, SceneryLaw, SceneryRealization, SlowlyVarying,
    TailPrediction,
};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, Quantity, Task};
use crate::report::{num, opt_num, Report, Row, Verdict};

/// Paths whose bond range exceeds this are left out of the cost-route checks.
pub const ROUTE_CHECK_BONDS: i64 = 1 << 20;
/// Paths per parallel batch.
const BATCH: u64 = 1 << 18;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] ladderlab::Error),
    #[error("worker panicked on path {index}: {message}")]
    WorkerPanic {
        index: u64,
        message: String,
        partial: Vec<Option<String>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    /// Fill the wall-time column. Off by default so reports are
    /// byte-identical across runs.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 1,
            timing: false,
        }
    }
}

/// Evaluate `f` over `0..n` in batches, keeping index order.
fn parallel<T, F>(n: u64, workers: usize, f: F) -> Result<Vec<T>, RunError>
where
    T: Send + std::fmt::Debug,
    F: Fn(u64) -> T + Sync,
{
    let mut out = Vec::with_capacity(n.min(1 << 24) as usize);
    let mut start = 0;
    while start < n {
        let len = BATCH.min(n - start);
        match map_indexed(len, workers, |i| f(start + i)) {
            Ok(v) => out.extend(v),
            Err(PartialRun {
                results,
                failed_index,
                message,
            }) => {
                let partial = out
                    .iter()
                    .map(|v| Some(format!("{v:?}")))
                    .chain(results.iter().map(|r| r.as_ref().map(|v| format!("{v:?}"))))
                    .collect();
                return Err(RunError::WorkerPanic {
                    index: start + failed_index,
                    message,
                    partial,
                });
            }
        }
        start += len;
    }
    Ok(out)
}

/// Run the configured task.
pub fn run(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Report, RunError> {
    run_task(cfg, cfg.task, opts)
}

pub fn run_task(cfg: &ExperimentConfig, task: Task, opts: RunOptions) -> Result<Report, RunError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match task {
        Task::VerifyIdentities => verify_identities(cfg, opts.workers)?,
        Task::SpitzerCheck => spitzer_check(cfg, opts.workers)?,
        Task::TailExperiment => tail_experiment(cfg, opts.workers)?,
        Task::Predict => prediction_rows(cfg)?,
    };
    if opts.timing {
        report.stamp_wall_time(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

#[derive(Debug, Default, Clone, Copy)]
struct PathCheck {
    truncated: bool,
    identity_violations: u64,
    window_violations: u64,
    decomposition_violations: u64,
    route_checked: bool,
    route_mismatches: u64,
    route_rel_diff: f64,
}

fn integer_scenery(seed: u64, index: u64) -> SceneryRealization {
    let key = splitmix64(seed ^ splitmix64(index));
    SceneryRealization::from_fns(
        move |k| (splitmix64(key ^ (k as u64)) % 16) as f64,
        move |k| (splitmix64(!key ^ (k as u64)) % 16) as f64,
    )
}

fn check_path(
    cfg: &ExperimentConfig,
    law: &JumpLaw,
    floats: Option<&(SceneryLaw, SceneryLaw)>,
    i: u64,
) -> PathCheck {
    let path = match simulate_to_ladder(
        law,
        cfg.n_ladders,
        path_stream(cfg.seed, Domain::Walk, i),
        cfg.max_steps as usize,
    ) {
        Ok(p) if !p.truncated() => p,
        _ => {
            return PathCheck {
                truncated: true,
                ..Default::default()
            }
        }
    };
    let mut c = PathCheck::default();
    match verify_first_ladder_identities(&path) {
        Ok(r) if r.passed() => {}
        _ => c.identity_violations += 1,
    }
    let n = path.len();
    let mid = n / 2;
    let additive = mid > 0
        && match (
            compute(&path, 0, n),
            compute(&path, 0, mid),
            compute(&path, mid, n),
        ) {
            (Ok(w), Ok(a), Ok(b)) => w.runs() == a.merged(&b).runs(),
            _ => false,
        };
    if !additive && n > 1 {
        c.window_violations += 1;
    }
    if let Ok(stats) = ladder_stats(&path) {
        for k in 1..=stats.count() {
            let excess =
                u128::from(stats.ladder_lengths[k - 1]) - stats.ladder_heights[k - 1] as u128;
            if ladder_decomposition_total(&path, &stats, k).ok() != Some(excess) {
                c.decomposition_violations += 1;
            }
        }
    } else {
        c.decomposition_violations += 1;
    }
    let (lo, hi) = path.range();
    if hi - lo <= ROUTE_CHECK_BONDS {
        c.route_checked = true;
        let a = cost_direct(&path, &mut integer_scenery(cfg.seed, i));
        let b = cost_via_local_times(&path, &mut integer_scenery(cfg.seed, i));
        match (a, b) {
            (Ok(a), Ok(b)) if a.ladder_costs == b.ladder_costs => {}
            _ => c.route_mismatches += 1,
        }
        if let Some((plus, minus)) = floats {
            let make =
                || SceneryRealization::realize_indexed(plus.clone(), minus.clone(), cfg.seed, i);
            match (
                cost_direct(&path, &mut make()),
                cost_via_local_times(&path, &mut make()),
            ) {
                (Ok(a), Ok(b)) => {
                    for (x, y) in a.ladder_costs.iter().zip(&b.ladder_costs) {
                        let rel = (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
                        c.route_rel_diff = c.route_rel_diff.max(rel);
                    }
                }
                _ => c.route_rel_diff = f64::INFINITY,
            }
        }
    }
    c
}

fn verify_identities(cfg: &ExperimentConfig, workers: usize) -> Result<Report, RunError> {
    let law = cfg.jump_law.build()?;
    let floats = match &cfg.scenery_laws {
        Some(p) => Some((
            p.plus.build("scenery_laws.plus")?,
            p.minus.build("scenery_laws.minus")?,
        )),
        None => None,
    };
    let checks = parallel(cfg.n_paths, workers, |i| {
        check_path(cfg, &law, floats.as_ref(), i)
    })?;
    let truncated = checks.iter().filter(|c| c.truncated).count() as f64 / checks.len() as f64;
    let sum = |f: fn(&PathCheck) -> u64| checks.iter().map(f).sum::<u64>();
    let gate = |violations: u64| {
        if truncated > cfg.max_censored_fraction {
            Verdict::Inconclusive
        } else {
            Verdict::from_pass(violations == 0)
        }
    };
    let mut report = Report::default();
    for (name, citation, v) in [
        (
            "first-ladder local-time identities",
            "identity.local-times",
            sum(|c| c.identity_violations),
        ),
        (
            "window additivity",
            "identity.local-times",
            sum(|c| c.window_violations),
        ),
        (
            "ladder decomposition",
            "identity.ladder-decomposition",
            sum(|c| c.decomposition_violations),
        ),
        (
            "cost routes on integer scenery",
            "identity.cost-routes",
            sum(|c| c.route_mismatches),
        ),
    ] {
        report.push(
            Row::new(format!("{name} violations"), citation, gate(v))
                .predicted("0")
                .measured(v.to_string())
                .tolerance("0")
                .censored(truncated),
        );
    }
    let checked = checks.iter().filter(|c| c.route_checked).count();
    report.push(
        Row::new(
            "paths with cost routes checked",
            "identity.cost-routes",
            Verdict::Info,
        )
        .measured(checked.to_string())
        .censored(truncated),
    );
    if floats.is_some() {
        let worst = checks.iter().map(|c| c.route_rel_diff).fold(0.0, f64::max);
        report.push(
            Row::new(
                "cost routes on float scenery max relative difference",
                "identity.cost-routes",
                gate(u64::from(!(worst <= 1e-9))),
            )
            .predicted("0")
            .measured(num(worst))
            .tolerance(num(1e-9))
            .censored(truncated),
        );
    }
    Ok(report)
}

fn spitzer_check(cfg: &ExperimentConfig, workers: usize) -> Result<Report, RunError> {
    let law = cfg.jump_law.build()?;
    let g: CostMap = cfg.cost_map.map(Into::into).unwrap_or(CostMap::Abs);
    let tr: Transform = cfg.transform.map(Into::into).unwrap_or(Transform::Fourier);
    let lat = JointLattice::new(&law, &g).map_err(|e| ConfigError {
        field: "jump_law".into(),
        reason: e.to_string(),
    })?;
    let grid = cfg.grid.as_ref().expect("validated");
    let points: Vec<(f64, f64, f64)> = grid
        .z
        .iter()
        .flat_map(|&z| {
            grid.s
                .iter()
                .flat_map(move |&s| grid.t.iter().map(move |&t| (z, s, t)))
        })
        .collect();
    let even = g.is_even_on(&law.support()?);
    let rows = parallel(points.len() as u64, workers, |i| {
        let (z, s, t) = points[i as usize];
        let mut rows = Vec::new();
        let n = order_for(z * lat.max_weight(s, tr), 1e-10);
        let label = format!("z={z} s={s} t={t}");
        match (sb_lhs(z, t, s, &lat, tr, n), sb_rhs(z, t, s, &lat, tr, n)) {
            (Ok(l), Ok(r)) => {
                let diff = (l.ladder.value - r.ladder.value).norm();
                let bound = l.ladder.bound + r.ladder.bound;
                rows.push(
                    Row::new(
                        format!("ladder vs series {label}"),
                        "identity.ladder-series",
                        Verdict::from_pass(diff <= bound && bound <= 1e-6),
                    )
                    .predicted(num(r.ladder.value.re))
                    .measured(num(l.ladder.value.re))
                    .tolerance(num(bound)),
                );
                let diff = (l.pre_passage.value - r.pre_passage.value).norm();
                let bound = l.pre_passage.bound + r.pre_passage.bound;
                rows.push(
                    Row::new(
                        format!("pre-passage sum {label}"),
                        "identity.ladder-series",
                        Verdict::from_pass(diff <= bound && bound <= 1e-6),
                    )
                    .predicted(num(r.pre_passage.value.re))
                    .measured(num(l.pre_passage.value.re))
                    .tolerance(num(bound)),
                );
            }
            (Err(e), _) | (_, Err(e)) => {
                rows.push(
                    Row::new(
                        format!("ladder vs series {label}"),
                        "identity.ladder-series",
                        Verdict::Fail,
                    )
                    .measured(e.to_string()),
                );
            }
        }
        if even && t == 0.0 {
            let row = match symmetric_identity(z, s, &law, &g, tr) {
                Ok(c) => Row::new(
                    format!("symmetric identity {label}"),
                    "identity.symmetric-generating",
                    Verdict::from_pass(c.residual() <= 1e-6),
                )
                .predicted(num(c.rhs.value.re))
                .measured(num(c.lhs.value.re))
                .tolerance(num(1e-6)),
                Err(e) => Row::new(
                    format!("symmetric identity {label}"),
                    "identity.symmetric-generating",
                    Verdict::Fail,
                )
                .measured(e.to_string()),
            };
            rows.push(row);
        }
        rows
    })?;
    let mut report = Report::default();
    rows.into_iter().flatten().for_each(|r| report.push(r));
    if law.kind() == JumpKind::SimpleSymmetric {
        for (z, want) in [
            (1.0, 2f64.sqrt()),
            (0.5, (2.0 / (1.0 + 0.75f64.sqrt())).sqrt()),
        ] {
            let got = phi_factor(z, 0.0, &law, &CostMap::Zero, Transform::Fourier)?
                .value
                .re;
            report.push(
                Row::new(
                    format!("phi({z}, 0)"),
                    "anchor.phi",
                    Verdict::from_pass((got - want).abs() <= 1e-8),
                )
                .predicted(num(want))
                .measured(num(got))
                .tolerance(num(1e-8)),
            );
        }
    }
    Ok(report)
}

/// One simulated value of the quantity for path `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Draw {
    Value(f64),
    /// Path stopped at the cap; the value is a lower bound.
    Censored(f64),
    /// Path stopped at the cap (or could not be realized) and no bound is
    /// available.
    Lost,
}

struct Sampler<'a> {
    cfg: &'a ExperimentConfig,
    law: JumpLaw,
    quantity: Quantity,
    medium: Option<SceneryLaw>,
    cost: Option<CostSpec>,
}

impl Sampler<'_> {
    fn walk(&self, i: u64) -> ladderlab::Result<PathRecord> {
        simulate_to_ladder(
            &self.law,
            self.cfg.n_ladders,
            path_stream(self.cfg.seed, Domain::Walk, i),
            self.cfg.max_steps as usize,
        )
    }

    fn draw(&self, i: u64) -> Draw {
        self.try_draw(i).unwrap_or(Draw::Lost)
    }

    fn try_draw(&self, i: u64) -> ladderlab::Result<Draw> {
        let n = self.cfg.n_ladders;
        let bounded = |v: f64, truncated: bool| {
            if truncated {
                Draw::Censored(v)
            } else {
                Draw::Value(v)
            }
        };
        match self.quantity {
            Quantity::LadderTime | Quantity::LadderLength | Quantity::LadderHeight => {
                let f = first_ladder(
                    &self.law,
                    path_stream(self.cfg.seed, Domain::Walk, i),
                    self.cfg.max_steps,
                )?;
                Ok(match self.quantity {
                    Quantity::LadderTime => bounded(f.time as f64, f.truncated),
                    Quantity::LadderLength => bounded(f.length as f64, f.truncated),
                    _ if f.truncated => Draw::Lost,
                    _ => Draw::Value(f.height as f64),
                })
            }
            Quantity::YHeight | Quantity::YLength | Quantity::FirstPassageX => {
                let path = self.walk(i)?;
                let mut medium =
                    Medium::from_law(self.medium.clone().expect("validated"), self.cfg.seed, i)?;
                if path.truncated() {
                    if self.quantity == Quantity::YHeight {
                        return Ok(Draw::Lost);
                    }
                    // L(Y) and L(Y) - Y are nondecreasing along the path
                    let (mut length, mut prev) = (0.0, medium.omega(0)?);
                    for &s in &path.positions()[1..] {
                        let cur = medium.omega(s)?;
                        length += (cur - prev).abs();
                        prev = cur;
                    }
                    let v = if self.quantity == Quantity::YLength {
                        length
                    } else {
                        length - prev
                    };
                    return Ok(Draw::Censored(v));
                }
                let d = derived_quantities(&path, &mut medium)?;
                Ok(Draw::Value(match self.quantity {
                    Quantity::YHeight => d.y_heights[n - 1],
                    Quantity::YLength => d.y_lengths[n - 1],
                    _ => d.first_passage_time.expect("complete first ladder"),
                }))
            }
            Quantity::LadderCost => {
                let path = self.walk(i)?;
                let spec = self.cost.as_ref().expect("validated");
                let mut sc = spec.realize(self.cfg.seed, i);
                if path.truncated() {
                    if !(spec.plus_law().is_nonnegative() && spec.minus_law().is_nonnegative()) {
                        return Ok(Draw::Lost);
                    }
                    let (lo, hi) = path.range();
                    ladderlab::scenery_media::BondField::check_range(lo + 1, hi)?;
                    let p = path.positions();
                    let total: f64 = p.windows(2).map(|w| step_cost(&mut sc, w[0], w[1])).sum();
                    return Ok(Draw::Censored(total));
                }
                Ok(Draw::Value(
                    cost_direct(&path, &mut sc)?.ladder_costs[n - 1],
                ))
            }
        }
    }
}

/// Simulated sample of the configured quantity.
pub fn sample_quantity(
    cfg: &ExperimentConfig,
    workers: usize,
) -> Result<(TailSample, usize), RunError> {
    let quantity = cfg.quantity.expect("validated");
    let sampler = Sampler {
        cfg,
        law: cfg.jump_law.build()?,
        quantity,
        medium: cfg
            .medium_law
            .as_ref()
            .map(|m| m.build("medium_law"))
            .transpose()?,
        cost: cfg.cost_spec_for(quantity)?,
    };
    let draws = parallel(cfg.n_paths, workers, |i| sampler.draw(i))?;
    let mut sample = TailSample::default();
    let mut lost = 0;
    for d in draws {
        match d {
            Draw::Value(v) if v > 0.0 => sample.push(v, false),
            Draw::Censored(v) if v > 0.0 => sample.push(v, true),
            // zero-valued draws sit below any tail threshold
            Draw::Value(_) | Draw::Censored(_) => sample.push(f64::MIN_POSITIVE, false),
            Draw::Lost => lost += 1,
        }
    }
    Ok((sample, lost))
}

fn exponent_text(p: &TailPrediction) -> String {
    match &p.bounds {
        Some(b) => format!("[{}, {}]", num(b.upper_exponent), opt_num(b.lower_exponent)),
        None => num(p.exponent),
    }
}

/// Fit options: the configured method, or Hill at `k = n / 100`; point
/// predictions with a log factor switch to regression with that factor.
pub fn fit_options(
    cfg: &ExperimentConfig,
    pred: &TailPrediction,
    sample: &TailSample,
) -> FitOptions {
    let (sv, prefer_regression) = match &pred.bounds {
        Some(b) => (b.lower_sv, false),
        None => (
            pred.slowly_varying,
            pred.slowly_varying != SlowlyVarying::None,
        ),
    };
    let censoring = cfg
        .censoring
        .map(Censoring::from)
        .unwrap_or(if sample.censored().is_empty() {
            Censoring::Exclude
        } else {
            Censoring::RightCensored
        });
    let n = sample.len();
    let method = match cfg.fit {
        Some(f) => f.method(),
        None if prefer_regression => {
            let mut obs = sample.observed().to_vec();
            obs.sort_by(f64::total_cmp);
            let at = |surv: f64| {
                obs[((1.0 - surv) * n as f64).clamp(0.0, (obs.len() - 1) as f64) as usize]
            };
            let cap = sample
                .censored()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            FitMethod::LogLog {
                x_lo: at(0.05),
                x_hi: at(200.0 / n as f64).min(0.5 * cap),
                points: 40,
            }
        }
        None => FitMethod::Hill {
            k: (n / 100).clamp(100, (n / 10).max(100)),
        },
    };
    FitOptions {
        method,
        sv,
        censoring,
    }
}

fn tail_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<Report, RunError> {
    let pred = cfg.prediction()?;
    let (mut sample, lost) = sample_quantity(cfg, workers)?;
    let censored = (sample.censored().len() + lost) as f64 / (sample.len() + lost) as f64;
    // lost paths count toward n but carry no value
    for _ in 0..lost {
        sample.push(f64::MIN_POSITIVE, false);
    }
    let q = cfg.quantity.expect("validated").name();
    let mut report = Report::default();
    let options = fit_options(cfg, &pred, &sample);
    let fit = match fit_tail(&sample, &options) {
        Ok(f) => f,
        Err(e) => {
            report.push(
                Row::new(format!("{q} exponent"), pred.source, Verdict::Inconclusive)
                    .predicted(exponent_text(&pred))
                    .measured(e.to_string())
                    .censored(censored),
            );
            return Ok(report);
        }
    };
    let v = check_against(&fit, &pred, cfg.tolerance, cfg.constant_tolerance);
    let gate = |pass: bool| {
        if censored > cfg.max_censored_fraction {
            Verdict::Inconclusive
        } else {
            Verdict::from_pass(pass)
        }
    };
    let tol = if pred.is_bracket() {
        cfg.tolerance
    } else {
        (2.0 * fit.exponent_se).max(cfg.tolerance)
    };
    report.push(
        Row::new(
            format!("{q} exponent"),
            pred.source,
            gate(v.exponent_pass && v.sv_compatible),
        )
        .predicted(exponent_text(&pred))
        .measured(num(fit.exponent_hat))
        .tolerance(num(tol))
        .censored(censored),
    );
    report.push(
        Row::new(
            format!("{q} exponent standard error"),
            pred.source,
            Verdict::Info,
        )
        .measured(num(fit.exponent_se))
        .censored(censored),
    );
    if let (Some(k), Some(rel)) = (pred.constant, cfg.constant_tolerance) {
        report.push(
            Row::new(
                format!("{q} constant"),
                pred.source,
                gate(v.constant_pass == Some(true)),
            )
            .predicted(num(k))
            .measured(opt_num(v.constant_measured))
            .tolerance(num(rel))
            .censored(censored),
        );
    }
    Ok(report)
}

fn prediction_rows(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let pred = cfg.prediction()?;
    let q = cfg.quantity.expect("validated").name();
    let mut report = Report::default();
    report.push(
        Row::new(format!("{q} exponent"), pred.source, Verdict::Info)
            .predicted(exponent_text(&pred)),
    );
    report.push(
        Row::new(format!("{q} constant"), pred.source, Verdict::Info)
            .predicted(opt_num(pred.constant)),
    );
    report.push(
        Row::new(
            format!("{q} slowly varying factor"),
            pred.source,
            Verdict::Info,
        )
        .predicted(pred.slowly_varying.tag()),
    );
    if let Some(b) = &pred.bounds {
        report.push(
            Row::new(format!("{q} bound constants"), pred.source, Verdict::Info).predicted(
                format!(
                    "[{}, {}]",
                    opt_num(b.upper_constant),
                    opt_num(b.lower_constant)
                ),
            ),
        );
        report.push(
            Row::new(
                format!("{q} bound slowly varying factors"),
                pred.source,
                Verdict::Info,
            )
            .predicted(format!("[{}, {}]", b.upper_sv, b.lower_sv)),
        );
    }
    if pred.ladder_index > 1 {
        report.push(
            Row::new(format!("{q} ladder index"), pred.source, Verdict::Info)
                .predicted(pred.ladder_index.to_string()),
        );
    }
    if pred.negligible {
        report.push(
            Row::new(
                format!("{q} negligible at this order"),
                pred.source,
                Verdict::Info,
            )
            .predicted("true"),
        );
    }
    Ok(report)
}
