//! Tail estimation on simulated samples and comparison with predictions.

use rayon::slice::ParallelSliceMut;

use crate::error::{Error, Result};
use crate::predictions::{SlowlyVarying, TailPrediction};
use crate::stats::CompensatedSum;

/// Minimum sample size accepted by [`fit_tail`].
pub const MIN_SAMPLES: usize = 10_000;
/// Minimum number of order statistics for the Hill estimator.
pub const MIN_HILL_ORDER: usize = 100;
/// Minimum width of a regression window, in decades.
pub const MIN_DECADES: f64 = 1.5;

/// Right-continuous empirical survival function.
#[derive(Debug, Clone)]
pub struct Ccdf {
    sorted: Vec<f64>,
}

impl Ccdf {
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples strictly above `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|&v| v <= x);
        (self.sorted.len() - below) as f64 / self.sorted.len() as f64
    }

    /// Jump locations with the survival value just after each.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            let s = (self.sorted.len() - i - 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = s,
                _ => out.push((v, s)),
            }
        }
        out
    }
}

fn sorted_ascending(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Fit("NaN sample".into()));
    }
    let mut v = samples.to_vec();
    v.par_sort_unstable_by(f64::total_cmp);
    Ok(v)
}

pub fn empirical_ccdf(samples: &[f64]) -> Result<Ccdf> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples("empty sample".into()));
    }
    Ok(Ccdf {
        sorted: sorted_ascending(samples)?,
    })
}

/// Observed values together with right-censored ones. A censored entry is
/// a lower bound on the true value (the cap at which the path was stopped).
#[derive(Debug, Clone, Default)]
pub struct TailSample {
    observed: Vec<f64>,
    censored: Vec<f64>,
}

impl TailSample {
    pub fn new(observed: Vec<f64>) -> Self {
        TailSample {
            observed,
            censored: Vec::new(),
        }
    }

    pub fn with_censored(observed: Vec<f64>, censored: Vec<f64>) -> Self {
        TailSample { observed, censored }
    }

    pub fn push(&mut self, value: f64, censored: bool) {
        if censored {
            self.censored.push(value);
        } else {
            self.observed.push(value);
        }
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    pub fn censored(&self) -> &[f64] {
        &self.censored
    }

    pub fn len(&self) -> usize {
        self.observed.len() + self.censored.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn censored_fraction(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.censored.len() as f64 / self.len() as f64
        }
    }
}

impl From<Vec<f64>> for TailSample {
    fn from(v: Vec<f64>) -> Self {
        TailSample::new(v)
    }
}

/// How censored values enter the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Censoring {
    /// Censored values are dropped from the order statistics but counted as
    /// exceedances when fitting the constant.
    #[default]
    Exclude,
    /// Censored values enter the likelihood as right-censored observations.
    RightCensored,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMethod {
    Hill { k: usize },
    LogLog { x_lo: f64, x_hi: f64, points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Hill,
    LogLogRegression,
}

impl MethodKind {
    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Hill => "hill",
            MethodKind::LogLogRegression => "loglog-regression",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub method: FitMethod,
    /// Slowly varying factor divided out before fitting the constant (and,
    /// for regression, the exponent).
    pub sv: SlowlyVarying,
    pub censoring: Censoring,
}

impl FitOptions {
    pub fn hill(k: usize) -> Self {
        FitOptions {
            method: FitMethod::Hill { k },
            sv: SlowlyVarying::None,
            censoring: Censoring::Exclude,
        }
    }

    pub fn loglog(x_lo: f64, x_hi: f64) -> Self {
        FitOptions {
            method: FitMethod::LogLog {
                x_lo,
                x_hi,
                points: 40,
            },
            sv: SlowlyVarying::None,
            censoring: Censoring::Exclude,
        }
    }

    pub fn with_sv(mut self, sv: SlowlyVarying) -> Self {
        self.sv = sv;
        self
    }

    pub fn with_censoring(mut self, censoring: Censoring) -> Self {
        self.censoring = censoring;
        self
    }
}

/// Fitted tail `P(X > x) ~ constant * sv(x) * x^-exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    pub exponent_hat: f64,
    pub exponent_se: f64,
    pub constant_hat: Option<f64>,
    pub method: MethodKind,
    pub k_order: Option<usize>,
    pub x_range: Option<(f64, f64)>,
    pub censored_fraction: f64,
    pub sv: SlowlyVarying,
    pub sample_size: usize,
    /// `(ln x, ln(P(X > x) / sv(x)))` points the constant is fitted through.
    anchors: Vec<(f64, f64)>,
}

impl TailFit {
    /// Constant refitted through the anchors with the exponent held at `e`.
    pub fn constant_at(&self, e: f64) -> f64 {
        let mean: CompensatedSum = self.anchors.iter().map(|&(lx, ly)| ly + e * lx).sum();
        (mean.value() / self.anchors.len() as f64).exp()
    }
}

pub fn fit_tail(sample: &TailSample, options: &FitOptions) -> Result<TailFit> {
    let n = sample.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "{n} samples, need at least {MIN_SAMPLES}"
        )));
    }
    if sample
        .observed
        .iter()
        .chain(&sample.censored)
        .any(|&x| !(x > 0.0) || !x.is_finite())
    {
        return Err(Error::Fit(
            "tail samples must be positive and finite".into(),
        ));
    }
    let observed = sorted_ascending(&sample.observed)?;
    let censored = sorted_ascending(&sample.censored)?;
    match options.method {
        FitMethod::Hill { k } => hill(&observed, &censored, k, options),
        FitMethod::LogLog { x_lo, x_hi, points } => {
            loglog(&observed, &censored, x_lo, x_hi, points, options)
        }
    }
}

fn count_above(sorted: &[f64], x: f64) -> usize {
    sorted.len() - sorted.partition_point(|&v| v <= x)
}

fn hill(observed: &[f64], censored: &[f64], k: usize, options: &FitOptions) -> Result<TailFit> {
    let n = observed.len() + censored.len();
    if k < MIN_HILL_ORDER || k > n / 10 {
        return Err(Error::Fit(format!(
            "order {k} outside [{MIN_HILL_ORDER}, {}]",
            n / 10
        )));
    }
    let (exponent, se, threshold, exceed) = match options.censoring {
        Censoring::Exclude => {
            if k >= observed.len() {
                return Err(Error::InsufficientSamples(
                    "fewer uncensored samples than the order".into(),
                ));
            }
            let u = observed[observed.len() - 1 - k];
            let logs: CompensatedSum = observed[observed.len() - k..]
                .iter()
                .map(|&x| (x / u).ln())
                .sum();
            let s = logs.value();
            if !(s > 0.0) {
                return Err(Error::Fit(
                    "no tail above the threshold (constant sample)".into(),
                ));
            }
            let a = k as f64 / s;
            (a, a / (k as f64).sqrt(), u, k + count_above(censored, u))
        }
        Censoring::RightCensored => {
            // merge the top k + 1 of both lists
            let (mut i, mut j) = (observed.len(), censored.len());
            let mut top: Vec<(f64, bool)> = Vec::with_capacity(k + 1);
            while top.len() <= k {
                let take_obs = match (i, j) {
                    (0, 0) => break,
                    (0, _) => false,
                    (_, 0) => true,
                    _ => observed[i - 1] >= censored[j - 1],
                };
                if take_obs {
                    i -= 1;
                    top.push((observed[i], false));
                } else {
                    j -= 1;
                    top.push((censored[j], true));
                }
            }
            let u = top[k].0;
            let logs: CompensatedSum = top[..k].iter().map(|&(x, _)| (x / u).ln()).sum();
            let uncensored = top[..k].iter().filter(|t| !t.1).count();
            let s = logs.value();
            if !(s > 0.0) || uncensored == 0 {
                return Err(Error::Fit(
                    "no tail above the threshold (constant sample)".into(),
                ));
            }
            let a = uncensored as f64 / s;
            (a, a / (uncensored as f64).sqrt(), u, k)
        }
    };
    let p = exceed as f64 / n as f64;
    let anchor = (threshold.ln(), (p / sv_at(options.sv, threshold)?).ln());
    let mut fit = TailFit {
        exponent_hat: exponent,
        exponent_se: se,
        constant_hat: None,
        method: MethodKind::Hill,
        k_order: Some(k),
        x_range: None,
        censored_fraction: censored.len() as f64 / n as f64,
        sv: options.sv,
        sample_size: n,
        anchors: vec![anchor],
    };
    fit.constant_hat = Some(fit.constant_at(exponent));
    Ok(fit)
}

fn sv_at(sv: SlowlyVarying, x: f64) -> Result<f64> {
    let v = sv.eval(x);
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::DegenerateWindow(format!(
            "slowly varying factor {sv} vanishes at {x}"
        )));
    }
    Ok(v)
}

fn loglog(
    observed: &[f64],
    censored: &[f64],
    x_lo: f64,
    x_hi: f64,
    points: usize,
    options: &FitOptions,
) -> Result<TailFit> {
    let n = observed.len() + censored.len();
    if !(x_lo > 0.0 && x_hi > x_lo) || (x_hi / x_lo).log10() < MIN_DECADES {
        return Err(Error::DegenerateWindow(format!(
            "window [{x_lo}, {x_hi}] spans less than {MIN_DECADES} decades"
        )));
    }
    if points < 3 {
        return Err(Error::DegenerateWindow(
            "need at least 3 grid points".into(),
        ));
    }
    if let Some(&cap) = censored.first() {
        if x_hi >= cap {
            return Err(Error::DegenerateWindow(format!(
                "window reaches the censoring level {cap}"
            )));
        }
    }
    let top_count = count_above(observed, x_hi) + censored.len();
    if top_count < 10 {
        return Err(Error::DegenerateWindow(format!(
            "only {top_count} samples above {x_hi}"
        )));
    }
    let (l0, l1) = (x_lo.ln(), x_hi.ln());
    let mut anchors = Vec::with_capacity(points);
    for i in 0..points {
        let lx = l0 + (l1 - l0) * i as f64 / (points - 1) as f64;
        let x = lx.exp();
        let p = (count_above(observed, x) + censored.len()) as f64 / n as f64;
        anchors.push((lx, (p / sv_at(options.sv, x)?).ln()));
    }
    let m = points as f64;
    let mx = anchors.iter().map(|a| a.0).sum::<f64>() / m;
    let my = anchors.iter().map(|a| a.1).sum::<f64>() / m;
    let sxx: f64 = anchors.iter().map(|a| (a.0 - mx).powi(2)).sum();
    let sxy: f64 = anchors.iter().map(|a| (a.0 - mx) * (a.1 - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = anchors
        .iter()
        .map(|a| (a.1 - my - slope * (a.0 - mx)).powi(2))
        .sum();
    let reg_se = (resid / (m - 2.0) / sxx).sqrt();
    let exponent = -slope;
    if !(exponent > 0.0) {
        return Err(Error::Fit(format!("non-decaying tail, slope {slope}")));
    }
    // grid points share samples, so the regression SE alone is optimistic
    let se = reg_se.max(exponent / (top_count as f64).sqrt());
    let mut fit = TailFit {
        exponent_hat: exponent,
        exponent_se: se,
        constant_hat: None,
        method: MethodKind::LogLogRegression,
        k_order: None,
        x_range: Some((x_lo, x_hi)),
        censored_fraction: censored.len() as f64 / n as f64,
        sv: options.sv,
        sample_size: n,
        anchors,
    };
    fit.constant_hat = Some(fit.constant_at(exponent));
    Ok(fit)
}

/// Full comparison record of a fit against a prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub exponent_pass: bool,
    pub constant_pass: Option<bool>,
    pub sv_compatible: bool,
    pub measured: f64,
    pub predicted: f64,
    /// Accepted interval for the measured exponent.
    pub interval: (f64, f64),
    pub constant_measured: Option<f64>,
    pub constant_predicted: Option<f64>,
    pub constant_rel_error: Option<f64>,
}

/// Compare a fit with a prediction.
///
/// Point predictions pass when `|exponent_hat - exponent| <= max(2 SE, tol)`;
/// brackets when `exponent_hat` lies in `[upper - tol, lower + tol]`. The
/// constant is compared at the predicted exponent, when both sides carry one
/// and `constant_rel_tol` is given.
pub fn check_against(
    fit: &TailFit,
    pred: &TailPrediction,
    tol: f64,
    constant_rel_tol: Option<f64>,
) -> Verdict {
    let e = fit.exponent_hat;
    let (interval, sv_compatible) = match &pred.bounds {
        Some(b) => (
            (
                b.upper_exponent - tol,
                b.lower_exponent.map_or(f64::INFINITY, |l| l + tol),
            ),
            fit.sv == b.upper_sv || fit.sv == b.lower_sv,
        ),
        None => {
            let w = (2.0 * fit.exponent_se).max(tol);
            let hi = if pred.negligible {
                f64::INFINITY
            } else {
                pred.exponent + w
            };
            ((pred.exponent - w, hi), fit.sv == pred.slowly_varying)
        }
    };
    let exponent_pass = e >= interval.0 && e <= interval.1;
    let constant_measured = pred.constant.map(|_| fit.constant_at(pred.exponent));
    let constant_rel_error = pred
        .constant
        .zip(constant_measured)
        .map(|(p, m)| (m - p) / p);
    let constant_pass = constant_rel_tol
        .zip(constant_rel_error)
        .map(|(t, r)| r.abs() <= t);
    Verdict {
        pass: sv_compatible && exponent_pass && constant_pass.unwrap_or(true),
        exponent_pass,
        constant_pass,
        sv_compatible,
        measured: e,
        predicted: pred.exponent,
        interval,
        constant_measured,
        constant_predicted: pred.constant,
        constant_rel_error,
    }
}
