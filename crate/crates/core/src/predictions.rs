//! Closed-form tail predictions for ladder variables and ladder costs.
//!
//! Survival functions are predicted in the form
//! `P(X > x) ~ constant * sv(x) * x^(-exponent)` where `sv` is a power of
//! `log x`. When only bounds are known the prediction carries both
//! exponents: the lower bound decays at least as fast as the upper bound.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laws::{JumpLaw, SceneryLaw};
use crate::special::gamma;
use crate::stats::MeanSe;

/// Slowly varying factor `(log x)^p`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SlowlyVarying {
    #[default]
    None,
    SqrtLog,
    Log,
    Log3Half,
    LogPower(f64),
}

impl SlowlyVarying {
    pub fn from_power(p: f64) -> Self {
        match p {
            0.0 => SlowlyVarying::None,
            0.5 => SlowlyVarying::SqrtLog,
            1.0 => SlowlyVarying::Log,
            1.5 => SlowlyVarying::Log3Half,
            p => SlowlyVarying::LogPower(p),
        }
    }

    pub fn log_power(self) -> f64 {
        match self {
            SlowlyVarying::None => 0.0,
            SlowlyVarying::SqrtLog => 0.5,
            SlowlyVarying::Log => 1.0,
            SlowlyVarying::Log3Half => 1.5,
            SlowlyVarying::LogPower(p) => p,
        }
    }

    /// `(log x)^p` for `x > 1`.
    pub fn eval(self, x: f64) -> f64 {
        let p = self.log_power();
        if p == 0.0 {
            1.0
        } else {
            x.ln().powf(p)
        }
    }

    pub fn tag(self) -> String {
        match self {
            SlowlyVarying::None => "none".into(),
            SlowlyVarying::SqrtLog => "sqrt-log".into(),
            SlowlyVarying::Log => "log".into(),
            SlowlyVarying::Log3Half => "log-3/2".into(),
            SlowlyVarying::LogPower(p) => format!("log^{p}"),
        }
    }
}

impl fmt::Display for SlowlyVarying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Two-sided bracket `lower(x) <= P(X > x) <= upper(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBounds {
    /// Exponent of the lower bound; `None` when only the upper bound holds.
    pub lower_exponent: Option<f64>,
    pub upper_exponent: f64,
    pub lower_sv: SlowlyVarying,
    pub upper_sv: SlowlyVarying,
    pub lower_constant: Option<f64>,
    pub upper_constant: Option<f64>,
}

/// Predicted tail of a survival function.
#[derive(Debug, Clone, PartialEq)]
pub struct TailPrediction {
    /// Decay exponent; for brackets, the exponent of the upper bound.
    pub exponent: f64,
    pub constant: Option<f64>,
    pub slowly_varying: SlowlyVarying,
    pub bounds: Option<TailBounds>,
    /// Citation key of the result the prediction encodes.
    pub source: &'static str,
    /// Ladder index `n`; tails of the `n`-th ladder cost scale with `n`.
    pub ladder_index: usize,
    /// The displayed asymptotic is to be read as `o(x^-exponent)`.
    pub negligible: bool,
    /// Finite-mean flag, where the result states one.
    pub finite_mean: Option<bool>,
}

impl TailPrediction {
    fn point(
        source: &'static str,
        exponent: f64,
        constant: Option<f64>,
        sv: SlowlyVarying,
    ) -> Self {
        TailPrediction {
            exponent,
            constant,
            slowly_varying: sv,
            bounds: None,
            source,
            ladder_index: 1,
            negligible: false,
            finite_mean: None,
        }
    }

    fn bracket(source: &'static str, bounds: TailBounds) -> Self {
        TailPrediction {
            exponent: bounds.upper_exponent,
            constant: None,
            slowly_varying: bounds.upper_sv,
            bounds: Some(bounds),
            source,
            ladder_index: 1,
            negligible: false,
            finite_mean: None,
        }
    }

    pub fn is_bracket(&self) -> bool {
        self.bounds.is_some()
    }
}

/// Small-argument behaviour of an even cost increment's characteristic
/// function, one variant per admissible shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvenCostTail {
    /// `1 + i nu s`, `nu > 0`.
    Drift { nu: f64 },
    /// `1 - c1 s^gamma`, `gamma` in `(0, 1]`, `Re c1 > 0`.
    Stable { gamma: f64, c1: Complex64 },
    /// `1 + i c2 s log(1/s)`, `c2 > 0`.
    LogDrift { c2: f64 },
    /// `1 - c3 s^gamma`, `gamma` in `(1, 2]`, `c3 > 0`.
    Symmetric { gamma: f64, c3: f64 },
}

/// Tail of the medium spacing law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MediumTail {
    /// `gamma` in `(1, 2]` with mean `mu`.
    FiniteMean { gamma: f64, mu: f64 },
    /// `gamma` in `(0, 1)` with Laplace coefficient `c`:
    /// `E exp(-s zeta) = 1 - c s^gamma + o(s^gamma)`.
    Heavy { gamma: f64, c: f64, stable: bool },
}

impl MediumTail {
    /// Read the tail shape off a positive spacing law.
    pub fn of(law: &SceneryLaw) -> Result<Self> {
        let g = law.gamma();
        if !law.is_positive() {
            return Err(Error::Domain("medium spacings must be positive".into()));
        }
        if g > 1.0 {
            let mu = law
                .mean()
                .ok_or_else(|| Error::Domain("spacing law has no finite mean".into()))?;
            Ok(MediumTail::FiniteMean {
                gamma: g.min(2.0),
                mu,
            })
        } else {
            let c = law
                .laplace_coefficient()
                .ok_or_else(|| Error::Domain("spacing law has no Laplace coefficient".into()))?;
            Ok(MediumTail::Heavy {
                gamma: g,
                c,
                stable: law.is_stable(),
            })
        }
    }
}

/// Walk parameters shared by several predictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkTail {
    pub beta: f64,
    pub nu: f64,
    /// `E|xi|`, finite exactly when `beta > 1`.
    pub mean_abs: Option<f64>,
}

impl WalkTail {
    pub fn of(law: &JumpLaw) -> Self {
        let (beta, nu) = law.expansion_params();
        WalkTail {
            beta,
            nu,
            mean_abs: law.mean_abs(),
        }
    }

    fn beta_hat(&self) -> f64 {
        self.beta.min(1.0)
    }
}

/// Which result to evaluate. `phi` is `Phi(1, 0)` for the walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictionSource {
    /// First-ladder length `L_T` of the walk.
    LadderLength { walk: WalkTail, phi: f64 },
    /// First-ladder height `S_T`.
    LadderHeight { walk: WalkTail, phi: f64 },
    /// First-ladder cost for an even cost function of the jump.
    EvenCost { tail: EvenCostTail, phi: f64 },
    /// First-ladder cost for an odd cost function of the jump with
    /// `phi_eta(s) = 1 - c4 s^gamma`.
    OddCost {
        gamma: f64,
        c4: f64,
        nonnegative: bool,
        phi: f64,
    },
    /// `n`-th ladder cost on bonds with the given `gamma-hat` of `zeta^+`
    /// and `zeta^0` (`+inf` for a zero law).
    LadderCost {
        gamma_hat_plus: f64,
        gamma_hat_zero: f64,
        beta: f64,
        zero_stable: bool,
        n: usize,
    },
    /// Ladder height `Y_T` in a medium.
    YHeight {
        walk: WalkTail,
        medium: MediumTail,
        phi: f64,
    },
    /// Ladder length `L_T(Y)` in a medium.
    YLength {
        walk: WalkTail,
        medium: MediumTail,
        phi: f64,
    },
    /// First-passage time of the continuous-time walk in a medium.
    FirstPassageX { beta: f64, gamma: f64 },
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(domain(format!("walk index {beta} outside (0, 2]")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 2.0) || gamma == 1.0 {
        return Err(domain(format!(
            "medium index {gamma} outside (0, 2] minus {{1}}"
        )));
    }
    Ok(())
}

/// Evaluate a prediction.
pub fn predict(source: PredictionSource) -> Result<TailPrediction> {
    match source {
        PredictionSource::LadderLength { walk, phi } => ladder_length(walk, phi),
        PredictionSource::LadderHeight { walk, phi } => ladder_height(walk, phi),
        PredictionSource::EvenCost { tail, phi } => even_cost(tail, phi),
        PredictionSource::OddCost {
            gamma,
            c4,
            nonnegative,
            phi,
        } => odd_cost(gamma, c4, nonnegative, phi),
        PredictionSource::LadderCost {
            gamma_hat_plus,
            gamma_hat_zero,
            beta,
            zero_stable,
            n,
        } => ladder_cost(gamma_hat_plus, gamma_hat_zero, beta, zero_stable, n),
        PredictionSource::YHeight { walk, medium, phi } => y_height(walk, medium, phi),
        PredictionSource::YLength { walk, medium, phi } => y_length(walk, medium, phi),
        PredictionSource::FirstPassageX { beta, gamma } => first_passage_x(beta, gamma),
    }
}

fn ladder_length(walk: WalkTail, phi: f64) -> Result<TailPrediction> {
    check_beta(walk.beta)?;
    let bh = walk.beta_hat();
    let g = gamma(1.0 - bh / 2.0);
    let (c, sv) = if walk.beta < 1.0 {
        (walk.nu / (PI * bh / 2.0).cos(), SlowlyVarying::None)
    } else if walk.beta == 1.0 {
        (2.0 * walk.nu / PI, SlowlyVarying::SqrtLog)
    } else {
        let m = walk
            .mean_abs
            .ok_or_else(|| domain("E|xi| must be finite for beta > 1"))?;
        (m, SlowlyVarying::None)
    };
    Ok(TailPrediction::point(
        "tail.ladder-length",
        bh / 2.0,
        Some(c.sqrt() * phi / g),
        sv,
    ))
}

fn ladder_height(walk: WalkTail, phi: f64) -> Result<TailPrediction> {
    check_beta(walk.beta)?;
    if walk.beta == 2.0 {
        return Ok(TailPrediction::point(
            "tail.ladder-height",
            1.0,
            None,
            SlowlyVarying::None,
        ));
    }
    let k = walk.nu.sqrt() * phi / gamma(1.0 - walk.beta / 2.0);
    Ok(TailPrediction::point(
        "tail.ladder-height",
        walk.beta / 2.0,
        Some(k),
        SlowlyVarying::None,
    ))
}

/// `p_+` of the stable even-cost case, before clamping.
pub fn stable_cost_split(gamma_: f64, c1: Complex64) -> f64 {
    let half = 0.5 * (c1.im / c1.re).atan();
    0.5 * (1.0 - half.sin() / (half.cos() * (PI * gamma_ / 4.0).tan()))
}

fn even_cost(tail: EvenCostTail, phi: f64) -> Result<TailPrediction> {
    const SRC: &str = "tail.even-cost";
    match tail {
        EvenCostTail::Drift { nu } => {
            if !(nu > 0.0) {
                return Err(domain("drift coefficient must be positive"));
            }
            Ok(TailPrediction::point(
                SRC,
                0.5,
                Some((nu / PI).sqrt() * phi),
                SlowlyVarying::None,
            ))
        }
        EvenCostTail::Stable { gamma: g, c1 } => {
            if !(g > 0.0 && g <= 1.0) {
                return Err(domain(format!("index {g} outside (0, 1]")));
            }
            if !(c1.re > 0.0) {
                return Err(domain("Re c1 must be positive"));
            }
            let half = 0.5 * (c1.im / c1.re).atan();
            let c = phi / (PI * g / 4.0).cos() * c1.norm().sqrt() * half.cos();
            let raw = stable_cost_split(g, c1);
            const SLACK: f64 = 1e-12;
            if !(-SLACK..=1.0 + SLACK).contains(&raw) {
                return Err(domain(format!("split p_+ = {raw} outside [0, 1]")));
            }
            let p = raw.clamp(0.0, 1.0);
            let mut pred = TailPrediction::point(SRC, g / 2.0, None, SlowlyVarying::None);
            if p <= SLACK {
                pred.negligible = true;
            } else {
                pred.constant = Some(c * p / gamma(1.0 - g / 2.0));
            }
            Ok(pred)
        }
        EvenCostTail::LogDrift { c2 } => {
            if !(c2 > 0.0) {
                return Err(domain("log-drift coefficient must be positive"));
            }
            Ok(TailPrediction::point(
                SRC,
                0.5,
                Some((c2 / PI).sqrt() * phi),
                SlowlyVarying::SqrtLog,
            ))
        }
        EvenCostTail::Symmetric { gamma: g, c3 } => {
            if !(g > 1.0 && g <= 2.0) || !(c3 > 0.0) {
                return Err(domain(format!(
                    "index {g} outside (1, 2] or nonpositive c3"
                )));
            }
            // at index 2 the displayed constant is divided by Gamma(0)
            let constant = (g < 2.0).then(|| {
                let c = phi * c3.sqrt() / (PI * g / 4.0).cos();
                c / (2.0 * gamma(1.0 - g / 2.0))
            });
            Ok(TailPrediction::point(
                SRC,
                g / 2.0,
                constant,
                SlowlyVarying::None,
            ))
        }
    }
}

fn odd_cost(g: f64, c4: f64, nonnegative: bool, phi: f64) -> Result<TailPrediction> {
    if !(g > 0.0 && g < 2.0) {
        return Err(domain(format!(
            "index {g} outside (0, 2); index 2 is inconclusive"
        )));
    }
    if !(c4 > 0.0) {
        return Err(domain("c4 must be positive"));
    }
    let constant = nonnegative.then(|| phi * c4.sqrt() / gamma(1.0 - g / 2.0));
    Ok(TailPrediction::point(
        "tail.odd-cost",
        g / 2.0,
        constant,
        SlowlyVarying::None,
    ))
}

fn ladder_cost(gp: f64, g0: f64, beta: f64, zero_stable: bool, n: usize) -> Result<TailPrediction> {
    const SRC: &str = "tail.ladder-cost";
    check_beta(beta)?;
    if n == 0 {
        return Err(domain("ladder index starts at 1"));
    }
    for g in [gp, g0] {
        if !(g.is_infinite() || (g > 0.0 && g <= 1.0)) {
            return Err(domain(format!("gamma-hat {g} outside (0, 1] or +inf")));
        }
    }
    if gp.is_infinite() && g0.is_infinite() {
        return Err(domain(
            "both scenery laws vanish; the cost is identically 0",
        ));
    }
    let bh = beta.min(1.0);
    let rho_p = gp * beta;
    let rho_0 = g0 * bh;
    let sqrt_if = |cond: bool| {
        if cond {
            SlowlyVarying::SqrtLog
        } else {
            SlowlyVarying::None
        }
    };
    let mut pred = if rho_p < rho_0 {
        TailPrediction::point(SRC, rho_p / 2.0, None, SlowlyVarying::None)
    } else if rho_p > rho_0 && g0 == 1.0 {
        TailPrediction::point(SRC, rho_0 / 2.0, None, sqrt_if(beta == 1.0))
    } else if rho_p == rho_0 && g0 == 1.0 {
        let sv = sqrt_if(beta == 1.0);
        TailPrediction::bracket(
            SRC,
            TailBounds {
                lower_exponent: Some((g0).min(rho_p / 2.0).min(bh / 2.0)),
                upper_exponent: rho_0 / 2.0,
                lower_sv: sv,
                upper_sv: sv,
                lower_constant: None,
                upper_constant: None,
            },
        )
    } else {
        // rho_+ >= rho_0 with gamma-hat_0 in (0, 1)
        let lower_exp = g0.min(rho_p / 2.0).min(bh / 2.0);
        let lower_holds = zero_stable || gp.is_infinite();
        TailPrediction::bracket(
            SRC,
            TailBounds {
                lower_exponent: lower_holds.then_some(lower_exp),
                upper_exponent: rho_0 / 2.0,
                lower_sv: sqrt_if(beta == 1.0 && lower_exp == bh / 2.0),
                upper_sv: sqrt_if(beta == 1.0),
                lower_constant: None,
                upper_constant: None,
            },
        )
    };
    pred.ladder_index = n;
    Ok(pred)
}

fn y_height(walk: WalkTail, medium: MediumTail, phi: f64) -> Result<TailPrediction> {
    const SRC: &str = "tail.y-height";
    check_beta(walk.beta)?;
    match medium {
        MediumTail::FiniteMean { gamma: g, mu } => {
            check_gamma(g)?;
            if walk.beta == 2.0 {
                return Ok(TailPrediction::point(SRC, 1.0, None, SlowlyVarying::None));
            }
            let k = walk.nu.sqrt() * mu.powf(walk.beta / 2.0) * phi / gamma(1.0 - walk.beta / 2.0);
            Ok(TailPrediction::point(
                SRC,
                walk.beta / 2.0,
                Some(k),
                SlowlyVarying::None,
            ))
        }
        MediumTail::Heavy { gamma: g, c, .. } => {
            check_gamma(g)?;
            let e = g * walk.beta / 2.0;
            let k = walk.nu.sqrt() * c.powf(walk.beta / 2.0) * phi / gamma(1.0 - e);
            Ok(TailPrediction::point(SRC, e, Some(k), SlowlyVarying::None))
        }
    }
}

fn y_length(walk: WalkTail, medium: MediumTail, phi: f64) -> Result<TailPrediction> {
    const SRC: &str = "tail.y-length";
    check_beta(walk.beta)?;
    let beta = walk.beta;
    match medium {
        MediumTail::FiniteMean { gamma: g, .. } => {
            check_gamma(g)?;
            if beta > 1.0 {
                Ok(TailPrediction::point(SRC, 0.5, None, SlowlyVarying::None))
            } else if beta == 1.0 {
                Ok(TailPrediction::point(
                    SRC,
                    0.5,
                    None,
                    SlowlyVarying::SqrtLog,
                ))
            } else {
                Ok(TailPrediction::bracket(
                    SRC,
                    TailBounds {
                        lower_exponent: Some(beta / 2.0),
                        upper_exponent: beta / 2.0,
                        lower_sv: SlowlyVarying::None,
                        upper_sv: SlowlyVarying::None,
                        lower_constant: None,
                        upper_constant: None,
                    },
                ))
            }
        }
        MediumTail::Heavy {
            gamma: g,
            c,
            stable,
        } => {
            check_gamma(g)?;
            if !stable {
                return Err(domain(
                    "the length bounds for gamma < 1 assume a stable medium",
                ));
            }
            let bounds = if beta > 1.0 {
                let m = walk
                    .mean_abs
                    .ok_or_else(|| domain("E|xi| must be finite for beta > 1"))?;
                TailBounds {
                    lower_exponent: Some(0.5f64.min(g * beta / 2.0)),
                    upper_exponent: g / 2.0,
                    lower_sv: SlowlyVarying::None,
                    upper_sv: SlowlyVarying::None,
                    lower_constant: None,
                    upper_constant: Some((m * c).sqrt() * phi / gamma(1.0 - g / 2.0)),
                }
            } else if beta == 1.0 {
                let gg = gamma(1.0 - g / 2.0);
                TailBounds {
                    lower_exponent: Some(g / 2.0),
                    upper_exponent: g / 2.0,
                    lower_sv: SlowlyVarying::None,
                    upper_sv: SlowlyVarying::SqrtLog,
                    lower_constant: Some((walk.nu * c).sqrt() * phi / gg),
                    upper_constant: Some((2.0 * walk.nu * c * g / PI).sqrt() * phi / gg),
                }
            } else {
                let e = g * beta / 2.0;
                let common = c.powf(beta / 2.0) * phi / gamma(1.0 - e);
                TailBounds {
                    lower_exponent: Some(e),
                    upper_exponent: e,
                    lower_sv: SlowlyVarying::None,
                    upper_sv: SlowlyVarying::None,
                    lower_constant: Some(walk.nu.sqrt() * common),
                    upper_constant: Some((walk.nu / (PI * beta / 2.0).cos()).sqrt() * common),
                }
            };
            Ok(TailPrediction::bracket(SRC, bounds))
        }
    }
}

fn first_passage_x(beta: f64, g: f64) -> Result<TailPrediction> {
    const SRC: &str = "tail.first-passage-x";
    check_beta(beta)?;
    check_gamma(g)?;
    if g > 1.0 {
        return Ok(if beta > 1.0 {
            TailPrediction::point(SRC, 0.5, None, SlowlyVarying::None)
        } else if beta == 1.0 {
            TailPrediction::point(SRC, 0.5, None, SlowlyVarying::SqrtLog)
        } else {
            TailPrediction::point(SRC, beta / 2.0, None, SlowlyVarying::None)
        });
    }
    let bounds = if beta > 1.0 {
        TailBounds {
            lower_exponent: Some(g.min(0.5)),
            upper_exponent: g / 2.0,
            lower_sv: SlowlyVarying::None,
            upper_sv: if g == 0.5 {
                SlowlyVarying::Log
            } else {
                SlowlyVarying::None
            },
            lower_constant: None,
            upper_constant: None,
        }
    } else if beta == 1.0 {
        TailBounds {
            lower_exponent: Some(g.min(0.5)),
            upper_exponent: g / 2.0,
            lower_sv: SlowlyVarying::SqrtLog,
            upper_sv: match g {
                g if g > 0.5 => SlowlyVarying::SqrtLog,
                0.5 => SlowlyVarying::Log3Half,
                _ => SlowlyVarying::None,
            },
            lower_constant: None,
            upper_constant: None,
        }
    } else {
        TailBounds {
            lower_exponent: Some(g.min(beta / 2.0)),
            upper_exponent: g * beta / 2.0,
            lower_sv: SlowlyVarying::None,
            upper_sv: SlowlyVarying::None,
            lower_constant: None,
            upper_constant: None,
        }
    };
    Ok(TailPrediction::bracket(SRC, bounds))
}

/// Tail of `X^gamma` when `P(X > x) ~ (c / Gamma(1 - beta)) x^-beta`.
pub fn power_tail_transform(beta: f64, gamma_: f64, c: f64) -> Result<TailPrediction> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(domain(format!("index {beta} outside (0, 1)")));
    }
    if !(gamma_ > 0.0) {
        return Err(domain("power must be positive"));
    }
    let mut pred = TailPrediction::point(
        "transform.power",
        beta / gamma_,
        Some(c / gamma(1.0 - beta)),
        SlowlyVarying::None,
    );
    pred.finite_mean = Some(gamma_ < beta);
    Ok(pred)
}

/// Tail of `V W` for independent nonnegative `V`, `W` with
/// `P(V > z) ~ c_V (log z)^k_V z^-gamma_V` and `P(W > z) ~ c_W z^-gamma_W`.
///
/// When `gamma_V < gamma_W` the constant needs `E[W^gamma_V]`, passed as
/// `w_moment`; without it the constant is absent.
pub fn product_tail(
    gamma_v: f64,
    k_v: f64,
    c_v: f64,
    gamma_w: f64,
    c_w: f64,
    w_moment: Option<f64>,
) -> Result<TailPrediction> {
    for g in [gamma_v, gamma_w] {
        if !(g > 0.0 && g < 2.0) {
            return Err(domain(format!("index {g} outside (0, 2)")));
        }
    }
    if gamma_v > gamma_w {
        return Err(domain("need gamma_V <= gamma_W; swap the factors"));
    }
    if !(k_v >= 0.0) {
        return Err(domain("log power must be nonnegative"));
    }
    Ok(if gamma_v < gamma_w {
        TailPrediction::point(
            "transform.product",
            gamma_v,
            w_moment.map(|m| c_v * m),
            SlowlyVarying::from_power(k_v),
        )
    } else {
        TailPrediction::point(
            "transform.product",
            gamma_v,
            Some(gamma_v * c_v * c_w / (k_v + 1.0)),
            SlowlyVarying::from_power(1.0 + k_v),
        )
    })
}

/// One grid point of the covariance sandwich.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichPoint {
    pub s: f64,
    /// Sample mean of `Z1 Z2`.
    pub joint: f64,
    /// Standard error of `joint`.
    pub joint_se: f64,
    /// `E Z1 * E Z2`.
    pub product: f64,
    /// `sqrt(Var Z1 Var Z2)`.
    pub spread: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Outcome of the covariance sandwich on a grid of `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub points: Vec<SandwichPoint>,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(|p| p.lower_ok && p.upper_ok)
    }
}

/// Check `E Z1 E Z2 - sqrt(Var Z1 Var Z2) <= E[Z1 Z2] <= E Z1 E Z2 + sqrt(...)`
/// for `Z_k = exp(-s X_k)`, allowing 3 standard errors of `E[Z1 Z2]`.
pub fn cauchy_schwarz_bound_check(
    x1: &[f64],
    x2: &[f64],
    s_grid: &[f64],
) -> Result<SandwichReport> {
    if x1.len() != x2.len() || x1.len() < 2 {
        return Err(Error::InsufficientSamples(
            "need two paired samples of equal length".into(),
        ));
    }
    if x1.iter().chain(x2).any(|&x| !(x >= 0.0)) {
        return Err(domain("samples must be nonnegative"));
    }
    let mut points = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        if !(s > 0.0 && s <= 1.0) {
            return Err(domain(format!("grid point {s} outside (0, 1]")));
        }
        let (mut a, mut b, mut ab) = (MeanSe::default(), MeanSe::default(), MeanSe::default());
        for (&u, &v) in x1.iter().zip(x2) {
            let (z1, z2) = ((-s * u).exp(), (-s * v).exp());
            a.push(z1);
            b.push(z2);
            ab.push(z1 * z2);
        }
        let n = a.count() as f64;
        // population variances keep the sample inequality exact
        let spread = (a.variance() * b.variance()).sqrt() * (n - 1.0) / n;
        let product = a.mean() * b.mean();
        let slack = 3.0 * ab.std_error();
        points.push(SandwichPoint {
            s,
            joint: ab.mean(),
            joint_se: ab.std_error(),
            product,
            spread,
            lower_ok: ab.mean() >= product - spread - slack,
            upper_ok: ab.mean() <= product + spread + slack,
        });
    }
    Ok(SandwichReport { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(beta: f64, nu: f64) -> WalkTail {
        WalkTail {
            beta,
            nu,
            mean_abs: (beta > 1.0).then_some(1.0),
        }
    }

    #[test]
    fn ladder_cost_bracket_example() {
        let p = predict(PredictionSource::LadderCost {
            gamma_hat_plus: 0.5,
            gamma_hat_zero: 0.5,
            beta: 1.5,
            zero_stable: true,
            n: 1,
        })
        .unwrap();
        let b = p.bounds.unwrap();
        assert_eq!(b.lower_exponent, Some(0.375));
        assert_eq!(b.upper_exponent, 0.25);
    }

    #[test]
    fn ladder_height_example() {
        let p = predict(PredictionSource::LadderHeight {
            walk: walk(1.5, 1.0),
            phi: 1.0,
        })
        .unwrap();
        assert_eq!(p.exponent, 0.75);
        assert!((p.constant.unwrap() - 1.0 / 3.625_609_908_221_908).abs() < 1e-12);
    }

    #[test]
    fn unit_mean_medium_reduces_to_ladder_height() {
        let w = walk(1.5, 0.8);
        let h = predict(PredictionSource::LadderHeight { walk: w, phi: 1.3 }).unwrap();
        let y = predict(PredictionSource::YHeight {
            walk: w,
            medium: MediumTail::FiniteMean {
                gamma: 1.5,
                mu: 1.0,
            },
            phi: 1.3,
        })
        .unwrap();
        assert_eq!(h.exponent, y.exponent);
        assert!((h.constant.unwrap() - y.constant.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn power_transform_examples() {
        let p = power_tail_transform(0.5, 2.0, 1.0).unwrap();
        assert_eq!(p.exponent, 0.25);
        assert!((p.constant.unwrap() - 1.0 / PI.sqrt()).abs() < 1e-14);
        assert_eq!(p.finite_mean, Some(false));
        assert_eq!(
            power_tail_transform(0.5, 0.25, 1.0).unwrap().finite_mean,
            Some(true)
        );
        assert_eq!(power_tail_transform(0.5, 1.0, 1.0).unwrap().exponent, 0.5);
        assert!(power_tail_transform(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn product_examples() {
        let a = product_tail(0.5, 0.0, 1.0, 1.0, 1.0, None).unwrap();
        assert_eq!((a.exponent, a.slowly_varying.log_power()), (0.5, 0.0));
        let b = product_tail(0.5, 0.0, 2.0, 0.5, 3.0, None).unwrap();
        assert_eq!(b.slowly_varying, SlowlyVarying::Log);
        assert!((b.constant.unwrap() - 0.5 * 6.0).abs() < 1e-15);
        assert!(product_tail(1.0, 0.0, 1.0, 0.5, 1.0, None).is_err());
    }

    #[test]
    fn excluded_points_are_rejected() {
        assert!(predict(PredictionSource::OddCost {
            gamma: 2.0,
            c4: 1.0,
            nonnegative: true,
            phi: 1.0
        })
        .is_err());
        assert!(predict(PredictionSource::FirstPassageX {
            beta: 2.0,
            gamma: 1.0
        })
        .is_err());
        assert!(predict(PredictionSource::LadderCost {
            gamma_hat_plus: f64::INFINITY,
            gamma_hat_zero: f64::INFINITY,
            beta: 1.0,
            zero_stable: true,
            n: 1
        })
        .is_err());
    }
}
