use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::{Distribution, Open01};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::special::gamma;

/// Shape of a scenery law.
#[derive(Debug, Clone, PartialEq)]
pub enum SceneryKind {
    /// `P(zeta > x) = (scale / x)^gamma` for `x >= scale`.
    Pareto {
        gamma: f64,
        scale: f64,
    },
    /// One-sided stable law with `E exp(-s zeta) = exp(-s^gamma)`.
    PositiveStable {
        gamma: f64,
    },
    Constant(f64),
    Zero,
    Negated(Box<SceneryLaw>),
    Scaled(Box<SceneryLaw>, f64),
}

/// Law of a scenery variable or of a medium spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneryLaw {
    kind: SceneryKind,
}

fn check_index(gamma: f64, upper: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= upper) {
        return Err(Error::InvalidLaw(format!(
            "tail index {gamma} outside (0, {upper}]"
        )));
    }
    if gamma == 1.0 {
        return Err(Error::InvalidLaw("tail index 1 is excluded".into()));
    }
    Ok(())
}

impl SceneryLaw {
    pub fn pareto(gamma: f64, scale: f64) -> Result<Self> {
        check_index(gamma, 2.0)?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidLaw(format!(
                "pareto scale {scale} must be positive"
            )));
        }
        Ok(SceneryLaw {
            kind: SceneryKind::Pareto { gamma, scale },
        })
    }

    /// Pareto law whose real tail coefficient `|c| = A |Gamma(1 - gamma)|`
    /// equals `c`, where `A` is the tail amplitude.
    pub fn pareto_with_coefficient(gamma: f64, c: f64) -> Result<Self> {
        check_index(gamma, 2.0)?;
        if gamma == 2.0 {
            return Err(Error::InvalidLaw(
                "no finite tail coefficient at index 2".into(),
            ));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidLaw(format!(
                "tail coefficient {c} must be positive"
            )));
        }
        let amplitude = c / gamma_abs(1.0 - gamma);
        Self::pareto(gamma, amplitude.powf(1.0 / gamma))
    }

    pub fn positive_stable(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidLaw(format!(
                "positive stable index {gamma} outside (0, 1)"
            )));
        }
        Ok(SceneryLaw {
            kind: SceneryKind::PositiveStable { gamma },
        })
    }

    /// Point mass at `v`; `v = 0` gives the zero law.
    pub fn constant(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidLaw(format!("constant {v} is not finite")));
        }
        Ok(if v == 0.0 {
            Self::zero()
        } else {
            SceneryLaw {
                kind: SceneryKind::Constant(v),
            }
        })
    }

    pub fn zero() -> Self {
        SceneryLaw {
            kind: SceneryKind::Zero,
        }
    }

    pub fn negated(inner: SceneryLaw) -> Self {
        match inner.kind {
            SceneryKind::Zero => Self::zero(),
            SceneryKind::Negated(law) => *law,
            _ => SceneryLaw {
                kind: SceneryKind::Negated(Box::new(inner)),
            },
        }
    }

    /// `factor * zeta` for `factor > 0`; use [`SceneryLaw::negated`] for signs.
    pub fn scaled(inner: SceneryLaw, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidLaw(format!(
                "scale factor {factor} must be positive"
            )));
        }
        Ok(match inner.kind {
            SceneryKind::Zero => Self::zero(),
            _ if factor == 1.0 => inner,
            _ => SceneryLaw {
                kind: SceneryKind::Scaled(Box::new(inner), factor),
            },
        })
    }

    pub fn kind(&self) -> &SceneryKind {
        &self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.kind == SceneryKind::Zero
    }

    /// Tail index; `+inf` exactly for the zero law, 2 for nonzero constants.
    pub fn gamma(&self) -> f64 {
        match &self.kind {
            SceneryKind::Pareto { gamma, .. } | SceneryKind::PositiveStable { gamma } => *gamma,
            SceneryKind::Constant(_) => 2.0,
            SceneryKind::Zero => f64::INFINITY,
            SceneryKind::Negated(inner) | SceneryKind::Scaled(inner, _) => inner.gamma(),
        }
    }

    /// `min(1, gamma)`, keeping `+inf` for the zero law.
    pub fn gamma_hat(&self) -> f64 {
        let g = self.gamma();
        if g.is_infinite() {
            g
        } else {
            g.min(1.0)
        }
    }

    /// Mean, `None` when infinite.
    pub fn mean(&self) -> Option<f64> {
        match &self.kind {
            SceneryKind::Pareto { gamma, scale } => {
                (*gamma > 1.0).then(|| gamma * scale / (gamma - 1.0))
            }
            SceneryKind::PositiveStable { .. } => None,
            SceneryKind::Constant(v) => Some(*v),
            SceneryKind::Zero => Some(0.0),
            SceneryKind::Negated(inner) => inner.mean().map(|m| -m),
            SceneryKind::Scaled(inner, f) => inner.mean().map(|m| f * m),
        }
    }

    /// `A` in `P(|zeta| > x) ~ A x^-gamma` for heavy-tailed laws.
    pub fn tail_amplitude(&self) -> Option<f64> {
        match &self.kind {
            SceneryKind::Pareto { gamma, scale } => Some(scale.powf(*gamma)),
            SceneryKind::PositiveStable { gamma } => Some(1.0 / gamma_abs(1.0 - gamma)),
            SceneryKind::Negated(inner) => inner.tail_amplitude(),
            SceneryKind::Scaled(inner, f) => {
                inner.tail_amplitude().map(|a| a * f.powf(inner.gamma()))
            }
            SceneryKind::Constant(_) | SceneryKind::Zero => None,
        }
    }

    /// Coefficient `c` of the characteristic function expansion
    /// `1 - c theta^gamma` (`gamma < 1`) or `1 + i mu theta - c theta^gamma`
    /// (`1 < gamma < 2`) as `theta -> 0+`; complex in general.
    pub fn char_coefficient(&self) -> Option<Complex64> {
        match &self.kind {
            SceneryKind::Pareto { gamma: g, .. } | SceneryKind::PositiveStable { gamma: g } => {
                if *g == 2.0 {
                    return None;
                }
                let a = self.tail_amplitude()?;
                Some(Complex64::from_polar(a * gamma(1.0 - g), -PI * g / 2.0))
            }
            SceneryKind::Constant(v) => Some(Complex64::new(v * v / 2.0, 0.0)),
            SceneryKind::Zero => None,
            SceneryKind::Negated(inner) => inner.char_coefficient().map(|c| c.conj()),
            SceneryKind::Scaled(inner, f) => {
                inner.char_coefficient().map(|c| c * f.powf(inner.gamma()))
            }
        }
    }

    /// Real coefficient `c` with `E exp(-s zeta) = 1 - c s^gamma + o(s^gamma)`
    /// for nonnegative laws with `gamma < 1`; equals `A Gamma(1 - gamma)`.
    pub fn laplace_coefficient(&self) -> Option<f64> {
        let g = self.gamma();
        if !(g < 1.0) || !self.is_nonnegative() {
            return None;
        }
        self.tail_amplitude().map(|a| a * gamma(1.0 - g))
    }

    /// True if samples are `>= 0` almost surely.
    pub fn is_nonnegative(&self) -> bool {
        match &self.kind {
            SceneryKind::Pareto { .. } | SceneryKind::PositiveStable { .. } | SceneryKind::Zero => {
                true
            }
            SceneryKind::Constant(v) => *v > 0.0,
            SceneryKind::Negated(_) => false,
            SceneryKind::Scaled(inner, _) => inner.is_nonnegative(),
        }
    }

    /// True if samples are `> 0` almost surely.
    pub fn is_positive(&self) -> bool {
        self.is_nonnegative() && !self.is_zero()
    }

    /// True if the law is one of the stable shapes (point masses included).
    pub fn is_stable(&self) -> bool {
        match &self.kind {
            SceneryKind::PositiveStable { .. } | SceneryKind::Constant(_) | SceneryKind::Zero => {
                true
            }
            SceneryKind::Pareto { .. } => false,
            SceneryKind::Negated(inner) | SceneryKind::Scaled(inner, _) => inner.is_stable(),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            SceneryKind::Pareto { gamma, scale } => {
                let u: f64 = Open01.sample(rng);
                scale * u.powf(-1.0 / gamma)
            }
            SceneryKind::PositiveStable { gamma } => {
                // Kanter's representation
                let u: f64 = Open01.sample(rng);
                let u = PI * u;
                let e: f64 = Open01.sample(rng);
                let e = -e.ln();
                let g = *gamma;
                let a = (g * u).sin() / u.sin().powf(1.0 / g);
                let b = ((1.0 - g) * u).sin() / e;
                a * b.powf((1.0 - g) / g)
            }
            SceneryKind::Constant(v) => *v,
            SceneryKind::Zero => 0.0,
            SceneryKind::Negated(inner) => -inner.sample(rng),
            SceneryKind::Scaled(inner, f) => f * inner.sample(rng),
        }
    }
}

fn gamma_abs(x: f64) -> f64 {
    gamma(x).abs()
}
