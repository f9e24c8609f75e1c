//! Quenched scenery on bonds and the renewal medium built from spacings.
//!
//! Bond `k` is the unit interval `[k - 1, k]`.

use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::laws::SceneryLaw;
use crate::rng::{lane_stream, Domain};
use crate::stats::CompensatedSum;

/// Largest number of bonds a single realization will materialize.
pub const MAX_REALIZED_BONDS: u64 = 1 << 27;

type BondFn = Arc<dyn Fn(i64) -> f64 + Send + Sync>;

enum Source {
    Law {
        law: SceneryLaw,
        up: Box<ChaCha8Rng>,
        down: Box<ChaCha8Rng>,
    },
    Explicit(BondFn),
}

/// I.i.d. values attached to bonds, generated on first access.
///
/// Values for bonds `k >= 1` come from one stream and values for `k <= 0`
/// from another, each filled outward from the origin, so a bond's value does
/// not depend on the order in which bonds are requested.
pub struct BondField {
    source: Source,
    // bonds 1, 2, 3, ...
    up: Vec<f64>,
    // bonds 0, -1, -2, ...
    down: Vec<f64>,
}

impl fmt::Debug for BondField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            Source::Law { law, .. } => format!("{law:?}"),
            Source::Explicit(_) => "explicit".to_string(),
        };
        f.debug_struct("BondField")
            .field("source", &kind)
            .field("realized", &(self.up.len() + self.down.len()))
            .finish()
    }
}

impl BondField {
    /// Field of i.i.d. draws from `law` for path `index` under `seed`.
    pub fn from_law(law: SceneryLaw, seed: u64, domain: Domain, index: u64) -> Self {
        BondField {
            source: Source::Law {
                law,
                up: Box::new(lane_stream(seed, domain, index, 0)),
                down: Box::new(lane_stream(seed, domain, index, 1)),
            },
            up: Vec::new(),
            down: Vec::new(),
        }
    }

    /// Field with prescribed values.
    pub fn from_fn(f: impl Fn(i64) -> f64 + Send + Sync + 'static) -> Self {
        BondField {
            source: Source::Explicit(Arc::new(f)),
            up: Vec::new(),
            down: Vec::new(),
        }
    }

    /// Value on bond `k`.
    pub fn value(&mut self, k: i64) -> f64 {
        match &mut self.source {
            Source::Explicit(f) => f(k),
            Source::Law { law, up, down } => {
                if k >= 1 {
                    let i = (k - 1) as usize;
                    while self.up.len() <= i {
                        self.up.push(law.sample(up.as_mut()));
                    }
                    self.up[i]
                } else {
                    let i = k.unsigned_abs() as usize;
                    while self.down.len() <= i {
                        self.down.push(law.sample(down.as_mut()));
                    }
                    self.down[i]
                }
            }
        }
    }

    /// Check that bonds `lo..=hi` may be realized.
    pub fn check_range(lo: i64, hi: i64) -> Result<()> {
        let span = (i128::from(hi) - i128::from(lo) + 1).max(0) as u128;
        if span > u128::from(MAX_REALIZED_BONDS) {
            return Err(invalid(
                "range",
                format!("{span} bonds exceed the realization cap {MAX_REALIZED_BONDS}"),
            ));
        }
        Ok(())
    }
}

enum Bonds {
    Independent { plus: BondField, minus: BondField },
    // zeta^+ = a * base, zeta^- = b * base on each bond
    Coupled { base: BondField, a: f64, b: f64 },
}

/// Values `zeta^+_k` (collected on rightward crossings) and `zeta^-_k`
/// (leftward crossings) on every bond.
pub struct SceneryRealization {
    bonds: Bonds,
}

impl fmt::Debug for SceneryRealization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.bonds {
            Bonds::Independent { plus, minus } => f
                .debug_struct("Independent")
                .field("plus", plus)
                .field("minus", minus)
                .finish(),
            Bonds::Coupled { base, a, b } => f
                .debug_struct("Coupled")
                .field("base", base)
                .field("a", a)
                .field("b", b)
                .finish(),
        }
    }
}

impl SceneryRealization {
    /// Independent plus and minus fields.
    pub fn realize(plus_law: SceneryLaw, minus_law: SceneryLaw, seed: u64) -> Self {
        Self::realize_indexed(plus_law, minus_law, seed, 0)
    }

    /// Independent plus and minus fields for path `index`.
    pub fn realize_indexed(
        plus_law: SceneryLaw,
        minus_law: SceneryLaw,
        seed: u64,
        index: u64,
    ) -> Self {
        SceneryRealization {
            bonds: Bonds::Independent {
                plus: BondField::from_law(plus_law, seed, Domain::SceneryPlus, index),
                minus: BondField::from_law(minus_law, seed, Domain::SceneryMinus, index),
            },
        }
    }

    /// `zeta^+ = a zeta`, `zeta^- = b zeta` with one shared field `zeta`.
    pub fn coupled(base: BondField, a: f64, b: f64) -> Self {
        SceneryRealization {
            bonds: Bonds::Coupled { base, a, b },
        }
    }

    /// Prescribed plus and minus values.
    pub fn from_fns(
        plus: impl Fn(i64) -> f64 + Send + Sync + 'static,
        minus: impl Fn(i64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SceneryRealization {
            bonds: Bonds::Independent {
                plus: BondField::from_fn(plus),
                minus: BondField::from_fn(minus),
            },
        }
    }

    pub fn plus(&mut self, k: i64) -> f64 {
        match &mut self.bonds {
            Bonds::Independent { plus, .. } => plus.value(k),
            Bonds::Coupled { base, a, .. } => *a * base.value(k),
        }
    }

    pub fn minus(&mut self, k: i64) -> f64 {
        match &mut self.bonds {
            Bonds::Independent { minus, .. } => minus.value(k),
            Bonds::Coupled { base, b, .. } => *b * base.value(k),
        }
    }

    /// Both values on bond `k`.
    pub fn pair(&mut self, k: i64) -> (f64, f64) {
        (self.plus(k), self.minus(k))
    }
}

/// Even part `zeta^0_k = (zeta^+_k + zeta^-_k) / 2`.
pub fn even_part(sc: &mut SceneryRealization, k: i64) -> f64 {
    let (p, m) = sc.pair(k);
    0.5 * (p + m)
}

/// Law of the even part of the coupled scenery `(a zeta, b zeta)`.
pub fn coupled_even_law(zeta: &SceneryLaw, a: f64, b: f64) -> Result<SceneryLaw> {
    let m = 0.5 * (a + b);
    if m == 0.0 {
        Ok(SceneryLaw::zero())
    } else if m > 0.0 {
        SceneryLaw::scaled(zeta.clone(), m)
    } else {
        Ok(SceneryLaw::negated(SceneryLaw::scaled(zeta.clone(), -m)?))
    }
}

/// Points `omega_k` with `omega_0 = 0` and `omega_k - omega_{k-1} = zeta_k > 0`.
#[derive(Debug)]
pub struct Medium {
    spacings: BondField,
    // omega_1, omega_2, ...
    up: Vec<f64>,
    // omega_{-1}, omega_{-2}, ...
    down: Vec<f64>,
    up_sum: CompensatedSum,
    down_sum: CompensatedSum,
}

impl Medium {
    /// Medium with spacings drawn from `law` for path `index` under `seed`.
    pub fn from_law(law: SceneryLaw, seed: u64, index: u64) -> Result<Self> {
        if !law.is_positive() {
            return Err(Error::InvalidLaw(format!(
                "medium spacings must be positive, got {law:?}"
            )));
        }
        Ok(Self::from_field(BondField::from_law(
            law,
            seed,
            Domain::Medium,
            index,
        )))
    }

    /// Medium over an existing spacing field; positivity is checked on access.
    pub fn from_field(spacings: BondField) -> Self {
        Medium {
            spacings,
            up: Vec::new(),
            down: Vec::new(),
            up_sum: CompensatedSum::new(),
            down_sum: CompensatedSum::new(),
        }
    }

    /// Spacing field shared with a coupled scenery for the same path.
    pub fn spacing_field(law: SceneryLaw, seed: u64, index: u64) -> BondField {
        BondField::from_law(law, seed, Domain::Medium, index)
    }

    /// `zeta_k = omega_k - omega_{k-1}`.
    pub fn spacing(&mut self, k: i64) -> Result<f64> {
        let v = self.spacings.value(k);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveSpacing { bond: k, value: v });
        }
        Ok(v)
    }

    /// `omega_k`.
    pub fn omega(&mut self, k: i64) -> Result<f64> {
        if k == 0 {
            return Ok(0.0);
        }
        if k > 0 {
            let i = (k - 1) as usize;
            while self.up.len() <= i {
                let bond = self.up.len() as i64 + 1;
                let v = self.spacing(bond)?;
                self.up_sum.add(v);
                self.up.push(self.up_sum.value());
            }
            Ok(self.up[i])
        } else {
            let i = (-k - 1) as usize;
            while self.down.len() <= i {
                // omega_{-j} = omega_{-j+1} - zeta_{-j+1}
                let bond = -(self.down.len() as i64);
                let v = self.spacing(bond)?;
                self.down_sum.add(v);
                self.down.push(-self.down_sum.value());
            }
            Ok(self.down[i])
        }
    }
}
