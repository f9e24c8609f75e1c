use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::distr::{Distribution, Open01};
use rand::{Rng, RngCore};
use rand_distr::weighted::WeightedAliasIndex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{one_minus_cos_sum, Estimate};
use crate::stats::CompensatedSum;

/// Which jump law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpKind {
    SimpleSymmetric,
    ZipfSymmetric,
    CustomPmf,
}

// Zipf values with |k| up to this are drawn from an alias table; beyond it by
// rejection from a continuous power-law proposal.
const ZIPF_TABLE: i64 = 4096;
// Normalization is summed directly to this index, then an integral tail.
const ZIPF_DIRECT_TERMS: u64 = 10_000_000;
// Zipf draws beyond this magnitude are redrawn so positions stay in i64.
const ZIPF_MAX_JUMP: f64 = 4.611_686_018_427_388e18; // 2^62

#[derive(Debug, Clone)]
enum Sampler {
    Simple,
    Table {
        values: Vec<i64>,
        alias: WeightedAliasIndex<f64>,
    },
    Zipf {
        body: WeightedAliasIndex<f64>,
        body_mass: f64,
    },
}

/// Symmetric lattice jump law.
///
/// The characteristic function expands as `1 - nu t^beta + o(t^beta)` near 0.
#[derive(Debug, Clone)]
pub struct JumpLaw {
    kind: JumpKind,
    beta: f64,
    nu: f64,
    // nonnegative half of the support with probabilities, k ascending
    pmf: Vec<(i64, f64)>,
    // p(k) = amplitude |k|^-(1+beta) for zipf
    amplitude: f64,
    support_bound: Option<u64>,
    sampler: Sampler,
}

impl JumpLaw {
    /// `p(+1) = p(-1) = 1/2`.
    pub fn simple_symmetric() -> Self {
        JumpLaw {
            kind: JumpKind::SimpleSymmetric,
            beta: 2.0,
            nu: 0.5,
            pmf: vec![(1, 0.5)],
            amplitude: 0.0,
            support_bound: Some(1),
            sampler: Sampler::Simple,
        }
    }

    /// `p(k) = A |k|^-(1+beta)` for `k != 0`, with `beta` in `(0, 2)`.
    pub fn zipf(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 2.0) {
            return Err(Error::InvalidLaw(format!(
                "zipf exponent {beta} outside (0, 2)"
            )));
        }
        let s = 1.0 + beta;
        let mut norm = CompensatedSum::new();
        for k in (1..=ZIPF_DIRECT_TERMS).rev() {
            norm.add((k as f64).powf(-s));
        }
        norm.add((ZIPF_DIRECT_TERMS as f64 + 0.5).powf(1.0 - s) / (s - 1.0));
        let amplitude = 0.5 / norm.value();

        let weights: Vec<f64> = (1..=ZIPF_TABLE).map(|k| (k as f64).powf(-s)).collect();
        let body_mass = 2.0 * amplitude * weights.iter().copied().sum::<CompensatedSum>().value();
        let body = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::InvalidLaw(format!("zipf alias table: {e}")))?;

        let mut law = JumpLaw {
            kind: JumpKind::ZipfSymmetric,
            beta,
            nu: f64::NAN,
            pmf: Vec::new(),
            amplitude,
            support_bound: None,
            sampler: Sampler::Zipf { body, body_mass },
        };
        law.nu = law.fit_nu(1e-4, 1e-2, 40)?;
        Ok(law)
    }

    /// Finite symmetric pmf given as `(value, probability)` pairs.
    ///
    /// Every value's mirror must carry the same probability; both `k` and
    /// `-k` may be listed or only one of them, in which case the other is
    /// implied. Probabilities must sum to 1 within `1e-12`.
    pub fn custom(pmf: &[(i64, f64)]) -> Result<Self> {
        let mut by_value: BTreeMap<i64, f64> = BTreeMap::new();
        for &(k, p) in pmf {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidLaw(format!("probability {p} at {k}")));
            }
            if k == i64::MIN {
                return Err(Error::InvalidLaw("jump value out of range".into()));
            }
            *by_value.entry(k).or_insert(0.0) += p;
        }
        let mut half: BTreeMap<i64, f64> = BTreeMap::new();
        for (&k, &p) in &by_value {
            let a = k.abs();
            match (k == 0, by_value.get(&-k)) {
                (false, Some(&q)) if (q - p).abs() > 1e-12 => {
                    return Err(Error::InvalidLaw(format!(
                        "pmf not symmetric at {a}: {p} vs {q}"
                    )));
                }
                _ => {
                    half.insert(a, p);
                }
            }
        }
        let total: CompensatedSum = half
            .iter()
            .map(|(&k, &p)| if k == 0 { p } else { 2.0 * p })
            .sum();
        if (total.value() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidLaw(format!(
                "probabilities sum to {}",
                total.value()
            )));
        }
        let pmf: Vec<(i64, f64)> = half.into_iter().filter(|&(_, p)| p > 0.0).collect();
        let nu = pmf
            .iter()
            .map(|&(k, p)| if k == 0 { 0.0 } else { p * (k as f64).powi(2) })
            .sum::<f64>();
        let support_bound = pmf.iter().map(|&(k, _)| k as u64).max().unwrap_or(0);
        let mut values = Vec::new();
        let mut weights = Vec::new();
        for &(k, p) in &pmf {
            if k == 0 {
                values.push(0);
                weights.push(p);
            } else {
                values.extend([k, -k]);
                weights.extend([p, p]);
            }
        }
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::InvalidLaw(format!("pmf alias table: {e}")))?;
        Ok(JumpLaw {
            kind: JumpKind::CustomPmf,
            beta: 2.0,
            nu,
            pmf,
            amplitude: 0.0,
            support_bound: Some(support_bound),
            sampler: Sampler::Table { values, alias },
        })
    }

    pub fn kind(&self) -> JumpKind {
        self.kind
    }

    /// Stability index.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `min(1, beta)`, the index governing `|xi|`.
    pub fn beta_hat(&self) -> f64 {
        self.beta.min(1.0)
    }

    /// Scale `nu` of `1 - nu t^beta`.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Largest jump magnitude for finitely supported laws.
    pub fn support_bound(&self) -> Option<u64> {
        self.support_bound
    }

    /// `p(k)`.
    pub fn pmf(&self, k: i64) -> f64 {
        match self.kind {
            JumpKind::ZipfSymmetric => {
                if k == 0 {
                    0.0
                } else {
                    self.amplitude * (k.unsigned_abs() as f64).powf(-(1.0 + self.beta))
                }
            }
            _ => {
                let a = k.unsigned_abs() as i64;
                self.pmf
                    .binary_search_by_key(&a, |&(v, _)| v)
                    .map(|i| self.pmf[i].1)
                    .unwrap_or(0.0)
            }
        }
    }

    /// Full support with probabilities for finitely supported laws.
    pub fn support(&self) -> Result<Vec<(i64, f64)>> {
        if self.kind == JumpKind::ZipfSymmetric {
            return Err(Error::UnboundedSupport);
        }
        let mut out = Vec::with_capacity(2 * self.pmf.len());
        for &(k, p) in self.pmf.iter().rev() {
            if k != 0 {
                out.push((-k, p));
            }
        }
        for &(k, p) in &self.pmf {
            out.push((k, p));
        }
        Ok(out)
    }

    /// Zipf amplitude `A` in `p(k) = A |k|^-(1+beta)`; zero for other kinds.
    pub fn zipf_amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `E|xi|`, or `None` when infinite.
    pub fn mean_abs(&self) -> Option<f64> {
        match self.kind {
            JumpKind::ZipfSymmetric => {
                if self.beta <= 1.0 {
                    None
                } else {
                    crate::special::zeta(self.beta)
                        .ok()
                        .map(|z| 2.0 * self.amplitude * z)
                }
            }
            _ => Some(
                self.pmf
                    .iter()
                    .map(|&(k, p)| if k == 0 { 0.0 } else { 2.0 * p * k as f64 })
                    .sum(),
            ),
        }
    }

    /// `1 - phi(t)` for `t` in `[0, pi]`, computed without cancellation.
    pub fn one_minus_char(&self, t: f64) -> Result<Estimate> {
        if !(0.0..=PI).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, pi]")));
        }
        match self.kind {
            JumpKind::ZipfSymmetric => {
                let e = one_minus_cos_sum(1.0 + self.beta, t)?;
                Ok(Estimate {
                    value: 2.0 * self.amplitude * e.value,
                    error: 2.0 * self.amplitude * e.error,
                })
            }
            _ => {
                let mut acc = CompensatedSum::new();
                for &(k, p) in &self.pmf {
                    if k != 0 {
                        let h = (k as f64 * t / 2.0).sin();
                        acc.add(4.0 * p * h * h);
                    }
                }
                Ok(Estimate {
                    value: acc.value(),
                    error: 4.0 * f64::EPSILON,
                })
            }
        }
    }

    /// Characteristic function `phi(t) = sum_k p(k) cos(k t)` on `[0, pi]`.
    pub fn char_function(&self, t: f64) -> Result<Estimate> {
        let e = self.one_minus_char(t)?;
        Ok(Estimate {
            value: 1.0 - e.value,
            error: e.error + f64::EPSILON,
        })
    }

    /// `(beta, nu)` of the small-`t` expansion.
    ///
    /// Finite-variance laws return `(2, E[xi^2] / 2)`; Zipf laws return the
    /// value of `nu` fitted on the default grid `t` in `[1e-4, 1e-2]`.
    pub fn expansion_params(&self) -> (f64, f64) {
        (self.beta, self.nu)
    }

    /// Fit `nu` on a log grid: regress `(1 - phi(t)) / t^beta` on
    /// `t^(2 - beta)` (the next term of the expansion) and take the intercept.
    pub fn fit_nu(&self, t_lo: f64, t_hi: f64, points: usize) -> Result<f64> {
        if !(t_lo > 0.0 && t_hi > t_lo && t_hi <= PI && points >= 3) {
            return Err(Error::Fit(format!(
                "bad grid [{t_lo}, {t_hi}] with {points} points"
            )));
        }
        let (l0, l1) = (t_lo.ln(), t_hi.ln());
        let mut xs = Vec::with_capacity(points);
        let mut ys = Vec::with_capacity(points);
        for i in 0..points {
            let t = (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp();
            let e = self.one_minus_char(t)?;
            xs.push(t.powf(2.0 - self.beta));
            ys.push(e.value / t.powf(self.beta));
        }
        let n = points as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let intercept = my - slope * mx;
        let rms = (xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        if !(intercept > 0.0) || rms > 1e-6 * intercept {
            return Err(Error::Fit(format!(
                "nu fit residual {rms:e} against intercept {intercept:e}"
            )));
        }
        Ok(intercept)
    }

    /// Draw one jump.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        match &self.sampler {
            Sampler::Simple => {
                if rng.next_u32() & 1 == 1 {
                    1
                } else {
                    -1
                }
            }
            Sampler::Table { values, alias } => values[alias.sample(rng)],
            Sampler::Zipf { body, body_mass } => {
                let sign = if rng.next_u32() & 1 == 1 { 1 } else { -1 };
                let u: f64 = rng.random();
                let magnitude = if u < *body_mass {
                    body.sample(rng) as i64 + 1
                } else {
                    self.zipf_tail(rng)
                };
                sign * magnitude
            }
        }
    }

    // |k| > ZIPF_TABLE with weights k^-s: propose y with density ~ y^-s on
    // [ZIPF_TABLE + 1/2, inf), round, accept with k^-s / int_{k-1/2}^{k+1/2} y^-s dy.
    fn zipf_tail<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        let s = 1.0 + self.beta;
        let start = ZIPF_TABLE as f64 + 0.5;
        loop {
            let u: f64 = Open01.sample(rng);
            let y = start * u.powf(-1.0 / self.beta);
            if !(y < ZIPF_MAX_JUMP) {
                continue;
            }
            let k = (y + 0.5).floor();
            let cell = ((k - 0.5).powf(1.0 - s) - (k + 0.5).powf(1.0 - s)) / (s - 1.0);
            let accept = k.powf(-s) / cell;
            let v: f64 = rng.random();
            if v < accept {
                return k as i64;
            }
        }
    }
}
