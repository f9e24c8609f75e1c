//! Generating functions of the first ladder of `(S, C)` when the cost
//! increment is a function of the jump, `eta = g(xi)`.
//!
//! The ladder side is computed by an absorbing dynamic program over the
//! sub-probability mass that has stayed at or below 0; the series side by the
//! unrestricted `n`-step laws. Both carry explicit truncation bounds. The
//! factor `Phi(z, s)` is computed by quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::laws::JumpLaw;
use crate::quad::integrate;
use crate::special::Estimate;

/// Allowance for floating-point rounding added to every truncation bound.
pub const ROUNDING_ALLOWANCE: f64 = 1e-13;

/// Cost increment as a function of the jump.
#[derive(Debug, Clone, PartialEq)]
pub enum CostMap {
    /// `g(k) = k`
    Identity,
    /// `g(k) = |k|`
    Abs,
    /// `g(k) = 0`
    Zero,
    /// Explicit values; jumps missing from the table cost 0.
    Table(Vec<(i64, f64)>),
    /// `g(k) = a(k) + b(k)`.
    Sum(Box<CostMap>, Box<CostMap>),
    /// `g(k) = f * a(k)`.
    Scaled(Box<CostMap>, f64),
}

impl CostMap {
    pub fn eval(&self, k: i64) -> f64 {
        match self {
            CostMap::Identity => k as f64,
            CostMap::Abs => k.unsigned_abs() as f64,
            CostMap::Zero => 0.0,
            CostMap::Table(t) => t.iter().find(|&&(v, _)| v == k).map_or(0.0, |&(_, c)| c),
            CostMap::Sum(a, b) => a.eval(k) + b.eval(k),
            CostMap::Scaled(a, f) => f * a.eval(k),
        }
    }

    pub fn is_even_on(&self, support: &[(i64, f64)]) -> bool {
        support.iter().all(|&(k, _)| self.eval(k) == self.eval(-k))
    }

    pub fn is_odd_on(&self, support: &[(i64, f64)]) -> bool {
        support.iter().all(|&(k, _)| self.eval(k) == -self.eval(-k))
    }
}

/// `e^{i s eta}` or `e^{-s eta}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    Fourier,
    Laplace,
}

impl Transform {
    pub fn weight(self, s: f64, eta: f64) -> Complex64 {
        match self {
            Transform::Fourier => Complex64::from_polar(1.0, s * eta),
            Transform::Laplace => Complex64::new((-s * eta).exp(), 0.0),
        }
    }
}

/// One-step joint law of `(xi, eta)` on a bounded lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLattice {
    // (jump, cost, probability)
    steps: Vec<(i64, f64, f64)>,
    bound: i64,
}

impl JointLattice {
    /// Joint law of `(xi, g(xi))` for a finitely supported jump law.
    pub fn new(law: &JumpLaw, g: &CostMap) -> Result<Self> {
        Self::from_pmf(&law.support()?, g)
    }

    /// Joint law from an arbitrary finite pmf (not necessarily symmetric).
    pub fn from_pmf(pmf: &[(i64, f64)], g: &CostMap) -> Result<Self> {
        let mut total = 0.0;
        let mut steps = Vec::with_capacity(pmf.len());
        for &(k, p) in pmf {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidLaw(format!("probability {p} at {k}")));
            }
            if k.unsigned_abs() > 1 << 20 {
                return Err(invalid(
                    "pmf",
                    format!("jump {k} too large for the lattice program"),
                ));
            }
            total += p;
            if p > 0.0 {
                steps.push((k, g.eval(k), p));
            }
        }
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidLaw(format!("total mass {total} exceeds 1")));
        }
        let bound = steps
            .iter()
            .map(|&(k, _, _)| k.abs())
            .max()
            .unwrap_or(0)
            .max(1);
        Ok(JointLattice { steps, bound })
    }

    /// `E[e^{i t xi} w(s, eta)]`.
    pub fn phi(&self, t: f64, s: f64, tr: Transform) -> Complex64 {
        self.steps
            .iter()
            .map(|&(k, eta, p)| Complex64::from_polar(p, t * k as f64) * tr.weight(s, eta))
            .sum()
    }

    /// `E[w(s, eta)]`.
    pub fn cost_transform(&self, s: f64, tr: Transform) -> Complex64 {
        self.phi(0.0, s, tr)
    }

    /// Largest `|w(s, eta)|` over the support, at least 1.
    pub fn max_weight(&self, s: f64, tr: Transform) -> f64 {
        self.steps
            .iter()
            .map(|&(_, eta, _)| tr.weight(s, eta).norm())
            .fold(1.0, f64::max)
    }

    fn support(&self) -> Vec<(i64, f64)> {
        self.steps.iter().map(|&(k, _, p)| (k, p)).collect()
    }
}

/// A truncated value with a bound on `|value - exact|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounded {
    pub value: Complex64,
    pub bound: f64,
}

/// Both transforms read off the absorbing program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderSide {
    /// `E[z^T e^{i t S_T} w(s, C_T)]`.
    pub ladder: Bounded,
    /// `E[sum_{n < T} z^n e^{i t S_n} w(s, C_n)]`.
    pub pre_passage: Bounded,
}

/// Both transforms from the unrestricted `n`-step laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSide {
    /// `1 - exp(-sum_n z^n / n E[e^{i t S_n} w(s, C_n); S_n > 0])`.
    pub ladder: Bounded,
    /// `exp(sum_n z^n / n E[e^{i t S_n} w(s, C_n); S_n <= 0])`.
    pub pre_passage: Bounded,
}

fn check_z(z: f64, rho: f64) -> Result<()> {
    if !(z > 0.0 && z < 1.0) {
        return Err(invalid("z", format!("{z} outside (0, 1)")));
    }
    if rho >= 1.0 {
        return Err(Error::Domain(format!(
            "z times the largest cost weight is {rho}, series may diverge"
        )));
    }
    Ok(())
}

/// Ladder side by the absorbing program, `n_terms` steps.
pub fn sb_lhs(
    z: f64,
    t: f64,
    s: f64,
    lat: &JointLattice,
    tr: Transform,
    n_terms: usize,
) -> Result<LadderSide> {
    let w_max = lat.max_weight(s, tr);
    let rho = z * w_max;
    check_z(z, rho)?;
    let b = lat.bound as usize;
    let depth = n_terms * b;
    // index i holds position i - depth, positions -depth..=0
    let mut mass = vec![Complex64::new(0.0, 0.0); depth + 1];
    let mut next = mass.clone();
    mass[depth] = Complex64::new(1.0, 0.0);
    let step: Vec<(i64, Complex64)> = lat
        .steps
        .iter()
        .map(|&(k, eta, p)| (k, tr.weight(s, eta) * p))
        .collect();

    let mut ladder = Complex64::new(0.0, 0.0);
    let mut pre = Complex64::new(1.0, 0.0);
    let mut zn = 1.0;
    let mut lo = depth;
    for _ in 1..=n_terms {
        zn *= z;
        next[lo.saturating_sub(b)..=depth]
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut exits = Complex64::new(0.0, 0.0);
        for (i, &a) in mass.iter().enumerate().skip(lo) {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let x = i as i64 - depth as i64;
            for &(k, w) in &step {
                let y = x + k;
                if y > 0 {
                    exits += a * w * Complex64::from_polar(1.0, t * y as f64);
                } else {
                    next[(y + depth as i64) as usize] += a * w;
                }
            }
        }
        lo = lo.saturating_sub(b);
        ladder += exits * zn;
        let mut retained = Complex64::new(0.0, 0.0);
        for (i, &v) in next.iter().enumerate().skip(lo) {
            retained += v * Complex64::from_polar(1.0, t * (i as f64 - depth as f64));
        }
        pre += retained * zn;
        std::mem::swap(&mut mass, &mut next);
    }
    // remainders: sum_{n>N} z^n P(T = n) and sum_{n>N} z^n P(T > n) when all
    // weights have modulus at most 1, geometric bounds in rho otherwise
    let n1 = (n_terms + 1) as i32;
    let (ladder_bound, pre_bound) = if w_max <= 1.0 {
        (z.powi(n1), z.powi(n1) / (1.0 - z))
    } else {
        (rho.powi(n1) / (1.0 - rho), rho.powi(n1) / (1.0 - rho))
    };
    Ok(LadderSide {
        ladder: Bounded {
            value: ladder,
            bound: ladder_bound + ROUNDING_ALLOWANCE,
        },
        pre_passage: Bounded {
            value: pre,
            bound: pre_bound + ROUNDING_ALLOWANCE,
        },
    })
}

/// Series side from the unrestricted `n`-step laws, `n_terms` terms.
pub fn sb_rhs(
    z: f64,
    t: f64,
    s: f64,
    lat: &JointLattice,
    tr: Transform,
    n_terms: usize,
) -> Result<SeriesSide> {
    let w_max = lat.max_weight(s, tr);
    let rho = z * w_max;
    check_z(z, rho)?;
    let b = lat.bound as usize;
    let depth = n_terms * b;
    let width = 2 * depth + 1;
    let mut mass = vec![Complex64::new(0.0, 0.0); width];
    let mut next = mass.clone();
    mass[depth] = Complex64::new(1.0, 0.0);
    let step: Vec<(i64, Complex64)> = lat
        .steps
        .iter()
        .map(|&(k, eta, p)| (k, tr.weight(s, eta) * p))
        .collect();
    let phase: Vec<Complex64> = (0..width)
        .map(|i| Complex64::from_polar(1.0, t * (i as f64 - depth as f64)))
        .collect();

    let mut positive = Complex64::new(0.0, 0.0);
    let mut nonpositive = Complex64::new(0.0, 0.0);
    let mut zn = 1.0;
    let (mut lo, mut hi) = (depth, depth);
    for n in 1..=n_terms {
        zn *= z;
        let (nlo, nhi) = (lo - b, hi + b);
        next[nlo..=nhi]
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        for i in lo..=hi {
            let a = mass[i];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(k, w) in &step {
                next[(i as i64 + k) as usize] += a * w;
            }
        }
        lo = nlo;
        hi = nhi;
        std::mem::swap(&mut mass, &mut next);
        let (mut pos, mut neg) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for i in lo..=hi {
            let v = mass[i] * phase[i];
            if i > depth {
                pos += v;
            } else {
                neg += v;
            }
        }
        let c = zn / n as f64;
        positive += pos * c;
        nonpositive += neg * c;
    }
    let n1 = n_terms + 1;
    let eps = rho.powi(n1 as i32) / (n1 as f64 * (1.0 - rho));
    let grow = eps.exp_m1();
    let e_pos = (-positive).exp();
    let e_neg = nonpositive.exp();
    Ok(SeriesSide {
        ladder: Bounded {
            value: 1.0 - e_pos,
            bound: e_pos.norm() * grow + ROUNDING_ALLOWANCE,
        },
        pre_passage: Bounded {
            value: e_neg,
            bound: e_neg.norm() * grow + ROUNDING_ALLOWANCE,
        },
    })
}

/// Smallest order with `z^(N+1) <= tol`.
pub fn order_for(z: f64, tol: f64) -> usize {
    if z <= 0.0 {
        return 1;
    }
    ((tol.ln() / z.ln()).ceil() as usize).clamp(1, 100_000)
}

// ln(1 - z phi(t, s)) evaluated without cancellation near t = 0 at s = 0.
enum CharSource<'a> {
    Lattice(JointLattice, &'a JumpLaw),
    Law(&'a JumpLaw),
}

impl CharSource<'_> {
    fn one_minus_z_phi(
        &self,
        z: f64,
        t: f64,
        s: f64,
        tr: Transform,
        cost_free: bool,
    ) -> Result<Complex64> {
        let law = match self {
            CharSource::Lattice(_, law) | CharSource::Law(law) => law,
        };
        if cost_free {
            let om = law.one_minus_char(t.abs())?.value;
            return Ok(Complex64::new(1.0 - z + z * om, 0.0));
        }
        match self {
            CharSource::Lattice(lat, _) => Ok(1.0 - z * lat.phi(t, s, tr)),
            CharSource::Law(_) => Err(Error::UnboundedSupport),
        }
    }
}

fn log_integral(
    z: f64,
    s: f64,
    law: &JumpLaw,
    g: &CostMap,
    tr: Transform,
    lo: f64,
    hi: f64,
) -> Result<Estimate<Complex64>> {
    if !(z > 0.0 && z <= 1.0) {
        return Err(invalid("z", format!("{z} outside (0, 1]")));
    }
    let cost_free = s == 0.0 || *g == CostMap::Zero;
    let source = match JointLattice::new(law, g) {
        Ok(lat) => CharSource::Lattice(lat, law),
        Err(Error::UnboundedSupport) if cost_free => CharSource::Law(law),
        Err(e) => return Err(e),
    };
    let tol = 1e-12;
    if z < 1.0 || !cost_free {
        if let CharSource::Lattice(lat, _) = &source {
            if !cost_free && (1.0 - z * lat.phi(0.0, s, tr)).norm() < 1e-12 {
                return Err(Error::Domain(
                    "1 - z phi vanishes at t = 0 with a nonzero cost".into(),
                ));
            }
        }
        return integrate(
            |t| {
                source
                    .one_minus_z_phi(z, t, s, tr, cost_free)
                    .map(|v| v.ln())
                    .unwrap_or(Complex64::new(f64::NAN, 0.0))
            },
            lo,
            hi,
            tol,
            tol,
        )
        .and_then(finite);
    }
    // z = 1 and no cost: 1 - phi(t) ~ nu |t|^beta; integrate the log of the
    // ratio and add the integral of ln(nu |t|^beta) in closed form.
    let (beta, nu) = law.expansion_params();
    let ratio = |t: f64| -> f64 {
        let om = law
            .one_minus_char(t.abs())
            .map(|e| e.value)
            .unwrap_or(f64::NAN);
        (om / (nu * t.abs().powf(beta))).ln()
    };
    let part = |a: f64, b: f64| -> Result<f64> {
        // int_a^b ln(nu |t|^beta) dt for 0 <= a < b or a < b <= 0
        let f = |x: f64| {
            if x == 0.0 {
                0.0
            } else {
                x.abs() * (nu.ln() + beta * (x.abs().ln() - 1.0))
            }
        };
        if a >= 0.0 {
            Ok(f(b) - f(a))
        } else if b <= 0.0 {
            Ok(f(a) - f(b))
        } else {
            Err(invalid("interval", "must not straddle 0"))
        }
    };
    let mut value = 0.0;
    let mut error = 0.0;
    for (a, b) in [(lo, hi.min(0.0)), (lo.max(0.0), hi)] {
        if b > a {
            let e = integrate(ratio, a, b, tol, tol)?;
            value += e.value + part(a, b)?;
            error += e.error;
        }
    }
    finite(Estimate {
        value: Complex64::new(value, 0.0),
        error,
    })
}

fn finite(e: Estimate<Complex64>) -> Result<Estimate<Complex64>> {
    if e.value.re.is_finite() && e.value.im.is_finite() {
        Ok(e)
    } else {
        Err(Error::Quadrature {
            error: f64::INFINITY,
            tolerance: 1e-12,
        })
    }
}

fn exp_of(e: Estimate<Complex64>, scale: f64) -> Estimate<Complex64> {
    let value = (e.value * scale).exp();
    Estimate {
        value,
        error: value.norm() * (e.error * scale.abs()).exp_m1().max(e.error * scale.abs()),
    }
}

/// `Phi(z, s) = exp(-(1/2pi) int_0^pi ln(1 - z phi(t, s)) dt)`.
///
/// For laws with unbounded support only `s = 0` (or a zero cost) is
/// available. At `z = 1` the logarithmic singularity at `t = 0` is split off
/// using the expansion `1 - phi(t) ~ nu t^beta`.
pub fn phi_factor(
    z: f64,
    s: f64,
    law: &JumpLaw,
    g: &CostMap,
    tr: Transform,
) -> Result<Estimate<Complex64>> {
    let integral = log_integral(z, s, law, g, tr, 0.0, PI)?;
    Ok(exp_of(integral, -1.0 / (2.0 * PI)))
}

/// `exp(-(1/2pi) int_{-pi}^{pi} ln(1 - z phi(t, s)) dt)`, which equals
/// `Phi(z, s)^2` whenever `phi(., s)` is even in `t`.
pub fn phi_factor_full_circle(
    z: f64,
    s: f64,
    law: &JumpLaw,
    g: &CostMap,
    tr: Transform,
) -> Result<Estimate<Complex64>> {
    let integral = log_integral(z, s, law, g, tr, -PI, PI)?;
    Ok(exp_of(integral, -1.0 / (2.0 * PI)))
}

/// Ladder transform from the absorbing program against its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: Bounded,
    pub rhs: Estimate<Complex64>,
}

impl IdentityCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs.value - self.rhs.value).norm()
    }
}

/// `E[z^T w(s, C_T)]` against `1 - sqrt(1 - z E[w(s, eta)]) Phi(z, s)` for
/// an even cost map.
pub fn symmetric_identity(
    z: f64,
    s: f64,
    law: &JumpLaw,
    g: &CostMap,
    tr: Transform,
) -> Result<IdentityCheck> {
    let lat = JointLattice::new(law, g)?;
    if !g.is_even_on(&lat.support()) {
        return Err(Error::Parity(
            "cost map is not even on the jump support".into(),
        ));
    }
    let n = order_for(z * lat.max_weight(s, tr), 1e-14);
    let lhs = sb_lhs(z, 0.0, s, &lat, tr, n)?.ladder;
    let phi = phi_factor(z, s, law, g, tr)?;
    let root = (1.0 - z * lat.cost_transform(s, tr)).sqrt();
    let rhs = Estimate {
        value: 1.0 - root * phi.value,
        error: root.norm() * phi.error,
    };
    Ok(IdentityCheck { lhs, rhs })
}

/// Both sides of the mixed-parity factorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedCheck {
    /// `(1 - E[z^T w(s, C^e + C^o)]) (1 - E[z^T w(s, C^e - C^o)])`.
    pub lhs: Complex64,
    pub lhs_bound: f64,
    /// `(1 - z E[w(s, eta)]) exp(-(1/2pi) int_{-pi}^{pi} ln(1 - z phi(t, s)) dt)`.
    pub rhs: Complex64,
    pub rhs_error: f64,
}

impl MixedCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// Check the factorization for an even map plus an odd map.
pub fn mixed_identity_check(
    z: f64,
    s: f64,
    law: &JumpLaw,
    even: &CostMap,
    odd: &CostMap,
    tr: Transform,
) -> Result<MixedCheck> {
    let support = law.support()?;
    if !even.is_even_on(&support) {
        return Err(Error::Parity(
            "even cost map is not even on the jump support".into(),
        ));
    }
    if !odd.is_odd_on(&support) {
        return Err(Error::Parity(
            "odd cost map is not odd on the jump support".into(),
        ));
    }
    let plus = CostMap::Sum(Box::new(even.clone()), Box::new(odd.clone()));
    let minus = CostMap::Sum(
        Box::new(even.clone()),
        Box::new(CostMap::Scaled(Box::new(odd.clone()), -1.0)),
    );
    let lat_p = JointLattice::new(law, &plus)?;
    let lat_m = JointLattice::new(law, &minus)?;
    let n = order_for(
        z * lat_p.max_weight(s, tr).max(lat_m.max_weight(s, tr)),
        1e-14,
    );
    let a = sb_lhs(z, 0.0, s, &lat_p, tr, n)?.ladder;
    let b = sb_lhs(z, 0.0, s, &lat_m, tr, n)?.ladder;
    let (fa, fb) = (1.0 - a.value, 1.0 - b.value);
    let lhs = fa * fb;
    let lhs_bound = a.bound * fb.norm() + b.bound * fa.norm() + a.bound * b.bound;
    let full = phi_factor_full_circle(z, s, law, &plus, tr)?;
    let head = 1.0 - z * lat_p.cost_transform(s, tr);
    Ok(MixedCheck {
        lhs,
        lhs_bound,
        rhs: head * full.value,
        rhs_error: head.norm() * full.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn degenerate_up_step() {
        let lat = JointLattice::from_pmf(&[(1, 1.0)], &CostMap::Table(vec![(1, 2.0)])).unwrap();
        let (z, t, s) = (0.4, 0.3, 0.7);
        let l = sb_lhs(z, t, s, &lat, Transform::Fourier, 10).unwrap();
        let want = Complex64::from_polar(z, t + 2.0 * s);
        assert!((l.ladder.value - want).norm() < 1e-15);
        assert!((l.pre_passage.value - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn unbounded_law_rejected() {
        let zipf = JumpLaw::zipf(1.5).unwrap();
        assert_eq!(
            JointLattice::new(&zipf, &CostMap::Abs),
            Err(Error::UnboundedSupport)
        );
    }

    #[test]
    fn odd_map_rejected_for_symmetric_identity() {
        let law = JumpLaw::simple_symmetric();
        assert!(matches!(
            symmetric_identity(0.5, 0.1, &law, &CostMap::Identity, Transform::Fourier),
            Err(Error::Parity(_))
        ));
        assert!(matches!(
            mixed_identity_check(
                0.5,
                0.1,
                &law,
                &CostMap::Identity,
                &CostMap::Identity,
                Transform::Fourier
            ),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn phi_small_z_is_one() {
        let law = JumpLaw::simple_symmetric();
        let p = phi_factor(1e-9, 0.0, &law, &CostMap::Zero, Transform::Fourier).unwrap();
        assert!((p.value - c(1.0)).norm() < 1e-8);
    }
}
