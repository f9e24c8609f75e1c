//! Riemann zeta and the cosine lattice sum used by the Zipf jump law.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Natural log of |Gamma(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

// B_2, B_4, ..., B_20
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta for real `x != 1`.
///
/// Euler-Maclaurin summation for `x > 1/2`, the functional equation below.
pub fn zeta(x: f64) -> Result<f64> {
    if !x.is_finite() || x == 1.0 {
        return Err(Error::Domain(format!("zeta is undefined at {x}")));
    }
    if x >= 0.5 {
        return Ok(zeta_em(x));
    }
    if x == 0.0 {
        return Ok(-0.5);
    }
    // trivial zeros
    if x < 0.0 && (x / 2.0).fract() == 0.0 {
        return Ok(0.0);
    }
    // zeta(x) = 2 (2 pi)^(x-1) sin(pi x / 2) Gamma(1-x) zeta(1-x)
    let y = 1.0 - x;
    let log_mag = std::f64::consts::LN_2 + (x - 1.0) * (2.0 * PI).ln() + ln_gamma(y);
    let sign_gamma = if y > 0.0 { 1.0 } else { gamma(y).signum() };
    Ok(sign_gamma * log_mag.exp() * (PI * x / 2.0).sin() * zeta_em(y))
}

fn zeta_em(x: f64) -> f64 {
    const N: usize = 12;
    let n = N as f64;
    let mut head = 0.0;
    for k in (1..N).rev() {
        head += (k as f64).powf(-x);
    }
    let mut tail = n.powf(1.0 - x) / (x - 1.0) + 0.5 * n.powf(-x);
    // rising factorial x (x+1) ... (x+2k-2) / (2k)! times N^(-x-2k+1)
    let mut factor = x / 2.0 * n.powf(-x - 1.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = (k + 1) as f64;
        if k > 1.0 {
            let a = x + 2.0 * k - 3.0;
            factor *= a * (a + 1.0) / ((2.0 * k - 1.0) * (2.0 * k)) / (n * n);
        }
        tail += b * factor;
    }
    head + tail
}

/// Value and error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T = f64> {
    pub value: T,
    pub error: f64,
}

/// `sum_{k >= 1} k^(-s) (1 - cos(k t))` for `1 < s < 3` and `0 <= t <= pi`.
///
/// Uses the expansion of the periodic zeta function around `t = 0`; the
/// non-analytic term carries the `t^(s-1)` behaviour and the remaining power
/// series converges geometrically with ratio at most 1/4 on `[0, pi]`.
pub fn one_minus_cos_sum(s: f64, t: f64) -> Result<Estimate> {
    if !(s > 1.0 && s < 3.0) {
        return Err(Error::Domain(format!("exponent {s} outside (1, 3)")));
    }
    if !(0.0..=PI).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, pi]")));
    }
    if t == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    if (s - 2.0).abs() < 1e-9 {
        let value = PI * t / 2.0 - t * t / 4.0;
        return Ok(Estimate {
            value,
            error: 4.0 * f64::EPSILON * value.abs(),
        });
    }
    let singular = -gamma(1.0 - s) * t.powf(s - 1.0) * (PI * (s - 1.0) / 2.0).cos();
    let mut series = 0.0;
    let mut tpow = 1.0;
    let mut last = f64::INFINITY;
    for j in 1..80 {
        let jf = j as f64;
        tpow *= t * t / ((2.0 * jf - 1.0) * (2.0 * jf));
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * zeta(s - 2.0 * jf)? * tpow;
        series += term;
        last = term.abs();
        if last <= 1e-17 * (singular.abs() + series.abs()) {
            let value = singular - series;
            return Ok(Estimate {
                value,
                error: 2.0 * last + 8.0 * f64::EPSILON * value.abs(),
            });
        }
    }
    Err(Error::NonConvergent(format!(
        "cosine lattice sum at s = {s}, t = {t}: last term {last:e}"
    )))
}
