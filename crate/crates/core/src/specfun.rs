//! Real special functions on the positive half-line.
//!
//! `ln Γ` uses a Taylor series around 1 on `[0.5, 1.5]`, downward
//! recurrence below 10 and the Stirling series above. Digamma and
//! trigamma shift the argument above 10 and use their asymptotic series.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Euler–Mascheroni constant, `-ψ(1)`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// `ζ(k) - 1` for `k = 2, 3, …`.
#[allow(clippy::excessive_precision)]
const ZETA_MINUS_ONE: [f64; 36] = [
    6.44934066848226406e-01,
    2.02056903159594292e-01,
    8.23232337111381857e-02,
    3.69277551433699266e-02,
    1.73430619844491402e-02,
    8.34927738192282713e-03,
    4.07735619794433960e-03,
    2.00839282608221426e-03,
    9.94575127818085256e-04,
    4.94188604119464529e-04,
    2.46086553308048320e-04,
    1.22713347578489145e-04,
    6.12481350587048277e-05,
    3.05882363070204933e-05,
    1.52822594086518710e-05,
    7.63719763789976257e-06,
    3.81729326499984022e-06,
    1.90821271655393897e-06,
    9.53962033872796212e-07,
    4.76932986787806447e-07,
    2.38450502727733004e-07,
    1.19219925965311064e-07,
    5.96081890512594801e-08,
    2.98035035146522793e-08,
    1.49015548283650427e-08,
    7.45071178983543006e-09,
    3.72533402478845728e-09,
    1.86265972351304914e-09,
    9.31327432419668166e-10,
    4.65662906503378366e-10,
    2.32831183367650534e-10,
    1.16415501727005193e-10,
    5.82077208790270145e-11,
    2.91038504449710001e-11,
    1.45519218910419849e-11,
    7.27595983505748180e-12,
];

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

// B_{2k}, k = 1..8
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const ASYMPTOTIC_THRESHOLD: f64 = 10.0;

fn check_arg(x: f64, name: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} requires a finite positive argument, got {x}")))
    }
}

/// `ln Γ(x)` for finite `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_arg(x, "ln_gamma")?;
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x
        return ln_gamma_1p(x) - x.ln();
    }
    if x <= 1.5 {
        return ln_gamma_1p(x - 1.0);
    }
    if x < ASYMPTOTIC_THRESHOLD {
        // Walk down into [0.5, 1.5]: Γ(x) = (x-1)(x-2)…(y) Γ(y).
        let mut y = x;
        let mut prod = 1.0;
        while y > 1.5 {
            y -= 1.0;
            prod *= y;
        }
        let log_prod = if prod < 2.0 { (prod - 1.0).ln_1p() } else { prod.ln() };
        return log_prod + ln_gamma_1p(y - 1.0);
    }
    stirling(x)
}

/// Taylor series of `ln Γ(1 + z)`, used for `|z| ≤ 1/2`.
fn ln_gamma_1p(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = z * z;
    let mut sign = 1.0;
    for (i, c) in ZETA_MINUS_ONE.iter().enumerate() {
        let k = (i + 2) as f64;
        let term = sign * c * zk / k;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        zk *= z;
        sign = -sign;
    }
    (1.0 - EULER_GAMMA) * z - z.ln_1p() + sum
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        let term = c * p;
        corr += term;
        if term.abs() < 1e-17 * corr.abs() {
            break;
        }
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

/// Digamma `ψ(x) = d/dx ln Γ(x)` for finite `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_arg(x, "digamma")?;
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(x: f64) -> f64 {
    let mut y = x;
    let mut shift = 0.0;
    while y < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let term = b / (2.0 * (k + 1) as f64) * p;
        series += term;
        if term.abs() < 1e-18 {
            break;
        }
        p *= inv2;
    }
    y.ln() - 0.5 * inv - series - shift
}

/// Trigamma `ψ'(x)` for finite `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check_arg(x, "trigamma")?;
    Ok(trigamma_unchecked(x))
}

pub(crate) fn trigamma_unchecked(x: f64) -> f64 {
    let mut y = x;
    let mut shift = 0.0;
    // 1/x² dominates for small x; carry it with its rounding error.
    let (lead_hi, lead_lo) = if x < 1.0 {
        y += 1.0;
        inv_square_split(x)
    } else {
        (0.0, 0.0)
    };
    while y < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv * inv2;
    for b in BERNOULLI {
        let term = b * p;
        series += term;
        if term.abs() < 1e-18 {
            break;
        }
        p *= inv2;
    }
    let tail = inv + 0.5 * inv2 + series + shift;
    lead_hi + (lead_lo + tail)
}

/// Tetragamma `ψ''(x)`; used for Euler–Maclaurin remainders of trigamma sums.
pub fn tetragamma(x: f64) -> Result<f64> {
    check_arg(x, "tetragamma")?;
    let mut y = x;
    let mut shift = 0.0;
    while y < ASYMPTOTIC_THRESHOLD {
        shift -= 2.0 / (y * y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv2 * inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        series += (2 * k + 3) as f64 * b * p;
        p *= inv2;
    }
    Ok(-inv2 - inv2 * inv - series + shift)
}

/// `1/x²` as an unevaluated sum `hi + lo`.
fn inv_square_split(x: f64) -> (f64, f64) {
    let r = 1.0 / x;
    // 1/x = r (1 + e) exactly up to O(e²)
    let e = (-r).mul_add(x, 1.0);
    let hi = r * r;
    let lo = r.mul_add(r, -hi);
    (hi, lo + 2.0 * e * hi)
}

/// `sin(π t)` with exact reduction of `t` modulo 2.
pub fn sin_pi(t: f64) -> f64 {
    let r = t.rem_euclid(2.0);
    // sin(π r) on [0, 2): fold onto [-1/2, 1/2]
    let (s, y) = if r <= 0.5 {
        (1.0, r)
    } else if r <= 1.5 {
        (-1.0, r - 1.0)
    } else {
        (1.0, r - 2.0)
    };
    s * (PI * y).sin()
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    check_arg(a, "ln_beta")?;
    check_arg(b, "ln_beta")?;
    Ok(ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b))
}

/// `ln(Γ(a + s) / Γ(a))`, evaluated to keep relative accuracy when `s ≪ a`.
pub(crate) fn ln_gamma_ratio(a: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if a >= ASYMPTOTIC_THRESHOLD && s.abs() < a {
        return stirling_difference(a, s);
    }
    ln_gamma_unchecked(a + s) - ln_gamma_unchecked(a)
}

/// Stirling form of `ln Γ(a+s) - ln Γ(a)` without subtracting two large logs.
fn stirling_difference(a: f64, s: f64) -> f64 {
    let b = a + s;
    // (b - 1/2) ln b - (a - 1/2) ln a - s
    //   = (b - 1/2) ln(1 + s/a) + s ln a - s
    let main = (b - 0.5) * (s / a).ln_1p() + s * a.ln() - s;
    let corr = |x: f64| {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut c = 0.0;
        let mut p = inv;
        for k in STIRLING {
            c += k * p;
            p *= inv2;
        }
        c
    };
    main + (corr(b) - corr(a))
}
