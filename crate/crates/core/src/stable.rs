//! The positive α-stable law, normalized by `E[exp(-λ Z_α)] = exp(-λ^α)`.
//!
//! The density is evaluated from its convergent power series in `x^{-α}`
//! wherever that series is well conditioned, and otherwise from Kanter's
//! positive integral representation
//!
//! ```text
//! f_α(x) = γ / π · x^{-1-γ} ∫_0^π K(u) exp(-K(u) x^{-γ}) du,   γ = α / (1 - α)
//! K(u)   = (sin(αu) / sin u)^{1/(1-α)} · sin((1-α)u) / sin(αu)
//! ```
//!
//! which is also the basis of the exact sampler `Z = (K(U) / E)^{1/γ}`.

use crate::error::{Error, Result};
use crate::quad::{gauss_kronrod, Tolerance};
use crate::specfun::{ln_gamma_unchecked, sin_pi};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest accepted ratio `Σ|term| / |sum|` before the series is abandoned.
pub const SERIES_CANCELLATION_LIMIT: f64 = 100.0;
/// Term cap of the density series.
pub const SERIES_MAX_TERMS: usize = 100_000;
const SERIES_REL_STOP: f64 = 1e-15;
const INTEGRAL_TOL: Tolerance = Tolerance::relative(1e-14);

/// Stability index `α ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StableParams {
    alpha: f64,
}

impl StableParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self { alpha })
        } else {
            Err(Error::Domain(format!("stability index must lie in (0, 1), got {alpha}")))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exponent `α / (1 - α)` of the Kanter representation.
    pub fn kanter_exponent(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }

    /// `K(0⁺) = α^{α/(1-α)} (1 - α)`, the minimum of the Kanter function.
    pub fn kanter_minimum(&self) -> f64 {
        let a = self.alpha;
        (self.kanter_exponent() * a.ln()).exp() * (1.0 - a)
    }

    /// `ln K(u)` for `u ∈ (0, π)`.
    pub fn ln_kanter(&self, u: f64) -> f64 {
        let a = self.alpha;
        // sin u is taken from the nearer endpoint to keep relative accuracy near π
        let sin_u = if u > 0.5 * PI { (PI - u).sin() } else { u.sin() };
        let ln_sa = (a * u).sin().ln();
        (ln_sa - sin_u.ln()) / (1.0 - a) + ((1.0 - a) * u).sin().ln() - ln_sa
    }
}

impl TryFrom<f64> for StableParams {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<StableParams> for f64 {
    fn from(p: StableParams) -> f64 {
        p.alpha
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("density argument must be finite and positive, got {x}")))
    }
}

/// Outcome of summing the large-`x` series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// `Σ |term|`; the ratio to `|value|` measures cancellation.
    pub abs_sum: f64,
    pub terms: usize,
}

impl SeriesSum {
    pub fn cancellation(&self) -> f64 {
        self.abs_sum / self.value.abs()
    }
}

/// Sums `(1/π) Σ_{k≥1} (-1)^{k+1} Γ(kα+1)/k! sin(πkα) x^{-kα-1}`.
///
/// Stops once the term magnitude drops below `1e-15 ×` the partial sum
/// past the peak of the term sequence, or fails after
/// [`SERIES_MAX_TERMS`] terms. `abort_abs_sum` ends the summation early
/// (returning the partial state) once `Σ|term|` exceeds it.
pub fn density_series_raw(p: StableParams, x: f64, abort_abs_sum: f64) -> Result<SeriesSum> {
    check_x(x)?;
    let a = p.alpha;
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut prev_mag = 0.0_f64;
    let mut last_mag = 0.0;
    for k in 1..=SERIES_MAX_TERMS {
        let kf = k as f64;
        let ka = kf * a;
        let ln_mag = ln_gamma_unchecked(ka + 1.0) - ln_gamma_unchecked(kf + 1.0) - (ka + 1.0) * ln_x;
        let mag = ln_mag.exp() / PI;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * mag * sin_pi(ka);
        sum += term;
        abs_sum += term.abs();
        last_mag = mag;
        if abs_sum > abort_abs_sum {
            return Ok(SeriesSum { value: sum, abs_sum, terms: k });
        }
        let decreasing = mag <= prev_mag;
        if decreasing && mag < SERIES_REL_STOP * sum.abs() {
            return Ok(SeriesSum { value: sum, abs_sum, terms: k });
        }
        if decreasing && mag == 0.0 {
            return Ok(SeriesSum { value: sum, abs_sum, terms: k });
        }
        prev_mag = mag;
    }
    Err(Error::Convergence { terms: SERIES_MAX_TERMS, last_term: last_mag })
}

/// `f_α(x)`: the power series where it is well conditioned, otherwise
/// the Kanter integral.
pub fn density_series(p: StableParams, x: f64) -> Result<f64> {
    check_x(x)?;
    // f_α(x) ≤ γ / (e x), so a larger Σ|term| already exceeds the cancellation limit.
    let bound = p.kanter_exponent() / (std::f64::consts::E * x);
    let abort = SERIES_CANCELLATION_LIMIT * bound;
    match density_series_raw(p, x, abort) {
        Ok(s) if s.abs_sum <= abort && s.value > 0.0 && s.cancellation() <= SERIES_CANCELLATION_LIMIT => {
            Ok(s.value)
        }
        Ok(_) | Err(Error::Convergence { .. }) => density_integral(p, x),
        Err(e) => Err(e),
    }
}

/// `f_α(x)` from the Kanter integral alone.
pub fn density_integral(p: StableParams, x: f64) -> Result<f64> {
    check_x(x)?;
    let g = p.kanter_exponent();
    let zeta = (-g * x.ln()).exp();
    let k0 = p.kanter_minimum();
    let ln_prefactor = (g / PI).ln() - (1.0 + g) * x.ln() - k0 * zeta;
    if ln_prefactor < -745.0 - 10.0 {
        // the integral is at most O(1 / ζ), so the density underflows
        return Ok(0.0);
    }
    let integrand = |u: f64| {
        if u <= 0.0 || u >= PI {
            return 0.0;
        }
        let ln_k = p.ln_kanter(u);
        let k = ln_k.exp();
        let e = ln_k - (k - k0) * zeta;
        if e < -745.0 {
            0.0
        } else {
            e.exp()
        }
    };
    let r = gauss_kronrod(integrand, 0.0, PI, INTEGRAL_TOL)?;
    Ok((ln_prefactor + r.value.ln()).exp())
}

/// The closed form `f_{1/2}(x) = exp(-1/(4x)) / (2 √(π x³))`.
pub fn density_half(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok((-0.25 / x).exp() / (2.0 * (PI * x * x * x).sqrt()))
}

/// Density of `Z_α^q` at `y`, `q ≠ 0`: `f_α(y^{1/q}) |y^{1/q - 1} / q|`.
pub fn power_density(p: StableParams, q: f64, y: f64) -> Result<f64> {
    if q == 0.0 || !q.is_finite() {
        return Err(Error::Domain(format!("power q must be finite and nonzero, got {q}")));
    }
    check_x(y)?;
    let ly = y.ln() / q;
    let x = ly.exp();
    if x == 0.0 || !x.is_finite() {
        return Ok(0.0);
    }
    let f = density_series(p, x)?;
    Ok(f * (ly - y.ln()).exp() / q.abs())
}

/// `E[Z_α^{-s}] = Γ(1 + s/α) / Γ(1 + s)` for `s ≥ 0`.
pub fn mellin_inverse_moment(p: StableParams, s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Domain(format!("moment order must be finite and non-negative, got {s}")));
    }
    Ok((ln_gamma_unchecked(1.0 + s / p.alpha) - ln_gamma_unchecked(1.0 + s)).exp())
}

/// Lower cut-off below which `f_α` is below `e^{-750}` relative to its bulk.
fn lower_cutoff(p: StableParams) -> f64 {
    let g = p.kanter_exponent();
    (750.0 / p.kanter_minimum()).powf(-1.0 / g)
}

/// `∫ h(x) f_α(x) dx` over `(x_lo, x_hi)`, integrating in `ln x`.
fn integrate_against_density<H: Fn(f64) -> f64>(p: StableParams, h: H, x_hi: f64, tol: Tolerance) -> Result<f64> {
    let t_lo = lower_cutoff(p).ln();
    let t_hi = x_hi.ln();
    // A density failure inside the quadrature is recorded and reported afterwards.
    let failure = std::sync::Mutex::new(None);
    let integrand = |t: f64| {
        let x = t.exp();
        let hx = h(x);
        if hx == 0.0 {
            return 0.0;
        }
        match density_series(p, x) {
            Ok(f) => hx * f * x,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            }
        }
    };
    let r = gauss_kronrod(integrand, t_lo, t_hi, tol)?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(r.value)
}

/// Returns `(∫ e^{-λx} f_α(x) dx, e^{-λ^α})`.
pub fn laplace_check(p: StableParams, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("Laplace argument must be positive, got {lambda}")));
    }
    let exact = (-lambda.powf(p.alpha)).exp();
    let quad = integrate_against_density(p, |x| (-lambda * x).exp(), 60.0 / lambda, Tolerance::absolute(1e-11))?;
    Ok((quad, exact))
}

/// `∫ x^{-s} f_α(x) dx` by quadrature; compare with [`mellin_inverse_moment`].
pub fn inverse_moment_quadrature(p: StableParams, s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Domain(format!("moment order must be finite and non-negative, got {s}")));
    }
    // x^{1-s} f_α(x) ~ x^{-s-α} in ln x; cut where it is below 1e-15
    let x_hi = (35.0 / (s + p.alpha)).exp();
    let tol = Tolerance::relative(1e-11).with_abs(1e-13);
    integrate_against_density(p, |x| (-s * x.ln()).exp(), x_hi, tol)
}

/// `n` exact, seed-deterministic draws of `Z_α` by Kanter's method.
pub fn sample_oracle(p: StableParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Parameter("sample size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inv_g = 1.0 / p.kanter_exponent();
    Ok((0..n)
        .map(|_| {
            let u: f64 = Open01.sample(&mut rng);
            let e: f64 = Exp1.sample(&mut rng);
            (inv_g * (p.ln_kanter(PI * u) - e.ln())).exp()
        })
        .collect())
}
