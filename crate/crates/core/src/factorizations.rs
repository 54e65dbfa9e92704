//! Truncated infinite Beta-product factorizations and their Mellin transforms.
//!
//! A [`FactorizationPlan`] is a finite, explicitly scaled product of independent
//! Gamma and Beta factors,
//!
//! ```text
//! X_N = exp(global_log_scale) × ∏ exp(ℓ_j) Γ_{c_j} × ∏_{n<N} exp(ℓ_n) B_{a_n, b_n},
//! ```
//!
//! approximating one of four distributional identities:
//!
//! | target | law | Beta factors | `ℓ_n` |
//! |--------|-----|--------------|-------|
//! | inverse-stable | `Z_α^{-1}` | `B(α+nα, 1-α)` | `ψ(1+nα) - ψ(α+nα)` |
//! | gamma | `Γ_a` | `B(a+nb, b)` | `ψ(a+b+nb) - ψ(a+nb)` |
//! | theorem-decomposition | `Z_α^{-1}`, `α < 1/2` | `Γ_α` and `B(2α+nα, 1-2α)` | `ψ(1+nα) - ψ(2α+nα)` |
//! | power-alpha | `Z_α^{-α}` | `B(1+n/α, 1/α-1)` | `ψ((n+1)/α) - ψ(1+n/α)` |
//!
//! Every Beta scale is `-E[ln B]`, so each scaled factor has zero log-mean
//! and the partial products converge almost surely.

use crate::error::{Error, Result};
use crate::quad::{gauss_kronrod, gauss_kronrod_semi_infinite, Tolerance};
use crate::specfun::{digamma_unchecked, ln_gamma_ratio, ln_gamma_unchecked, tetragamma, trigamma_unchecked, EULER_GAMMA};
use crate::stable::StableParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn positive(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{what} must be finite and positive, got {v}")))
    }
}

fn nonnegative_order(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Mellin order must be finite and non-negative, got {s}")))
    }
}

/// `exp(log_scale) × B_{a,b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaFactor {
    pub a: f64,
    pub b: f64,
    pub log_scale: f64,
}

impl BetaFactor {
    pub fn new(a: f64, b: f64, log_scale: f64) -> Result<Self> {
        positive(a, "Beta shape a")?;
        positive(b, "Beta shape b")?;
        if !log_scale.is_finite() {
            return Err(Error::Parameter("log_scale must be finite".into()));
        }
        Ok(Self { a, b, log_scale })
    }

    /// The unit-log-mean factor `exp(ψ(a+b) - ψ(a)) B_{a,b}`.
    pub fn centered(a: f64, b: f64) -> Result<Self> {
        positive(a, "Beta shape a")?;
        positive(b, "Beta shape b")?;
        Self::new(a, b, digamma_unchecked(a + b) - digamma_unchecked(a))
    }

    /// `E[ln B_{a,b}] = ψ(a) - ψ(a+b)`.
    pub fn mean_log(&self) -> f64 {
        digamma_unchecked(self.a) - digamma_unchecked(self.a + self.b)
    }

    /// `Var[ln B_{a,b}] = ψ'(a) - ψ'(a+b)`.
    pub fn var_log(&self) -> f64 {
        trigamma_unchecked(self.a) - trigamma_unchecked(self.a + self.b)
    }

    /// `ln E[(exp(ℓ) B)^s] = ln[Γ(a+s)Γ(a+b) / (Γ(a)Γ(a+b+s))] + sℓ`.
    pub fn ln_mellin(&self, s: f64) -> f64 {
        ln_gamma_ratio(self.a, s) - ln_gamma_ratio(self.a + self.b, s) + s * self.log_scale
    }
}

/// `exp(log_scale) × Γ_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactor {
    pub c: f64,
    pub log_scale: f64,
}

impl GammaFactor {
    pub fn new(c: f64, log_scale: f64) -> Result<Self> {
        positive(c, "Gamma shape c")?;
        if !log_scale.is_finite() {
            return Err(Error::Parameter("log_scale must be finite".into()));
        }
        Ok(Self { c, log_scale })
    }

    /// `ln E[(exp(ℓ) Γ_c)^s] = ln Γ(c+s) - ln Γ(c) + sℓ`.
    pub fn ln_mellin(&self, s: f64) -> f64 {
        ln_gamma_ratio(self.c, s) + s * self.log_scale
    }
}

/// The distributional identity a plan truncates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// `Z_α^{-1}` as a pure Beta product.
    InverseStable { alpha: f64 },
    /// `Γ_a` as a Beta product with step `b`.
    Gamma { a: f64, b: f64 },
    /// `Z_α^{-1}` split into `Γ_α` times a Beta product, `α < 1/2`.
    TheoremDecomposition { alpha: f64 },
    /// `Z_α^{-α}`.
    PowerAlpha { alpha: f64 },
}

impl Target {
    pub fn tag(&self) -> &'static str {
        match self {
            Target::InverseStable { .. } => "inverse-stable",
            Target::Gamma { .. } => "gamma",
            Target::TheoremDecomposition { .. } => "theorem-decomposition",
            Target::PowerAlpha { .. } => "power-alpha",
        }
    }

    /// `ln E[X^s]` of the exact (untruncated) target law.
    pub fn ln_mellin(&self, s: f64) -> f64 {
        match *self {
            Target::InverseStable { alpha } | Target::TheoremDecomposition { alpha } => {
                ln_gamma_unchecked(1.0 + s / alpha) - ln_gamma_unchecked(1.0 + s)
            }
            Target::Gamma { a, .. } => ln_gamma_ratio(a, s),
            Target::PowerAlpha { alpha } => ln_gamma_unchecked(1.0 + s) - ln_gamma_unchecked(1.0 + alpha * s),
        }
    }
}

/// A truncated, explicitly scaled product of independent Gamma and Beta factors.
///
/// Plans are immutable once built; the truncation index is the number of
/// Beta factors.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationPlan {
    target: Target,
    global_log_scale: f64,
    gamma_factors: Vec<GammaFactor>,
    beta_factors: Vec<BetaFactor>,
}

impl FactorizationPlan {
    pub fn new(target: Target, global_log_scale: f64, gamma_factors: Vec<GammaFactor>, beta_factors: Vec<BetaFactor>) -> Result<Self> {
        if !global_log_scale.is_finite() {
            return Err(Error::Parameter("global_log_scale must be finite".into()));
        }
        Ok(Self { target, global_log_scale, gamma_factors, beta_factors })
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn global_log_scale(&self) -> f64 {
        self.global_log_scale
    }

    pub fn gamma_factors(&self) -> &[GammaFactor] {
        &self.gamma_factors
    }

    pub fn beta_factors(&self) -> &[BetaFactor] {
        &self.beta_factors
    }

    pub fn truncation_n(&self) -> usize {
        self.beta_factors.len()
    }

    /// JSON document `{target, alpha | a, b, N, global_log_scale, factors}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PlanDocument::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<PlanDocument>(s)?.try_into()
    }
}

fn check_terms(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Parameter("truncation index N must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `Z_α^{-1} ≈ e^{γ(1-1/α)} ∏_{n<N} e^{ψ(1+nα) - ψ(α+nα)} B_{α+nα, 1-α}`.
pub fn inverse_stable_plan(p: StableParams, n_terms: usize) -> Result<FactorizationPlan> {
    check_terms(n_terms)?;
    let a = p.alpha();
    let betas = (0..n_terms)
        .map(|n| {
            let first = a + n as f64 * a;
            let log_scale = digamma_unchecked(1.0 + n as f64 * a) - digamma_unchecked(first);
            BetaFactor::new(first, 1.0 - a, log_scale)
        })
        .collect::<Result<Vec<_>>>()?;
    FactorizationPlan::new(Target::InverseStable { alpha: a }, EULER_GAMMA * (1.0 - 1.0 / a), vec![], betas)
}

/// `Γ_a ≈ e^{ψ(a)} ∏_{n<N} e^{ψ(a+b+nb) - ψ(a+nb)} B_{a+nb, b}`.
pub fn gamma_plan(a: f64, b: f64, n_terms: usize) -> Result<FactorizationPlan> {
    positive(a, "a")?;
    positive(b, "b")?;
    check_terms(n_terms)?;
    let betas = (0..n_terms)
        .map(|n| {
            let first = a + n as f64 * b;
            BetaFactor::new(first, b, digamma_unchecked(first + b) - digamma_unchecked(first))
        })
        .collect::<Result<Vec<_>>>()?;
    FactorizationPlan::new(Target::Gamma { a, b }, digamma_unchecked(a), vec![], betas)
}

/// `Z_α^{-1} ≈ e^{γ(1-1/α) - ψ(α)} Γ_α ∏_{n<N} e^{ψ(1+nα) - ψ(2α+nα)} B_{2α+nα, 1-2α}`, `0 < α < 1/2`.
pub fn gamma_beta_decomposition_plan(p: StableParams, n_terms: usize) -> Result<FactorizationPlan> {
    let a = p.alpha();
    if a >= 0.5 {
        return Err(Error::Domain(format!(
            "the Gamma-Beta decomposition needs α < 1/2 (second Beta shape 1-2α > 0), got α = {a}; use the closed form 4Γ_(1/2) at α = 1/2"
        )));
    }
    check_terms(n_terms)?;
    let betas = (0..n_terms)
        .map(|n| {
            let nf = n as f64;
            let first = 2.0 * a + nf * a;
            BetaFactor::new(first, 1.0 - 2.0 * a, digamma_unchecked(1.0 + nf * a) - digamma_unchecked(first))
        })
        .collect::<Result<Vec<_>>>()?;
    FactorizationPlan::new(
        Target::TheoremDecomposition { alpha: a },
        EULER_GAMMA * (1.0 - 1.0 / a) - digamma_unchecked(a),
        vec![GammaFactor::new(a, 0.0)?],
        betas,
    )
}

/// `Z_α^{-α} ≈ e^{γ(α-1)} ∏_{n<N} e^{ψ((n+1)/α) - ψ(1+n/α)} B_{1+n/α, 1/α-1}`.
pub fn power_plan(p: StableParams, n_terms: usize) -> Result<FactorizationPlan> {
    check_terms(n_terms)?;
    let a = p.alpha();
    let betas = (0..n_terms)
        .map(|n| {
            let nf = n as f64;
            let first = 1.0 + nf / a;
            BetaFactor::new(first, 1.0 / a - 1.0, digamma_unchecked((nf + 1.0) / a) - digamma_unchecked(first))
        })
        .collect::<Result<Vec<_>>>()?;
    FactorizationPlan::new(Target::PowerAlpha { alpha: a }, EULER_GAMMA * (a - 1.0), vec![], betas)
}

/// `B_{a, b} = B_{a, b₁} × B_{a+b₁, b-b₁}` in law.
///
/// The second factor carries its own centering constant `ψ(a+b) - ψ(a+b₁)`;
/// the rest of the input's scale goes to the first factor, so the two
/// scales add up to the input's.
pub fn split_beta(f: &BetaFactor, b_part: f64) -> Result<(BetaFactor, BetaFactor)> {
    if !(b_part > 0.0 && b_part < f.b) {
        return Err(Error::Parameter(format!("split point must lie in (0, {}), got {b_part}", f.b)));
    }
    let second_scale = digamma_unchecked(f.a + f.b) - digamma_unchecked(f.a + b_part);
    let first = BetaFactor::new(f.a, b_part, f.log_scale - second_scale)?;
    let second = BetaFactor::new(f.a + b_part, f.b - b_part, second_scale)?;
    Ok((first, second))
}

/// `ln E[X_N^s]`, summed factor by factor.
pub fn plan_ln_mellin(plan: &FactorizationPlan, s: f64) -> Result<f64> {
    nonnegative_order(s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let gammas: f64 = plan.gamma_factors.iter().map(|g| g.ln_mellin(s)).sum();
    let betas: f64 = plan.beta_factors.iter().map(|b| b.ln_mellin(s)).sum();
    Ok(s * plan.global_log_scale + gammas + betas)
}

/// `E[X_N^s]`; fails with [`Error::Domain`] on overflow, where
/// [`plan_ln_mellin`] still applies.
pub fn plan_mellin(plan: &FactorizationPlan, s: f64) -> Result<f64> {
    let l = plan_ln_mellin(plan, s)?;
    let v = l.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("Mellin value overflows (ln value {l}); use plan_ln_mellin")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MellinProbe {
    pub s: f64,
    pub closed_form: f64,
    pub plan: f64,
    pub rel_error: f64,
}

/// Closed-form versus truncated-plan Mellin values at probe points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MellinReport {
    pub target: &'static str,
    #[serde(rename = "N")]
    pub truncation_n: usize,
    pub probes: Vec<MellinProbe>,
}

impl MellinReport {
    pub fn max_rel_error(&self) -> f64 {
        self.probes.iter().map(|p| p.rel_error).fold(0.0, f64::max)
    }
}

pub fn mellin_report(plan: &FactorizationPlan, probes: &[f64]) -> Result<MellinReport> {
    let probes = probes
        .iter()
        .map(|&s| {
            let ln_plan = plan_ln_mellin(plan, s)?;
            let ln_exact = plan.target.ln_mellin(s);
            Ok(MellinProbe {
                s,
                closed_form: ln_exact.exp(),
                plan: ln_plan.exp(),
                rel_error: (ln_plan - ln_exact).exp_m1().abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MellinReport { target: plan.target.tag(), truncation_n: plan.truncation_n(), probes })
}

const SAMPLE_CHUNK: usize = 4096;

/// `n` seed-deterministic draws of the truncated product.
///
/// Draws are produced in chunks, each from its own ChaCha stream, so the
/// output does not depend on the thread count.
pub fn sample_plan(plan: &FactorizationPlan, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Parameter("sample size must be at least 1".into()));
    }
    let gammas = plan
        .gamma_factors
        .iter()
        .map(|g| Gamma::new(g.c, 1.0).map_err(|e| Error::Parameter(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let betas = plan
        .beta_factors
        .iter()
        .map(|b| Beta::new(b.a, b.b).map_err(|e| Error::Parameter(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let ln_scale = plan.global_log_scale
        + plan.gamma_factors.iter().map(|g| g.log_scale).sum::<f64>()
        + plan.beta_factors.iter().map(|b| b.log_scale).sum::<f64>();
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let out: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
            (0..len)
                .map(|_| {
                    let mut l = ln_scale;
                    for g in &gammas {
                        l += g.sample(&mut rng).ln();
                    }
                    for b in &betas {
                        l += b.sample(&mut rng).ln();
                    }
                    l.exp()
                })
                .collect()
        })
        .collect();
    Ok(out.concat())
}

/// `Σ_{n≥N} Var[ln B_{α+nα, 1-α}] = Σ_{n≥N} ψ'(α+nα) - ψ'(1+nα)`.
///
/// Terms are summed explicitly until `α n ≥ 200`; the remainder is the
/// Euler–Maclaurin tail `∫ g + g/2 - g'/12`, with `∫_M^∞ g = (ψ(1+αM) - ψ(α+αM)) / α`.
pub fn truncation_tail_variance(p: StableParams, n_start: usize) -> f64 {
    let a = p.alpha();
    let term = |n: f64| trigamma_unchecked(a + n * a) - trigamma_unchecked(1.0 + n * a);
    let m = (n_start as f64).max((200.0 / a).ceil());
    let mut sum = 0.0;
    let mut n = n_start as f64;
    while n < m {
        sum += term(n);
        n += 1.0;
    }
    let integral = (digamma_unchecked(1.0 + a * m) - digamma_unchecked(a + a * m)) / a;
    let derivative = a * (tetragamma(a + a * m).unwrap_or(0.0) - tetragamma(1.0 + a * m).unwrap_or(0.0));
    sum + integral + 0.5 * term(m) - derivative / 12.0
}

/// Variance of the `n`-th scaled log-factor, `ψ'(α+nα) - ψ'(1+nα)`.
pub fn log_factor_variance(p: StableParams, n: usize) -> f64 {
    let a = p.alpha();
    let nf = n as f64;
    trigamma_unchecked(a + nf * a) - trigamma_unchecked(1.0 + nf * a)
}

/// `∫_0^∞ x e^{-αx}(1 - e^{-(1-α)x}) / ((1 - e^{-x})(1 - e^{-αx})) dx`, bounding the log-variances.
pub fn variance_bound_integral(p: StableParams) -> Result<f64> {
    let a = p.alpha();
    let integrand = |x: f64| {
        if x == 0.0 {
            return (1.0 - a) / a;
        }
        let num = x * (-a * x).exp() * -(-(1.0 - a) * x).exp_m1();
        let den = -(-x).exp_m1() * -(-a * x).exp_m1();
        num / den
    };
    let tol = Tolerance::relative(1e-13);
    let head = gauss_kronrod(integrand, 0.0, 1.0, tol)?;
    let tail = gauss_kronrod_semi_infinite(integrand, 1.0, tol)?;
    Ok(head.value + tail.value)
}

/// Returns `(exp(-(n-1)γ - Σ_{j<n} ψ(j/n)), n^n)`.
pub fn williams_constant_check(n: u32) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Parameter(format!("Williams factorization needs n ≥ 2, got {n}")));
    }
    let nf = f64::from(n);
    let psi_sum: f64 = (1..n).map(|j| digamma_unchecked(f64::from(j) / nf)).sum();
    let lhs = (-(nf - 1.0) * EULER_GAMMA - psi_sum).exp();
    Ok((lhs, nf.powf(nf)))
}

/// `e^{-st} - 1 + st`, without cancellation for small `st`.
fn exp_remainder(z: f64) -> f64 {
    // z = st ≥ 0
    if z < 1e-2 {
        let mut term = z * z / 2.0;
        let mut sum = 0.0_f64;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            k += 1.0;
            term *= -z / k;
        }
        sum
    } else {
        (-z).exp_m1() + z
    }
}

/// Returns `(ψ(a)s + ∫_0^∞ (e^{-st} - 1 + st) e^{-at} / (t(1 - e^{-t})) dt, ln Γ(a+s) - ln Γ(a))`.
pub fn malmsten_check(a: f64, s: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a.is_finite()) || !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("Malmsten representation needs a, s > 0, got a = {a}, s = {s}")));
    }
    let integrand = |t: f64| {
        if t == 0.0 {
            return 0.5 * s * s;
        }
        exp_remainder(s * t) * (-a * t).exp() / (t * -(-t).exp_m1())
    };
    let tol = Tolerance::relative(1e-13).with_abs(1e-15);
    let head = gauss_kronrod(integrand, 0.0, 1.0, tol)?;
    let tail = gauss_kronrod_semi_infinite(integrand, 1.0, tol)?;
    let rhs = digamma_unchecked(a) * s + head.value + tail.value;
    Ok((rhs, ln_gamma_unchecked(a + s) - ln_gamma_unchecked(a)))
}

// ---------------------------------------------------------------------------
// JSON wire format

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FactorDocument {
    Gamma { c: f64, log_scale: f64 },
    Beta { a: f64, b: f64, log_scale: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
struct PlanDocument {
    target: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    b: Option<f64>,
    #[serde(rename = "N")]
    n: usize,
    global_log_scale: f64,
    factors: Vec<FactorDocument>,
}

impl From<&FactorizationPlan> for PlanDocument {
    fn from(plan: &FactorizationPlan) -> Self {
        let (alpha, a, b) = match plan.target {
            Target::InverseStable { alpha } | Target::TheoremDecomposition { alpha } | Target::PowerAlpha { alpha } => {
                (Some(alpha), None, None)
            }
            Target::Gamma { a, b } => (None, Some(a), Some(b)),
        };
        let factors = plan
            .gamma_factors
            .iter()
            .map(|g| FactorDocument::Gamma { c: g.c, log_scale: g.log_scale })
            .chain(plan.beta_factors.iter().map(|f| FactorDocument::Beta { a: f.a, b: f.b, log_scale: f.log_scale }))
            .collect();
        PlanDocument {
            target: plan.target.tag().to_string(),
            alpha,
            a,
            b,
            n: plan.truncation_n(),
            global_log_scale: plan.global_log_scale,
            factors,
        }
    }
}

impl TryFrom<PlanDocument> for FactorizationPlan {
    type Error = Error;

    fn try_from(doc: PlanDocument) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Serialization(format!("missing field `{name}`")));
        let target = match doc.target.as_str() {
            "inverse-stable" => Target::InverseStable { alpha: need(doc.alpha, "alpha")? },
            "theorem-decomposition" => Target::TheoremDecomposition { alpha: need(doc.alpha, "alpha")? },
            "power-alpha" => Target::PowerAlpha { alpha: need(doc.alpha, "alpha")? },
            "gamma" => Target::Gamma { a: need(doc.a, "a")?, b: need(doc.b, "b")? },
            other => return Err(Error::Serialization(format!("unknown target `{other}`"))),
        };
        let mut gammas = Vec::new();
        let mut betas = Vec::new();
        for f in doc.factors {
            match f {
                FactorDocument::Gamma { c, log_scale } => gammas.push(GammaFactor::new(c, log_scale)?),
                FactorDocument::Beta { a, b, log_scale } => betas.push(BetaFactor::new(a, b, log_scale)?),
            }
        }
        if betas.len() != doc.n {
            return Err(Error::Serialization(format!("N = {} but {} Beta factors listed", doc.n, betas.len())));
        }
        FactorizationPlan::new(target, doc.global_log_scale, gammas, betas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64) -> StableParams {
        StableParams::new(a).unwrap()
    }

    #[test]
    fn first_inverse_stable_factor_at_half() {
        let plan = inverse_stable_plan(alpha(0.5), 1).unwrap();
        let f = plan.beta_factors()[0];
        assert_eq!((f.a, f.b), (0.5, 0.5));
        assert!((f.log_scale.exp() - 4.0).abs() < 1e-13);
        assert!((plan.global_log_scale() + EULER_GAMMA).abs() < 1e-15);
    }

    #[test]
    fn zero_terms_rejected() {
        assert!(matches!(inverse_stable_plan(alpha(0.5), 0), Err(Error::Parameter(_))));
        assert!(matches!(gamma_plan(1.0, 1.0, 0), Err(Error::Parameter(_))));
        assert!(matches!(power_plan(alpha(0.5), 0), Err(Error::Parameter(_))));
        assert!(matches!(gamma_plan(-1.0, 1.0, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn decomposition_rejects_half_and_above() {
        assert!(matches!(gamma_beta_decomposition_plan(alpha(0.5), 10), Err(Error::Domain(_))));
        assert!(matches!(gamma_beta_decomposition_plan(alpha(0.7), 10), Err(Error::Domain(_))));
        let plan = gamma_beta_decomposition_plan(alpha(0.3), 4).unwrap();
        assert_eq!(plan.gamma_factors().len(), 1);
        assert_eq!(plan.gamma_factors()[0].c, 0.3);
        assert!((plan.beta_factors()[2].a - 1.2).abs() < 1e-15);
        assert!((plan.beta_factors()[2].b - 0.4).abs() < 1e-15);
    }

    #[test]
    fn empty_plan_and_zeroth_moment() {
        let plan = FactorizationPlan::new(Target::Gamma { a: 1.0, b: 1.0 }, 0.0, vec![], vec![]).unwrap();
        for s in [0.0, 0.5, 3.0] {
            assert_eq!(plan_mellin(&plan, s).unwrap(), 1.0);
        }
        let plan = power_plan(alpha(0.4), 50).unwrap();
        assert_eq!(plan_mellin(&plan, 0.0).unwrap(), 1.0);
        assert!(matches!(plan_mellin(&plan, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn single_gamma_factor() {
        let plan = FactorizationPlan::new(Target::Gamma { a: 0.5, b: 1.0 }, 0.0, vec![GammaFactor::new(0.5, 0.0).unwrap()], vec![]).unwrap();
        assert!((plan_mellin(&plan, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn overflow_is_reported() {
        let plan = FactorizationPlan::new(Target::Gamma { a: 1.0, b: 1.0 }, 10.0, vec![], vec![]).unwrap();
        assert!(plan_mellin(&plan, 100.0).is_err());
        assert_eq!(plan_ln_mellin(&plan, 100.0).unwrap(), 1000.0);
    }

    #[test]
    fn split_examples() {
        let a = 0.3;
        let f = inverse_stable_plan(alpha(a), 5).unwrap().beta_factors()[3];
        let (x, y) = split_beta(&f, a).unwrap();
        let n = 3.0;
        assert!((x.a - (a + n * a)).abs() < 1e-15 && (x.b - a).abs() < 1e-15);
        assert!((y.a - (2.0 * a + n * a)).abs() < 1e-15 && (y.b - (1.0 - 2.0 * a)).abs() < 1e-15);
        assert!((x.log_scale - (digamma_unchecked(2.0 * a + n * a) - digamma_unchecked(a + n * a))).abs() < 1e-14);
        assert!((y.log_scale - (digamma_unchecked(1.0 + n * a) - digamma_unchecked(2.0 * a + n * a))).abs() < 1e-14);
        assert!(split_beta(&f, 0.0).is_err());
        assert!(split_beta(&f, f.b).is_err());
    }

    #[test]
    fn split_near_full_width_leaves_unit_factor() {
        let f = BetaFactor::centered(0.7, 0.9).unwrap();
        let (_, y) = split_beta(&f, 0.9 - 1e-12).unwrap();
        assert!((y.ln_mellin(1.0)).abs() < 1e-10);
    }

    #[test]
    fn williams_small_cases() {
        let (l, r) = williams_constant_check(2).unwrap();
        assert!((l - 4.0).abs() < 1e-12 && r == 4.0);
        let (l, r) = williams_constant_check(3).unwrap();
        assert!(((l - 27.0) / 27.0).abs() < 1e-10 && r == 27.0);
        assert!(williams_constant_check(1).is_err());
    }

    #[test]
    fn malmsten_trivial_case() {
        let (rhs, lhs) = malmsten_check(1.0, 1.0).unwrap();
        assert!(lhs.abs() < 1e-15 && rhs.abs() < 1e-8);
        assert!(malmsten_check(0.0, 1.0).is_err());
    }

    #[test]
    fn json_round_trip_keeps_exact_values() {
        let plan = gamma_beta_decomposition_plan(alpha(0.25), 7).unwrap();
        let back = FactorizationPlan::from_json(&plan.to_json().unwrap()).unwrap();
        assert_eq!(plan, back);
        let plan = gamma_plan(0.5, 0.25, 3).unwrap();
        assert_eq!(plan, FactorizationPlan::from_json(&plan.to_json().unwrap()).unwrap());
    }

    #[test]
    fn json_field_names() {
        let v: serde_json::Value = serde_json::from_str(&inverse_stable_plan(alpha(0.5), 2).unwrap().to_json().unwrap()).unwrap();
        assert_eq!(v["target"], "inverse-stable");
        assert_eq!(v["alpha"], 0.5);
        assert_eq!(v["N"], 2);
        assert!(v["global_log_scale"].is_number());
        assert_eq!(v["factors"][0]["kind"], "beta");
        assert_eq!(v["factors"][0]["a"], 0.5);
        assert!(v["factors"][0]["log_scale"].is_number());
        let v: serde_json::Value = serde_json::from_str(&gamma_plan(2.0, 1.0, 1).unwrap().to_json().unwrap()).unwrap();
        assert_eq!((v["a"].as_f64(), v["b"].as_f64()), (Some(2.0), Some(1.0)));
        assert!(v.get("alpha").is_none());
    }

    #[test]
    fn json_rejects_inconsistent_n() {
        let doc = r#"{"target":"gamma","a":1,"b":1,"N":2,"global_log_scale":0,"factors":[{"kind":"beta","a":1,"b":1,"log_scale":0}]}"#;
        assert!(matches!(FactorizationPlan::from_json(doc), Err(Error::Serialization(_))));
    }
}
