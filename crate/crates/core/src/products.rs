//! Densities of finite products `Γ_c × B_{a₁,b₁} × … × B_{aₙ,bₙ}` of independent factors.
//!
//! The Beta factors are composed first on `(0, 1)`,
//!
//! ```text
//! f₁₂(y) = L ∫₀¹ f₁(y^θ) f₂(y^{1-θ}) dθ,   L = -ln y,
//! ```
//!
//! and the Gamma factor is applied last through
//!
//! ```text
//! g(x) = x^{c-1} / Γ(c) ∫₀¹ e^{-x/y} y^{-c} f(y) dy.
//! ```
//!
//! The outer integral uses fixed Kronrod panels in `ln y` on `(0, ½]` and in
//! `ln(1 - y)` on `[½, 1)`, so the Beta-product values are computed once per
//! [`ProductDensity`] and every `g(x)` is a weighted exponential sum. The
//! quadrature error is then a smooth function of `x`, which keeps high-order
//! finite differences of `g` clean.

use crate::error::{Error, Result};
use crate::quad::{tanh_sinh, KronrodPanels};
use crate::specfun::{ln_beta, ln_gamma_unchecked};
use rayon::prelude::*;
use std::fmt::Write as _;

/// More Beta factors than this compound the nested quadrature error.
pub const MAX_BETA_FACTORS: usize = 6;

/// Default grid resolution.
pub const NODES_PER_DECADE: usize = 400;

/// Probability mass left outside the default grid on each side.
const GRID_TAIL_MASS: f64 = 1e-6;

const INNER_REL_TOL: f64 = 1e-13;
const PANEL_WIDTH: f64 = 0.25;
/// `e^{-x/y}` at `y = x_min e^{-6}` is `e^{-403}`.
const KERNEL_LOWER_MARGIN: f64 = 6.0;

/// Factors of an independent product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpec {
    gamma_shape: Option<f64>,
    beta_factors: Vec<(f64, f64)>,
}

impl ProductSpec {
    pub fn new(gamma_shape: Option<f64>, beta_factors: Vec<(f64, f64)>) -> Result<Self> {
        if gamma_shape.is_none() && beta_factors.is_empty() {
            return Err(Error::Parameter("product needs at least one factor".into()));
        }
        if beta_factors.len() > MAX_BETA_FACTORS {
            return Err(Error::Parameter(format!(
                "at most {MAX_BETA_FACTORS} Beta factors are supported, got {}",
                beta_factors.len()
            )));
        }
        if let Some(c) = gamma_shape {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Parameter(format!("Gamma shape must be positive, got {c}")));
            }
        }
        for &(a, b) in &beta_factors {
            if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
                return Err(Error::Parameter(format!("Beta shapes must be positive, got ({a}, {b})")));
            }
        }
        Ok(Self { gamma_shape, beta_factors })
    }

    pub fn gamma(c: f64) -> Result<Self> {
        Self::new(Some(c), vec![])
    }

    pub fn gamma_shape(&self) -> Option<f64> {
        self.gamma_shape
    }

    pub fn beta_factors(&self) -> &[(f64, f64)] {
        &self.beta_factors
    }

    /// `c` is defined and `c < min aᵢ`: the product density is then HCM.
    pub fn satisfies_hcm_hypothesis(&self) -> bool {
        match self.gamma_shape {
            Some(c) => self.beta_factors.iter().all(|&(a, _)| c < a),
            None => false,
        }
    }

    /// `ln E[X^s]`, defined for `s > -min(c, aᵢ)`.
    pub fn ln_mellin(&self, s: f64) -> Result<f64> {
        if s <= -self.min_shape() {
            return Err(Error::Domain(format!("E[X^s] is infinite for s = {s} ≤ -{}", self.min_shape())));
        }
        let mut l = 0.0;
        if let Some(c) = self.gamma_shape {
            l += ln_gamma_unchecked(c + s) - ln_gamma_unchecked(c);
        }
        for &(a, b) in &self.beta_factors {
            l += ln_gamma_unchecked(a + s) - ln_gamma_unchecked(a) + ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a + b + s);
        }
        Ok(l)
    }

    fn min_shape(&self) -> f64 {
        self.beta_factors.iter().map(|&(a, _)| a).chain(self.gamma_shape).fold(f64::INFINITY, f64::min)
    }
}

/// Density of `∏ B_{aᵢ,bᵢ}`, evaluated at `y = e^{-l}`.
#[derive(Debug, Clone)]
struct BetaProduct {
    factors: Vec<(f64, f64, f64)>,
}

impl BetaProduct {
    fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        let factors = pairs
            .iter()
            .map(|&(a, b)| Ok((a, b, ln_beta(a, b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors })
    }

    fn single(&self, k: usize, l: f64) -> f64 {
        let (a, b, lb) = self.factors[k];
        // y = e^{-l}, 1 - y = -expm1(-l)
        ((a - 1.0) * -l + (b - 1.0) * (-(-l).exp_m1()).ln() - lb).exp()
    }

    /// Density of the product of the first `k + 1` factors.
    fn partial(&self, k: usize, l: f64) -> Result<f64> {
        if k == 0 {
            return Ok(self.single(0, l));
        }
        let failure = std::cell::RefCell::new(None);
        let r = tanh_sinh(
            |t, tc| {
                let (inner, outer) = (t * l, tc * l);
                // underflowed nodes carry no mass
                if inner == 0.0 || outer == 0.0 {
                    return 0.0;
                }
                match self.partial(k - 1, inner) {
                    Ok(v) => {
                        let v = v * self.single(k, outer);
                        if v.is_finite() {
                            v
                        } else {
                            0.0
                        }
                    }
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            },
            INNER_REL_TOL,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(l * r?.value)
    }

    fn density_neg_log(&self, l: f64) -> Result<f64> {
        if l <= 0.0 {
            return Ok(0.0);
        }
        self.partial(self.factors.len() - 1, l)
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Gamma { c: f64 },
    Beta(BetaProduct),
    Mixed { c: f64, inv_y: Vec<f64>, weight: Vec<f64>, x_min: f64 },
}

/// Pointwise evaluator of a product density.
#[derive(Debug, Clone)]
pub struct ProductDensity {
    spec: ProductSpec,
    kernel: Kernel,
}

impl ProductDensity {
    /// Prepares the evaluator; with both factor kinds present, `x_min` is the
    /// smallest argument [`ProductDensity::density`] will accept.
    pub fn new(spec: &ProductSpec, x_min: f64) -> Result<Self> {
        let kernel = match (spec.gamma_shape, spec.beta_factors.is_empty()) {
            (Some(c), true) => Kernel::Gamma { c },
            (None, false) => Kernel::Beta(BetaProduct::new(&spec.beta_factors)?),
            (Some(c), false) => {
                if !(x_min > 0.0 && x_min.is_finite()) {
                    return Err(Error::Domain(format!("x_min must be positive, got {x_min}")));
                }
                Self::mixed_kernel(c, BetaProduct::new(&spec.beta_factors)?, spec, x_min)?
            }
            (None, true) => unreachable!("ProductSpec rejects empty products"),
        };
        Ok(Self { spec: spec.clone(), kernel })
    }

    fn mixed_kernel(c: f64, beta: BetaProduct, spec: &ProductSpec, x_min: f64) -> Result<Kernel> {
        let half = 0.5f64.ln();
        // y ∈ (0, ½] via s = ln y
        let s_lo = (x_min.ln() - KERNEL_LOWER_MARGIN).min(half - 1.0);
        let lower = KronrodPanels::uniform(s_lo, half, ((half - s_lo) / PANEL_WIDTH).ceil() as usize);
        // y ∈ [½, 1) via r = ln(1 - y); y^{-c} f(y) dy ~ (1-y)^{Σb - 1} d(1-y)
        let sum_b: f64 = spec.beta_factors.iter().map(|&(_, b)| b).sum();
        let r_lo = (-38.0 / sum_b - 2.0).max(-700.0);
        let upper = KronrodPanels::uniform(r_lo, half, ((half - r_lo) / PANEL_WIDTH).ceil() as usize);

        let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity(lower.len() + upper.len());
        // (l = -ln y, 1/y, quadrature weight × Jacobian)
        for (&s, &w) in lower.nodes.iter().zip(&lower.weights) {
            nodes.push((-s, (-s).exp(), w * s.exp()));
        }
        for (&r, &w) in upper.nodes.iter().zip(&upper.weights) {
            let one_minus_y = r.exp();
            let l = -(-one_minus_y).ln_1p();
            nodes.push((l, 1.0 / (1.0 - one_minus_y), w * one_minus_y));
        }
        let weighted = nodes
            .par_iter()
            .map(|&(l, inv_y, w)| Ok(w * (c * l).exp() * beta.density_neg_log(l)?).map(|v| (inv_y, v)))
            .collect::<Result<Vec<_>>>()?;
        let (inv_y, weight) = weighted.into_iter().filter(|&(_, v)| v != 0.0).unzip();
        Ok(Kernel::Mixed { c, inv_y, weight, x_min })
    }

    pub fn spec(&self) -> &ProductSpec {
        &self.spec
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain(format!("density argument must be positive and finite, got {x}")));
        }
        match &self.kernel {
            Kernel::Gamma { c } => Ok(((c - 1.0) * x.ln() - x - ln_gamma_unchecked(*c)).exp()),
            Kernel::Beta(bp) => {
                if x >= 1.0 {
                    Ok(0.0)
                } else {
                    bp.density_neg_log(-x.ln())
                }
            }
            Kernel::Mixed { c, inv_y, weight, x_min } => {
                if x < *x_min {
                    return Err(Error::Domain(format!("evaluator prepared for x ≥ {x_min}, got {x}")));
                }
                let sum: f64 = inv_y.iter().zip(weight).map(|(&iy, &w)| w * (-x * iy).exp()).sum();
                Ok(sum * ((c - 1.0) * x.ln() - ln_gamma_unchecked(*c)).exp())
            }
        }
    }
}

/// How grid values are interpolated between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Piecewise linear in `(ln x, ln f)`.
    LogLog,
}

/// The variable in which a grid was laid out; integrals use the trapezoid rule in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpacing {
    /// Uniform in `ln x`.
    Log,
    /// Uniform in `ln(x / (1 - x))`, for densities on `(0, 1)`.
    Logit,
    /// Anything else; integrated in `ln x`.
    Arbitrary,
}

/// A density tabulated on a positive grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub interpolation: Interpolation,
    pub spacing: GridSpacing,
}

impl GridDensity {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, spacing: GridSpacing) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::Parameter("grid needs at least two nodes and one value per node".into()));
        }
        if nodes[0] <= 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("grid nodes must be positive and strictly increasing".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Parameter("density values must be finite and non-negative".into()));
        }
        Ok(Self { nodes, values, interpolation: Interpolation::LogLog, spacing })
    }

    /// Log-log interpolated value; zero outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if !(x >= self.nodes[0] && x <= self.nodes[n - 1]) {
            return 0.0;
        }
        let i = self.nodes.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (x0, x1, f0, f1) = (self.nodes[i - 1], self.nodes[i], self.values[i - 1], self.values[i]);
        if f0 == 0.0 || f1 == 0.0 {
            let t = (x - x0) / (x1 - x0);
            return f0 + t * (f1 - f0);
        }
        let t = (x / x0).ln() / (x1 / x0).ln();
        (f0.ln() + t * (f1 / f0).ln()).exp()
    }

    /// `∫ x^s f(x) dx` by the trapezoid rule in the grid variable plus
    /// exponential tails in that variable fitted to the two outermost nodes.
    pub fn moment(&self, s: f64) -> f64 {
        let (t, g): (Vec<f64>, Vec<f64>) = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&x, &f)| match self.spacing {
                GridSpacing::Logit => ((x / (1.0 - x)).ln(), f * x.powf(s) * x * (1.0 - x)),
                GridSpacing::Log | GridSpacing::Arbitrary => (x.ln(), f * x.powf(s) * x),
            })
            .unzip();
        let n = t.len();
        let body: f64 = (1..n).map(|i| 0.5 * (t[i] - t[i - 1]) * (g[i] + g[i - 1])).sum();
        let tail = |g_end: f64, g_in: f64, dt: f64| {
            if g_end > 0.0 && g_in > g_end {
                g_end * dt / (g_in / g_end).ln()
            } else {
                0.0
            }
        };
        body + tail(g[0], g[1], t[1] - t[0]) + tail(g[n - 1], g[n - 2], t[n - 1] - t[n - 2])
    }

    pub fn mass(&self) -> f64 {
        self.moment(0.0)
    }

    /// Two-column CSV `x,f` with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,f\n");
        for (x, f) in self.nodes.iter().zip(&self.values) {
            let _ = writeln!(out, "{x},{f}");
        }
        out
    }
}

/// Default grid: 400 nodes per decade between moment-based Markov bounds on
/// the `1e-6` quantiles, log-spaced for products with a Gamma factor and
/// logit-spaced on `(0, 1)` otherwise.
pub fn default_grid(spec: &ProductSpec) -> Result<(Vec<f64>, GridSpacing)> {
    // P(X < ε) ≤ ε^r E[X^{-r}]
    let r = 0.9 * spec.min_shape();
    let x_lo = ((GRID_TAIL_MASS.ln() - spec.ln_mellin(-r)?) / r).exp();
    let step = std::f64::consts::LN_10 / NODES_PER_DECADE as f64;
    if spec.gamma_shape.is_some() {
        // P(X > M) ≤ E[X^4] / M^4
        let x_hi = ((spec.ln_mellin(4.0)? - GRID_TAIL_MASS.ln()) / 4.0).exp();
        Ok((uniform(x_lo.ln(), x_hi.ln(), step).map(f64::exp).collect(), GridSpacing::Log))
    } else {
        // near 1 the density is ~ (1-y)^{Σb-1}
        let sum_b: f64 = spec.beta_factors.iter().map(|&(_, b)| b).sum();
        let eps_hi = ((GRID_TAIL_MASS.ln() / sum_b).exp() * 0.1).max(1e-14);
        let t_lo = (x_lo / (1.0 - x_lo)).ln();
        let t_hi = ((1.0 - eps_hi) / eps_hi).ln();
        let mut nodes: Vec<f64> = uniform(t_lo, t_hi, step).map(|t| 1.0 / (1.0 + (-t).exp())).filter(|&x| x < 1.0).collect();
        nodes.dedup();
        Ok((nodes, GridSpacing::Logit))
    }
}

fn uniform(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n).map(move |i| lo + i as f64 * step)
}

/// Density of the product on arbitrary increasing positive nodes.
pub fn product_density(spec: &ProductSpec, grid: &[f64]) -> Result<GridDensity> {
    product_density_on(spec, grid.to_vec(), GridSpacing::Arbitrary)
}

/// Density of the product on [`default_grid`].
///
/// Each Beta factor beyond the first adds one nested tanh-sinh level, so
/// the cost grows geometrically: about 1 s for two Beta factors and a
/// minute for three on the default grid.
pub fn product_density_default(spec: &ProductSpec) -> Result<GridDensity> {
    let (nodes, spacing) = default_grid(spec)?;
    product_density_on(spec, nodes, spacing)
}

fn product_density_on(spec: &ProductSpec, nodes: Vec<f64>, spacing: GridSpacing) -> Result<GridDensity> {
    let x_min = nodes.first().copied().ok_or_else(|| Error::Parameter("empty grid".into()))?;
    let eval = ProductDensity::new(spec, x_min)?;
    let values = nodes.par_iter().map(|&x| eval.density(x)).collect::<Result<Vec<_>>>()?;
    GridDensity::new(nodes, values, spacing)
}

/// `y^{-c} f_{a,b}(y) / E[B_{a,b}^{-c}]` on a logit grid; equals the `B_{a-c,b}` density.
pub fn tilted_density(a: f64, b: f64, c: f64) -> Result<GridDensity> {
    if !(c < a) {
        return Err(Error::Domain(format!("tilt exponent c = {c} must be below a = {a}")));
    }
    let spec = ProductSpec::new(None, vec![(a, b)])?;
    let ln_norm = spec.ln_mellin(-c)?;
    let tilted = ProductSpec::new(None, vec![(a - c, b)])?;
    let (nodes, _) = default_grid(&tilted)?;
    let lb = ln_beta(a, b)?;
    let values = nodes
        .iter()
        .map(|&y| ((a - 1.0 - c) * y.ln() + (b - 1.0) * (-y).ln_1p() - lb - ln_norm).exp())
        .collect();
    GridDensity::new(nodes, values, GridSpacing::Logit)
}

/// Density of `1/B_{a,b} - 1` at `x > 0`, by change of variables from the Beta density.
pub fn shifted_inverse_beta_density(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("argument must be positive, got {x}")));
    }
    let lb = ln_beta(a, b)?;
    // y = 1/(1+x), 1 - y = x/(1+x), |dy/dx| = 1/(1+x)²
    let ln1p = x.ln_1p();
    Ok(((a - 1.0) * -ln1p + (b - 1.0) * (x.ln() - ln1p) - lb - 2.0 * ln1p).exp())
}
