//! Finite-difference tests of hyperbolic monotonicity (HM) and hyperbolic
//! complete monotonicity (HCM).
//!
//! For a density `f` and `u > 0` put `H_u(w) = f(uv) f(u/v)` with
//! `w = v + 1/v`, `v ≥ 1`. `f` is HM when every `H_u` is non-increasing in
//! `w`, and HCM when every `H_u` is completely monotone in `w`. Complete
//! monotonicity implies `(-1)^k Δ_δ^k H_u(w) ≥ 0` for all `k`, `δ`, `w`, so
//! a passing report is a necessary-condition certificate over the scanned
//! grid and orders, and a witness is a disproof up to the tolerance.

use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Default relative tolerance of the difference test.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Default highest difference order.
pub const DEFAULT_MAX_ORDER: usize = 6;

/// The root `v ≥ 1` of `v + 1/v = w`.
pub fn v_of_w(w: f64) -> Result<f64> {
    if !(w >= 2.0) || !w.is_finite() {
        return Err(Error::Domain(format!("w = v + 1/v needs w ≥ 2, got {w}")));
    }
    // (w + √((w-2)(w+2))) / 2 keeps precision as w → 2
    Ok(0.5 * (w + ((w - 2.0) * (w + 2.0)).sqrt()))
}

/// `H_u(w) = f(uv) f(u/v)`.
pub fn hyperbolic_product<F>(f: &F, u: f64, w: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let v = v_of_w(w)?;
    let a = f(u * v)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(a * f(u / v)?)
}

/// `n_points` equally spaced points from `w_min` to `w_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WGrid {
    pub w_min: f64,
    pub w_max: f64,
    pub n_points: usize,
}

impl WGrid {
    pub fn new(w_min: f64, w_max: f64, n_points: usize) -> Result<Self> {
        if !(w_min >= 2.0) || !w_max.is_finite() {
            return Err(Error::Parameter(format!("w-grid must lie in [2, ∞), got [{w_min}, {w_max}]")));
        }
        if n_points == 0 || (n_points > 1 && !(w_max > w_min)) || (n_points == 1 && w_max != w_min) {
            return Err(Error::Parameter(format!("invalid w-grid: {n_points} points on [{w_min}, {w_max}]")));
        }
        Ok(Self { w_min, w_max, n_points })
    }

    /// Grid with spacing `step` from `w_min` up to the last point not beyond `w_max`.
    pub fn with_step(w_min: f64, w_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Parameter(format!("grid step must be positive, got {step}")));
        }
        let n = ((w_max - w_min) / step + 1e-9).floor() as usize;
        Self::new(w_min, w_min + n as f64 * step, n + 1)
    }

    pub fn step(&self) -> f64 {
        if self.n_points > 1 {
            (self.w_max - self.w_min) / (self.n_points - 1) as f64
        } else {
            0.0
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.w_max
        } else {
            self.w_min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }
}

/// A grid point where `(-1)^k Δ_δ^k H_u(w) < -ε · scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub k: usize,
    pub w: f64,
    /// `(-1)^k Δ_δ^k H_u(w)`.
    pub value: f64,
}

/// Outcome of [`hcm_check`] for one `u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmReport {
    pub u: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub n_points: usize,
    pub delta: f64,
    pub max_order: usize,
    pub epsilon: f64,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    /// Entry `k - 1` tells whether order `k` passed.
    #[serde(skip)]
    pub order_pass: Vec<bool>,
}

impl CmReport {
    pub fn passes_order(&self, k: usize) -> bool {
        k >= 1 && self.order_pass.get(k - 1).copied().unwrap_or(false)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Checks `(-1)^k Δ_δ^k H_u(w) ≥ -ε max_{stencil} |H_u|` for `k = 1..=max_order`
/// at every point of `grid`.
pub fn hcm_check<F>(f: &F, u: f64, grid: WGrid, delta: f64, max_order: usize, epsilon: f64) -> Result<CmReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Parameter(format!("anchor u must be positive, got {u}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!("step δ must be positive, got {delta}")));
    }
    if max_order == 0 {
        return Err(Error::Parameter("max order K must be at least 1".into()));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be non-negative, got {epsilon}")));
    }
    if !(grid.w_min >= 2.0) {
        return Err(Error::Parameter(format!("stencil leaves the domain w ≥ 2 at {}", grid.w_min)));
    }

    let stencils = evaluate_stencils(f, u, grid, delta, max_order)?;
    let mut witnesses = Vec::new();
    let mut order_pass = vec![true; max_order];
    let mut diff = vec![0.0; max_order + 1];
    for (i, h) in stencils.iter().enumerate() {
        let scale = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        diff.copy_from_slice(h);
        for k in 1..=max_order {
            // after pass k, diff[j] = Δ^k H(w + jδ)
            for j in 0..=max_order - k {
                diff[j] = diff[j + 1] - diff[j];
            }
            let signed = if k % 2 == 0 { diff[0] } else { -diff[0] };
            if signed < -epsilon * scale {
                order_pass[k - 1] = false;
                witnesses.push(Witness { k, w: grid.point(i), value: signed });
            }
        }
    }
    Ok(CmReport {
        u,
        w_min: grid.w_min,
        w_max: grid.w_max,
        n_points: grid.n_points,
        delta,
        max_order,
        epsilon,
        pass: order_pass.iter().all(|&p| p),
        witnesses,
        order_pass,
    })
}

/// `H_u(w_i + jδ)`, `j = 0..=K`, for every grid point; shares one lattice
/// of evaluations when the grid step is a multiple of `δ`.
fn evaluate_stencils<F>(f: &F, u: f64, grid: WGrid, delta: f64, k: usize) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let ratio = grid.step() / delta;
    let r = ratio.round();
    if grid.n_points == 1 || (r >= 1.0 && (ratio - r).abs() < 1e-9) {
        let r = r.max(1.0) as usize;
        let len = (grid.n_points - 1) * r + k + 1;
        let lattice = (0..len)
            .into_par_iter()
            .map(|m| hyperbolic_product(f, u, grid.w_min + m as f64 * delta))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..grid.n_points).map(|i| lattice[i * r..=i * r + k].to_vec()).collect())
    } else {
        (0..grid.n_points)
            .into_par_iter()
            .map(|i| (0..=k).map(|j| hyperbolic_product(f, u, grid.point(i) + j as f64 * delta)).collect())
            .collect()
    }
}

/// `Δ_δ^k H_u(w)` for `k = 0..=max_order`.
pub fn forward_differences<F>(f: &F, u: f64, w: f64, delta: f64, max_order: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut h = (0..=max_order)
        .map(|j| hyperbolic_product(f, u, w + j as f64 * delta))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(max_order + 1);
    for k in 0..=max_order {
        out.push(h[0]);
        for j in 0..max_order - k {
            h[j] = h[j + 1] - h[j];
        }
    }
    Ok(out)
}

/// An increasing step of `H_u` between consecutive grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HmWitness {
    pub u: f64,
    pub w: f64,
    pub w_next: f64,
    /// `(H(w_next) - H(w)) / max(|H(w)|, |H(w_next)|)`.
    pub rel_increase: f64,
}

/// Outcome of [`hm_check`] over several anchors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HmReport {
    pub u_values: Vec<f64>,
    pub w_min: f64,
    pub w_max: f64,
    pub n_points: usize,
    pub epsilon: f64,
    pub pass: bool,
    pub worst: Option<HmWitness>,
    pub witnesses: Vec<HmWitness>,
}

impl HmReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Checks that every `H_u` is non-increasing along `grid` up to relative slack `ε`.
pub fn hm_check<F>(f: &F, u_values: &[f64], grid: WGrid, epsilon: f64) -> Result<HmReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if u_values.is_empty() || u_values.iter().any(|u| !(*u > 0.0 && u.is_finite())) {
        return Err(Error::Parameter("u-grid must be nonempty and positive".into()));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be non-negative, got {epsilon}")));
    }
    let points = grid.points();
    let mut witnesses = Vec::new();
    for &u in u_values {
        let h = points.par_iter().map(|&w| hyperbolic_product(f, u, w)).collect::<Result<Vec<_>>>()?;
        for i in 1..h.len() {
            let scale = h[i].abs().max(h[i - 1].abs());
            let rise = h[i] - h[i - 1];
            if rise > epsilon * scale {
                witnesses.push(HmWitness { u, w: points[i - 1], w_next: points[i], rel_increase: rise / scale });
            }
        }
    }
    let worst = witnesses.iter().copied().max_by(|a, b| a.rel_increase.total_cmp(&b.rel_increase));
    Ok(HmReport {
        u_values: u_values.to_vec(),
        w_min: grid.w_min,
        w_max: grid.w_max,
        n_points: grid.n_points,
        epsilon,
        pass: witnesses.is_empty(),
        worst,
        witnesses,
    })
}
