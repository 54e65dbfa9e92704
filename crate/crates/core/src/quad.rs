//! Quadrature rules shared by the density, Mellin and convolution code.
//!
//! * [`gauss_kronrod`]: globally adaptive 21-point Gauss–Kronrod on a finite interval.
//! * [`gauss_kronrod_semi_infinite`]: the same on `[a, ∞)` through `x = a + t/(1-t)`.
//! * [`tanh_sinh`]: double-exponential rule on `(0, 1)` for integrands with
//!   algebraic endpoint singularities; the integrand receives both `x` and `1 - x`.
//! * [`KronrodPanels`]: fixed composite nodes, for integrals evaluated many
//!   times against cached integrand factors.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Requested accuracy: the run stops once `error ≤ max(abs, rel · |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel, max_intervals: 4000 }
    }

    pub const fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0, max_intervals: 4000 }
    }

    pub const fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    res_abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss–Kronrod 21 panel with the QUADPACK error heuristic.
fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    Segment { a, b, value, error, res_abs }
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` on `[a, b]`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Parameter(format!("finite interval required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let first = qk21(&f, a, b);
    let mut evaluations = 21;
    let mut value = first.value;
    let mut error = first.error;
    let mut res_abs = first.res_abs;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Below the roundoff floor 50 ε ∫|f| further bisection cannot help.
    let done = |value: f64, error: f64, res_abs: f64| {
        error <= tol.target(value).max(50.0 * f64::EPSILON * res_abs)
    };
    while !done(value, error, res_abs) {
        if !(value.is_finite() && error.is_finite()) {
            return Err(Error::Quadrature { achieved: error, requested: tol.target(value) });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature { achieved: error, requested: tol.target(value) });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            return Err(Error::Quadrature { achieved: error, requested: tol.target(value) });
        }
        let left = qk21(&f, worst.a, mid);
        let right = qk21(&f, mid, worst.b);
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        res_abs += left.res_abs + right.res_abs - worst.res_abs;
        heap.push(left);
        heap.push(right);
        // recompute occasionally to shed accumulated cancellation in the running sums
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
            res_abs = heap.iter().map(|s| s.res_abs).sum();
        }
    }
    if !value.is_finite() {
        return Err(Error::Quadrature { achieved: f64::INFINITY, requested: tol.target(value) });
    }
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Integral { value, error, evaluations })
}

/// Adaptive quadrature of `f` on `[a, ∞)` after the map `x = a + t / (1 - t)`.
pub fn gauss_kronrod_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Integral> {
    let g = |t: f64| {
        let om = 1.0 - t;
        let x = a + t / om;
        if !x.is_finite() {
            return 0.0;
        }
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (om * om)
        }
    };
    gauss_kronrod(g, 0.0, 1.0, tol)
}

const TS_MAX_T: f64 = 6.5;
const TS_MAX_LEVEL: u32 = 8;

/// Tanh-sinh quadrature of `f(x, 1 - x)` over `(0, 1)`.
///
/// The step is halved until two successive estimates agree to `rel_tol`.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F, rel_tol: f64) -> Result<Integral> {
    let node = |t: f64| -> Option<(f64, f64, f64)> {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        // x = 1 / (1 + e^{-2u}), 1 - x = 1 / (1 + e^{2u})
        let x = 1.0 / (1.0 + (-2.0 * u).exp());
        let c = 1.0 / (1.0 + (2.0 * u).exp());
        if x < 1e-300 || c < 1e-300 {
            return None;
        }
        let w = std::f64::consts::PI * t.cosh() * x * c;
        Some((x, c, w))
    };
    let mut evaluations = 0;
    let mut eval = |t: f64| -> f64 {
        match node(t) {
            Some((x, c, w)) => {
                evaluations += 1;
                let v = f(x, c);
                if v == 0.0 {
                    0.0
                } else {
                    w * v
                }
            }
            None => 0.0,
        }
    };

    let mut h = 0.5;
    let kmax = (TS_MAX_T / h) as i64;
    let mut sum = eval(0.0);
    for k in 1..=kmax {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
    }
    let mut estimate = sum * h;
    let mut diff = f64::INFINITY;
    for _ in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        let kmax = (TS_MAX_T / h) as i64;
        let mut k = 1;
        while k <= kmax {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = sum * h;
        diff = (next - estimate).abs();
        estimate = next;
        if diff <= rel_tol * next.abs() || next == 0.0 {
            return Ok(Integral { value: next, error: diff, evaluations });
        }
    }
    Err(Error::Quadrature {
        achieved: diff,
        requested: rel_tol * estimate.abs(),
    })
}

/// Fixed composite Gauss–Kronrod nodes over a union of panels.
#[derive(Debug, Clone, Default)]
pub struct KronrodPanels {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl KronrodPanels {
    /// Nodes of the 21-point Kronrod rule on each of the `panels` equal pieces of `[a, b]`.
    pub fn uniform(a: f64, b: f64, panels: usize) -> Self {
        let mut out = Self::default();
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let center = lo + 0.5 * width;
            let half = 0.5 * width;
            for j in 0..10 {
                out.nodes.push(center - half * XGK[j]);
                out.weights.push(half * WGK[j]);
                out.nodes.push(center + half * XGK[j]);
                out.weights.push(half * WGK[j]);
            }
            out.nodes.push(center);
            out.weights.push(half * WGK[10]);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
