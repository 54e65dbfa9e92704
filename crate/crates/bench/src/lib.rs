//! Shared fixtures for the benchmarks.

use stable_hcm::factorizations::{inverse_stable_plan, FactorizationPlan};
use stable_hcm::stable::StableParams;

/// Indices spanning the small, critical and large regimes.
pub const ALPHAS: [f64; 3] = [0.3, 0.5, 0.9];

pub fn params(alpha: f64) -> StableParams {
    StableParams::new(alpha).expect("benchmark α lies in (0, 1)")
}

pub fn plan(alpha: f64, n: usize) -> FactorizationPlan {
    inverse_stable_plan(params(alpha), n).expect("valid plan")
}

/// Log-spaced abscissae on [10^lo, 10^hi].
pub fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect()
}
