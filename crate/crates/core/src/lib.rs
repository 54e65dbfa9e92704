//! Positive stable laws, their Beta/Gamma product factorizations and
//! numerical tests of hyperbolic (complete) monotonicity.
//!
//! The positive α-stable variable `Z_α` is normalized by
//! `E[exp(-λ Z_α)] = exp(-λ^α)`, `0 < α < 1`.
//!
//! | module | contents |
//! |--------|----------|
//! | [`specfun`] | `ln Γ`, digamma, trigamma |
//! | [`stable`] | density of `Z_α`, Laplace and Mellin checks, exact sampler |
//! | [`factorizations`] | truncated infinite Beta products for `Z_α^{-1}`, `Γ_a`, `Z_α^{-α}` |
//! | [`products`] | densities of finite `Γ_c × B × … × B` products |
//! | [`hcm`] | forward-difference HM / HCM checker with witnesses |
//! | [`stats`] | two-sample Kolmogorov–Smirnov statistic |
//!
//! ```
//! use stable_hcm::{factorizations, stable::StableParams};
//!
//! let p = StableParams::new(0.5).unwrap();
//! let plan = factorizations::inverse_stable_plan(p, 200).unwrap();
//! let m = factorizations::plan_mellin(&plan, 1.0).unwrap();
//! assert!((m - 2.0).abs() / 2.0 < 5e-3);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod factorizations;
pub mod hcm;
pub mod products;
pub mod quad;
pub mod specfun;
pub mod stable;
pub mod stats;

pub use error::{Error, Result};




pub use factorizations::{BetaFactor, FactorizationPlan, GammaFactor, MellinReport, Target};
pub use stable::StableParams;
pub use hcm::{CmReport, HmReport, WGrid, Witness};
pub use products::{GridDensity, ProductSpec};
