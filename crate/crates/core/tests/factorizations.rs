#![allow(clippy::excessive_precision)]

use proptest::prelude::*;
use stable_hcm::factorizations::*;
use stable_hcm::specfun::{digamma, ln_gamma};
use stable_hcm::stable::{sample_oracle, StableParams};
use stable_hcm::stats::{ks_critical_value, ks_two_sample, mean_and_standard_error, KS_COEFF_1_PERCENT};

fn p(a: f64) -> StableParams {
    StableParams::new(a).unwrap()
}

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

/// The Gamma plan telescopes: `E[X_N^s] = Γ(a+s)/Γ(a) · e^{sψ(X)} Γ(X)/Γ(X+s)`, `X = a + Nb`.
fn gamma_plan_telescoped(a: f64, b: f64, n: usize, s: f64) -> f64 {
    let x = a + n as f64 * b;
    let l = ln_gamma(a + s).unwrap() - ln_gamma(a).unwrap() + s * digamma(x).unwrap() + ln_gamma(x).unwrap()
        - ln_gamma(x + s).unwrap();
    l.exp()
}

#[test]
fn gamma_plan_matches_telescoped_product() {
    for (a, b) in [(1.0, 1.0), (0.5, 0.5), (2.0, 0.25), (0.3, 3.0), (4.5, 1.5)] {
        for n in [1, 7, 100, 1000] {
            let plan = gamma_plan(a, b, n).unwrap();
            for s in [0.25, 1.0, 2.0, 3.5] {
                let got = plan_mellin(&plan, s).unwrap();
                let want = gamma_plan_telescoped(a, b, n, s);
                assert!(rel(got, want) < 1e-11, "a={a} b={b} N={n} s={s}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn gamma_plan_converges_to_gamma_moments() {
    let plan = gamma_plan(1.0, 1.0, 1000).unwrap();
    for (s, want) in [(1.0, 1.0), (2.0, 2.0), (0.5, std::f64::consts::PI.sqrt() / 2.0)] {
        assert!(rel(plan_mellin(&plan, s).unwrap(), want) < 2e-3);
    }
}

#[test]
fn inverse_stable_mellin_increases_to_target() {
    for a in [0.3, 0.5, 0.7] {
        let target = Target::InverseStable { alpha: a };
        for s in [0.5, 1.0, 2.0] {
            let exact = target.ln_mellin(s);
            let mut prev = f64::NEG_INFINITY;
            for n in [10, 100, 1000, 10_000] {
                let l = plan_ln_mellin(&inverse_stable_plan(p(a), n).unwrap(), s).unwrap();
                assert!(l > prev && l < exact, "α={a} s={s} N={n}");
                prev = l;
            }
        }
    }
}

#[test]
fn inverse_stable_error_tracks_tail_variance() {
    // ln(target / plan) ≈ s²/2 · Σ_{n≥N} Var[ln factor]
    for a in [0.3, 0.5, 0.7] {
        let n = 5000;
        let tail = truncation_tail_variance(p(a), n);
        let s = 1.0;
        let deficit = Target::InverseStable { alpha: a }.ln_mellin(s) - plan_ln_mellin(&inverse_stable_plan(p(a), n).unwrap(), s).unwrap();
        assert!(rel(deficit, 0.5 * s * s * tail) < 0.05, "α={a}: {deficit} vs {tail}");
    }
}

#[test]
fn half_plan_converges_to_four_gamma_half() {
    // Z_{1/2}^{-1} = 4 Γ_{1/2}: E[X^s] = 4^s Γ(1/2+s)/Γ(1/2).
    let plan = inverse_stable_plan(p(0.5), 20_000).unwrap();
    for s in [0.5, 1.0, 2.0] {
        let want = (s * 4f64.ln() + ln_gamma(0.5 + s).unwrap() - ln_gamma(0.5).unwrap()).exp();
        assert!(rel(plan_mellin(&plan, s).unwrap(), want) < 2e-4);
    }
}

#[test]
fn decomposition_is_the_split_inverse_stable_plan() {
    let a = 0.3;
    let n = 50;
    let inv = inverse_stable_plan(p(a), n).unwrap();
    let gam = gamma_plan(a, a, n).unwrap();
    let dec = gamma_beta_decomposition_plan(p(a), n).unwrap();
    for k in 0..n {
        let (first, second) = split_beta(&inv.beta_factors()[k], a).unwrap();
        let g = gam.beta_factors()[k];
        let d = dec.beta_factors()[k];
        assert!((first.a - g.a).abs() < 1e-13 && (first.b - g.b).abs() < 1e-15 && (first.log_scale - g.log_scale).abs() < 1e-13);
        assert!((second.a - d.a).abs() < 1e-13 && (second.b - d.b).abs() < 1e-15 && (second.log_scale - d.log_scale).abs() < 1e-13);
    }
    assert!((dec.global_log_scale() - (inv.global_log_scale() - gam.global_log_scale())).abs() < 1e-14);
}

#[test]
fn decomposition_agrees_with_closed_form_and_inverse_plan() {
    for a in [0.1, 0.25, 0.4] {
        let dec = gamma_beta_decomposition_plan(p(a), 20_000).unwrap();
        let inv = inverse_stable_plan(p(a), 20_000).unwrap();
        for s in [0.5, 1.0] {
            let exact = Target::TheoremDecomposition { alpha: a }.ln_mellin(s).exp();
            let d = plan_mellin(&dec, s).unwrap();
            assert!(rel(d, exact) < 5e-3, "α={a} s={s}");
            assert!(rel(d, plan_mellin(&inv, s).unwrap()) < 1e-2);
            // the exact Gamma factor removes part of the truncation loss
            assert!(d > plan_mellin(&inv, s).unwrap());
        }
    }
}

#[test]
fn power_plan_converges() {
    for a in [0.2, 0.3, 0.7, 0.9] {
        let target = Target::PowerAlpha { alpha: a };
        let mut prev = f64::INFINITY;
        for n in [10, 100, 1000] {
            let r = mellin_report(&power_plan(p(a), n).unwrap(), &[1.0, 2.0]).unwrap();
            assert!(r.max_rel_error() < prev);
            prev = r.max_rel_error();
        }
        assert!(prev < 1e-3, "α={a}: {prev}");
        assert!(rel(plan_mellin(&power_plan(p(a), 1000).unwrap(), 1.0).unwrap(), target.ln_mellin(1.0).exp()) < 1e-3);
    }
}

#[test]
fn power_plan_against_oracle_moments_of_z_power() {
    // E[Z^{-α s}] by quadrature-free route: Mellin of Z^{-1} at αs.
    let a = 0.6;
    let plan = power_plan(p(a), 2000).unwrap();
    for s in [0.5, 1.5] {
        let via_inverse = Target::InverseStable { alpha: a }.ln_mellin(a * s).exp();
        assert!(rel(plan_mellin(&plan, s).unwrap(), via_inverse) < 1e-3);
    }
}

#[test]
fn sample_plan_is_seed_deterministic() {
    let plan = inverse_stable_plan(p(0.4), 30).unwrap();
    let x = sample_plan(&plan, 10_000, 17).unwrap();
    let y = sample_plan(&plan, 10_000, 17).unwrap();
    let z = sample_plan(&plan, 10_000, 18).unwrap();
    assert_eq!(x, y);
    assert_ne!(x, z);
    assert_eq!(x.len(), 10_000);
    // prefix property across chunk boundaries
    assert_eq!(&sample_plan(&plan, 5000, 17).unwrap()[..], &x[..5000]);
    assert!(x.iter().all(|v| v.is_finite() && *v > 0.0));
}

#[test]
fn sample_plan_mean_matches_plan_mellin() {
    for plan in [
        inverse_stable_plan(p(0.7), 100).unwrap(),
        gamma_plan(2.0, 0.5, 100).unwrap(),
        gamma_beta_decomposition_plan(p(0.3), 100).unwrap(),
        power_plan(p(0.5), 100).unwrap(),
    ] {
        let x = sample_plan(&plan, 40_000, 3).unwrap();
        let (m, se) = mean_and_standard_error(&x);
        let want = plan_mellin(&plan, 1.0).unwrap();
        assert!((m - want).abs() < 4.0 * se, "{:?}: {m} ± {se} vs {want}", plan.target());
    }
}

#[test]
fn plan_samples_agree_with_exact_inverse_stable_sampler() {
    let a = 0.7;
    let n = 20_000;
    let plan: Vec<f64> = sample_plan(&inverse_stable_plan(p(a), 400).unwrap(), n, 11).unwrap();
    let exact: Vec<f64> = sample_oracle(p(a), n, 12).unwrap().into_iter().map(|z| 1.0 / z).collect();
    let d = ks_two_sample(&plan, &exact);
    assert!(d < ks_critical_value(n, n, KS_COEFF_1_PERCENT), "D = {d}");
}

// Frozen 40-digit Euler–Maclaurin values of Σ_{n≥N} ψ'(α+nα) - ψ'(1+nα).
const TAIL_REFERENCE: [(f64, usize, f64); 6] = [
    (0.3, 0, 16.632_111_120_354_289_524),
    (0.5, 0, 4.934_802_200_544_679_309),
    (0.7, 0, 1.712_074_232_842_031_597),
    (0.3, 1000, 0.007_777_773_456_803_470_399),
    (0.5, 1000, 0.001_999_999_333_334_266_664),
    (0.7, 1000, 0.000_612_244_752_186_719_224),
];

#[test]
fn tail_variance_reference_values() {
    for (a, n, want) in TAIL_REFERENCE {
        let got = truncation_tail_variance(p(a), n);
        assert!(rel(got, want) < 1e-12, "α={a} N={n}: {got} vs {want}");
    }
    // Σ_{n≥0} at α = 1/2 is π²/2
    assert!(rel(truncation_tail_variance(p(0.5), 0), std::f64::consts::PI.powi(2) / 2.0) < 1e-13);
}

#[test]
fn tail_variance_decreases_and_matches_bound() {
    for a in [0.2, 0.5, 0.8] {
        let mut prev = f64::INFINITY;
        for n in [0, 1, 10, 100, 1000, 100_000] {
            let t = truncation_tail_variance(p(a), n);
            assert!(t < prev && t > 0.0);
            prev = t;
        }
        let bound = variance_bound_integral(p(a)).unwrap();
        assert!(rel(truncation_tail_variance(p(a), 0), bound) < 1e-12);
        let per_term = log_factor_variance(p(a), (1e4 / a).ceil() as usize);
        assert!(per_term < 1e-8 && per_term > 0.0);
    }
}

#[test]
fn williams_constants() {
    for n in 2..=12u32 {
        let (lhs, rhs) = williams_constant_check(n).unwrap();
        assert!(rel(lhs, rhs) < 1e-12, "n={n}");
    }
}

#[test]
fn malmsten_grid() {
    for a in [0.1, 0.3, 1.0, 2.7, 5.0] {
        for s in [0.1, 0.6, 1.0, 3.3, 5.0] {
            let (rhs, lhs) = malmsten_check(a, s).unwrap();
            assert!((rhs - lhs).abs() < 1e-10, "a={a} s={s}: {rhs} vs {lhs}");
        }
    }
}

#[test]
fn mellin_report_fields() {
    let r = mellin_report(&inverse_stable_plan(p(0.5), 200).unwrap(), &[0.5, 1.0, 2.0]).unwrap();
    assert_eq!(r.target, "inverse-stable");
    assert_eq!(r.truncation_n, 200);
    assert_eq!(r.probes.len(), 3);
    assert!((r.probes[1].closed_form - 2.0).abs() < 1e-13);
    assert!(r.max_rel_error() < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn split_preserves_mellin(a in 0.05f64..50.0, b in 0.05f64..5.0, frac in 0.01f64..0.99, ls in -3.0f64..3.0, s in 0.0f64..6.0) {
        let f = BetaFactor::new(a, b, ls).unwrap();
        let (x, y) = split_beta(&f, frac * b).unwrap();
        prop_assert!((x.log_scale + y.log_scale - ls).abs() < 1e-12);
        let lhs = f.ln_mellin(s);
        let rhs = x.ln_mellin(s) + y.ln_mellin(s);
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn centered_factor_has_unit_log_mean(a in 0.05f64..100.0, b in 0.05f64..10.0) {
        let f = BetaFactor::centered(a, b).unwrap();
        prop_assert!((f.mean_log() + f.log_scale).abs() < 1e-12);
        // derivative of ln Mellin at 0 equals E[ln(scaled factor)] = 0
        let h = 1e-6;
        prop_assert!(((f.ln_mellin(h) - f.ln_mellin(0.0)) / h).abs() < 1e-5 * (1.0 + f.var_log()));
    }

    #[test]
    fn plan_json_round_trip(a in 0.01f64..0.99, n in 1usize..40) {
        let plan = inverse_stable_plan(StableParams::new(a).unwrap(), n).unwrap();
        prop_assert_eq!(&plan, &FactorizationPlan::from_json(&plan.to_json().unwrap()).unwrap());
        let plan = power_plan(StableParams::new(a).unwrap(), n).unwrap();
        prop_assert_eq!(&plan, &FactorizationPlan::from_json(&plan.to_json().unwrap()).unwrap());
    }
}
