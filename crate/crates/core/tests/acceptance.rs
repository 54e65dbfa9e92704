//! End-to-end acceptance criteria. Each criterion prints one line,
//!
//! ```text
//! [PASS] 3  inverse-stable Mellin convergence ... (0.01 s / 5 s)
//! ```
//!
//! and the process exits non-zero if any criterion fails, including on its
//! runtime budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use stable_hcm::factorizations::*;
use stable_hcm::hcm::{hcm_check, hm_check, v_of_w, WGrid};
use stable_hcm::products::{ProductDensity, ProductSpec};
use stable_hcm::stable::{density_half, density_series, laplace_check, StableParams};
use stable_hcm::stats::{ks_critical_value, ks_two_sample, KS_COEFF_1_PERCENT};
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn p(a: f64) -> StableParams {
    StableParams::new(a).expect("valid α")
}

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn closed_form_anchor() -> Outcome {
    let pa = p(0.5);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let x = 10f64.powf(-2.0 + 4.0 * i as f64 / 199.0);
        let e = rel(density_series(pa, x).map_err(|e| e.to_string())?, density_half(x).map_err(|e| e.to_string())?);
        worst = worst.max(e);
    }
    verdict(worst < 1e-10, format!("max rel err {worst:.2e} (< 1e-10)"))
}

fn laplace_identity() -> Outcome {
    let mut worst = 0.0f64;
    for a in [0.2, 0.3, 0.5, 0.7, 0.9] {
        for lambda in [0.5, 1.0, 2.0, 5.0] {
            let (q, exact) = laplace_check(p(a), lambda).map_err(|e| e.to_string())?;
            worst = worst.max((q - exact).abs());
        }
    }
    verdict(worst < 1e-6, format!("max |quad - e^(-λ^α)| {worst:.2e} (< 1e-6)"))
}

fn inverse_stable_convergence() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_at = (0.0, 0.0);
    let mut monotone = true;
    for a in [0.3, 0.5, 0.7] {
        let plans: Vec<_> = [10, 100, 1000].iter().map(|&n| inverse_stable_plan(p(a), n).unwrap()).collect();
        for s in [0.5, 1.0, 2.0] {
            let errs: Vec<f64> = plans.iter().map(|pl| mellin_report(pl, &[s]).unwrap().max_rel_error()).collect();
            monotone &= errs.windows(2).all(|w| w[1] < w[0]);
            if errs[2] > worst {
                worst = errs[2];
                worst_at = (a, s);
            }
        }
    }
    verdict(
        worst < 1e-3 && monotone,
        format!(
            "N=1000 max rel err {worst:.3e} at α={}, s={} (< 1e-3); strictly decreasing in N: {monotone}",
            worst_at.0, worst_at.1
        ),
    )
}

fn decomposition_consistency() -> Outcome {
    let a = 0.3;
    let dec = gamma_beta_decomposition_plan(p(a), 1000).unwrap();
    let inv = inverse_stable_plan(p(a), 1000).unwrap();
    let target = Target::InverseStable { alpha: a };
    let (mut agree, mut dec_err, mut inv_err) = (0.0f64, 0.0f64, 0.0f64);
    for s in [0.5, 1.0, 2.0] {
        let d = plan_mellin(&dec, s).unwrap();
        let i = plan_mellin(&inv, s).unwrap();
        let exact = target.ln_mellin(s).exp();
        agree = agree.max(rel(d, i));
        dec_err = dec_err.max(rel(d, exact));
        inv_err = inv_err.max(rel(i, exact));
    }
    verdict(
        agree < 2e-3 && dec_err < 2e-3 && inv_err < 2e-3,
        format!("plans differ by {agree:.2e}; vs closed form: decomposition {dec_err:.2e}, inverse-stable {inv_err:.2e} (all < 2e-3)"),
    )
}

fn half_distribution() -> Outcome {
    let n = 100_000;
    let plan = inverse_stable_plan(p(0.5), 200).unwrap();
    let x = sample_plan(&plan, n, 20_240_501).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = Gamma::new(0.5, 1.0).unwrap();
    let y: Vec<f64> = (0..n).map(|_| 4.0 * g.sample(&mut rng)).collect();
    let d = ks_two_sample(&x, &y);
    let crit = ks_critical_value(n, n, KS_COEFF_1_PERCENT);
    verdict(d < crit, format!("KS D = {d:.5} (< {crit:.5})"))
}

fn williams_constants() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=6 {
        let (l, r) = williams_constant_check(n).map_err(|e| e.to_string())?;
        worst = worst.max(rel(l, r));
    }
    verdict(worst < 1e-9, format!("max rel err {worst:.2e} for n = 2..6 (< 1e-9)"))
}

fn malmsten_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let a = rng.random_range(0.1..5.0);
        let s = rng.random_range(0.1..5.0);
        let (rhs, lhs) = malmsten_check(a, s).map_err(|e| e.to_string())?;
        worst = worst.max((rhs - lhs).abs());
    }
    verdict(worst < 1e-8, format!("max |ψ(a)s + ∫ - ln Γ(a+s)/Γ(a)| {worst:.2e} on 25 pairs (< 1e-8)"))
}

fn hcm_positive_side() -> Outcome {
    let grid = WGrid::with_step(2.0, 40.0, 0.05).unwrap();
    let mut failures = Vec::new();
    for a in [0.3, 0.5] {
        let pa = p(a);
        let f = move |x: f64| density_series(pa, x);
        for u in [0.25, 1.0, 4.0] {
            let r = hcm_check(&f, u, grid, 0.05, 6, 1e-9).map_err(|e| e.to_string())?;
            if !r.pass {
                failures.push(format!("α={a} u={u}: {} witnesses", r.witnesses.len()));
            }
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            "orders 1..6 pass for α ∈ {0.3, 0.5}, u ∈ {0.25, 1, 4}, w ∈ [2, 40]".into()
        } else {
            failures.join("; ")
        },
    )
}

fn hm_negative_side() -> Outcome {
    let pa = p(0.9);
    let f = move |x: f64| density_series(pa, x);
    let r = hm_check(&f, &[0.5, 1.0, 2.0], WGrid::new(2.0, 50.0, 400).unwrap(), 1e-12).map_err(|e| e.to_string())?;
    match r.worst {
        Some(w) => verdict(
            w.rel_increase > 1e-6,
            format!(
                "{} increasing steps; worst u={}, w={:.4}→{:.4}, relative increase {:.3e} (> 1e-6)",
                r.witnesses.len(),
                w.u,
                w.w,
                w.w_next,
                w.rel_increase
            ),
        ),
        None => Err("no increasing step found".into()),
    }
}

fn gamma_beta_product_hcm() -> Outcome {
    let spec = ProductSpec::new(Some(0.2), vec![(0.5, 0.5), (0.7, 1.2)]).unwrap();
    assert!(spec.satisfies_hcm_hypothesis());
    let (w_max, delta, order) = (20.0, 0.05, 4);
    let grid = WGrid::with_step(2.0, w_max, delta).unwrap();
    let v_max = v_of_w(w_max + order as f64 * delta).unwrap();
    let mut failures = Vec::new();
    for u in [0.5, 1.0, 2.0] {
        let d = ProductDensity::new(&spec, 0.5 * u / v_max).map_err(|e| e.to_string())?;
        let f = |x: f64| d.density(x);
        let r = hcm_check(&f, u, grid, delta, order, 1e-7).map_err(|e| e.to_string())?;
        if !r.pass {
            failures.push(format!("u={u}: {} witnesses", r.witnesses.len()));
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            "Γ(0.2)×B(0.5,0.5)×B(0.7,1.2): orders 1..4 pass for u ∈ {0.5, 1, 2}, w ∈ [2, 20]".into()
        } else {
            failures.join("; ")
        },
    )
}

fn power_factorization() -> Outcome {
    let mut worst = 0.0f64;
    for a in [0.3, 0.7] {
        let r = mellin_report(&power_plan(p(a), 1000).unwrap(), &[1.0, 2.0]).unwrap();
        worst = worst.max(r.max_rel_error());
    }
    verdict(worst < 1e-3, format!("max rel err {worst:.2e} vs Γ(1+s)/Γ(1+αs) (< 1e-3)"))
}

fn tail_variance() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for a in [0.3, 0.5, 0.7] {
        let t = truncation_tail_variance(p(a), 0);
        let bound = variance_bound_integral(p(a)).map_err(|e| e.to_string())?;
        let term = log_factor_variance(p(a), (1e4 / a).ceil() as usize);
        // the bound is attained at N = 0; rounding slack only
        ok &= t.is_finite() && t <= bound * (1.0 + 1e-12) && term < 1e-8;
        lines.push(format!("α={a}: {t:.6} ≤ {bound:.6}, term {term:.1e}"));
    }
    verdict(ok, lines.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "closed-form anchor at α = 1/2", 1, closed_form_anchor),
        (2, "Laplace identity", 10, laplace_identity),
        (3, "inverse-stable Mellin convergence", 5, inverse_stable_convergence),
        (4, "Gamma-Beta decomposition consistency", 5, decomposition_consistency),
        (5, "distribution of the α = 1/2 plan", 30, half_distribution),
        (6, "Williams constants", 1, williams_constants),
        (7, "Malmsten identity", 5, malmsten_identity),
        (8, "HCM for α ≤ 1/2", 60, hcm_positive_side),
        (9, "HM fails for α = 0.9", 30, hm_negative_side),
        (10, "HCM of a Gamma × Beta product", 60, gamma_beta_product_hcm),
        (11, "power factorization of Z^(-α)", 5, power_factorization),
        (12, "bounded truncation variance", 5, tail_variance),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_budget = elapsed <= Duration::from_secs(budget);
        let (ok, detail) = match outcome {
            Ok(d) => (in_budget, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        let timing = format!("{:.2} s / {budget} s{}", elapsed.as_secs_f64(), if in_budget { "" } else { " OVER BUDGET" });
        println!("[{}] {id:<2} {name}: {detail} ({timing})", if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
