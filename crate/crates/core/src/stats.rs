//! Sample statistics used by the distributional checks.

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Coefficient of the asymptotic 1% two-sample KS critical value.
pub const KS_COEFF_1_PERCENT: f64 = 1.63;

/// Asymptotic critical value `c · √((n + m) / (n m))`.
pub fn ks_critical_value(n: usize, m: usize, coeff: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    coeff * ((n + m) / (n * m)).sqrt()
}

/// Sample mean and its standard error.
pub fn mean_and_standard_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_have_zero_distance() {
        let a = [0.3, 1.0, 2.5, 4.0];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
    }

    #[test]
    fn disjoint_samples_have_unit_distance() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0, 5.0]), 1.0);
    }

    #[test]
    fn interleaved_by_hand() {
        // a: 1 3 5, b: 2 4 6 -> max gap 1/3
        let d = ks_two_sample(&[5.0, 1.0, 3.0], &[2.0, 6.0, 4.0]);
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn critical_value_matches_quoted_threshold() {
        let c = ks_critical_value(100_000, 100_000, KS_COEFF_1_PERCENT);
        assert!((c - 0.00729).abs() < 1e-5);
    }

    #[test]
    fn standard_error_of_constant_plus_noise() {
        let (m, se) = mean_and_standard_error(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-15);
    }
}
