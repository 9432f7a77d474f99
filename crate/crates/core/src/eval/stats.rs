//! Nonparametric and parametric significance tests for paired samples.

use serde::Serialize;
use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Tail of the alternative hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Tail {
    #[default]
    TwoSided,
    /// x tends to exceed y.
    Greater,
    /// x tends to fall below y.
    Less,
}

/// How the signed-rank p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WilcoxonMethod {
    /// Exact distribution over all 2^n sign assignments.
    Exact,
    /// Normal approximation with tie-corrected variance and continuity
    /// correction.
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// min(w_plus, w_minus).
    pub w: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs remaining after zero differences were dropped.
    pub n_used: usize,
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

/// Pairs with |difference| at or below this are treated as zero and dropped.
const ZERO_TOL: f64 = 0.0;

/// Largest n handled by exact enumeration; beyond this the normal
/// approximation takes over.
pub const WILCOXON_EXACT_MAX_N: usize = 20;

/// Minimum usable pairs after zero-difference removal.
pub const WILCOXON_MIN_N: usize = 5;

/// Wilcoxon signed-rank test on paired samples, two-sided.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_signed_rank_tailed(x, y, Tail::TwoSided)
}

/// Wilcoxon signed-rank test with an explicit tail. Differences `x - y` of
/// exactly zero are dropped; absolute differences are ranked with average
/// ranks for ties. Exact enumeration is used for up to
/// [`WILCOXON_EXACT_MAX_N`] pairs.
pub fn wilcoxon_signed_rank_tailed(x: &[f64], y: &[f64], tail: Tail) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "paired samples of different lengths: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| d.abs() > ZERO_TOL)
        .collect();
    if diffs.is_empty() {
        return Err(Error::AllDifferencesZero);
    }
    let n = diffs.len();
    if n < WILCOXON_MIN_N {
        return Err(Error::InsufficientData(format!(
            "{n} nonzero differences; the signed-rank test needs at least {WILCOXON_MIN_N}"
        )));
    }

    let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let rank_sum = n as f64 * (n as f64 + 1.0) / 2.0;
    let w_minus = rank_sum - w_plus;
    let w = w_plus.min(w_minus);

    let (p_value, method) = if n <= WILCOXON_EXACT_MAX_N {
        (exact_p(&ranks, w_plus, tail), WilcoxonMethod::Exact)
    } else {
        (normal_p(&diffs, &ranks, w_plus, tail), WilcoxonMethod::NormalApprox)
    };

    Ok(WilcoxonResult {
        w,
        w_plus,
        w_minus,
        n_used: n,
        p_value: p_value.min(1.0),
        method,
    })
}

/// Average ranks (1-based) of values, ties sharing their mean rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the average of ranks i+1..=j+1
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Exact null distribution of the positive rank sum by dynamic programming
/// over doubled ranks (average ranks are half-integers, so doubling makes
/// them integers). Counts are exact; p = favorable / 2^n.
fn exact_p(ranks: &[f64], w_plus: f64, tail: Tail) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut ways = vec![0u64; total + 1];
    ways[0] = 1;
    for &r in &doubled {
        for t in (r..=total).rev() {
            ways[t] += ways[t - r];
        }
    }
    let w2 = (2.0 * w_plus).round() as usize;
    let count_le = |limit: usize| -> u64 { ways[..=limit.min(total)].iter().sum() };
    let n = ranks.len() as u32;
    let denom = 2f64.powi(n as i32);

    match tail {
        Tail::TwoSided => {
            // Mass at min(T, total - T) <= min(w2, total - w2), counted once.
            let m = w2.min(total - w2);
            let favorable: u64 = (0..=total)
                .filter(|&t| t.min(total - t) <= m)
                .map(|t| ways[t])
                .sum();
            favorable as f64 / denom
        }
        Tail::Greater => {
            // Large w_plus is evidence for x > y: P(T >= w2).
            let below = if w2 == 0 { 0 } else { count_le(w2 - 1) };
            (2u64.pow(n) - below) as f64 / denom
        }
        Tail::Less => count_le(w2) as f64 / denom,
    }
}

/// Normal approximation with tie-corrected variance and continuity
/// correction.
fn normal_p(diffs: &[f64], ranks: &[f64], w_plus: f64, tail: Tail) -> f64 {
    let n = diffs.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    // Tie correction: subtract sum(t^3 - t)/48 over groups of tied |d|.
    let mut sorted: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        var -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    let sd = var.sqrt();
    let _ = ranks;

    let phi = |z: f64| 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    match tail {
        Tail::TwoSided => {
            let w = w_plus.min(n * (n + 1.0) / 2.0 - w_plus);
            let z = (w - mean + 0.5) / sd;
            (2.0 * phi(z)).min(1.0)
        }
        Tail::Greater => {
            let z = (w_plus - mean - 0.5) / sd;
            1.0 - phi(z)
        }
        Tail::Less => {
            let z = (w_plus - mean + 0.5) / sd;
            phi(z)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Paired two-sided t-test: t = mean(d) * sqrt(n) / sd(d) with the sample
/// (n-1) standard deviation; the p-value comes from the Student-t
/// distribution via the regularized incomplete beta function.
pub fn paired_t_test(x: &[f64], y: &[f64]) -> Result<TTestResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "paired samples of different lengths: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData(
            "paired t-test needs at least 2 pairs".into(),
        ));
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let t = mean * (n as f64).sqrt() / var.sqrt();
    let df = n as f64 - 1.0;
    // Two-sided: P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
    let p_value = beta_reg(df / 2.0, 0.5, df / (df + t * t));
    Ok(TTestResult { t, df, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_shift_gives_w_zero_and_smallest_exact_p() {
        let y: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let x: Vec<f64> = y.iter().map(|v| v + 3.0).collect();
        let r = wilcoxon_signed_rank(&x, &y).unwrap();
        assert_eq!(r.w, 0.0);
        assert_eq!(r.n_used, 8);
        assert_eq!(r.method, WilcoxonMethod::Exact);
        // Only the all-positive and all-negative assignments reach the tail.
        assert!((r.p_value - 2.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn antisymmetric_differences_balance_rank_sums() {
        let x = [1.0, -1.0, 2.5, -2.5, 4.0, -4.0];
        let y = [0.0; 6];
        let r = wilcoxon_signed_rank(&x, &y).unwrap();
        assert_eq!(r.w_plus, r.w_minus);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn all_zero_differences_error() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(matches!(
            wilcoxon_signed_rank(&x, &x),
            Err(Error::AllDifferencesZero)
        ));
    }

    #[test]
    fn too_few_nonzero_pairs_error() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [0.0, 1.0, 2.0, 3.0];
        assert!(matches!(
            wilcoxon_signed_rank(&x, &y),
            Err(Error::InsufficientData(_))
        ));
    }

    /// Brute-force oracle: enumerate all 2^n sign assignments directly over
    /// the average ranks and count how many land at or beyond the observed
    /// statistic for the requested tail.
    fn brute_force_p(diffs: &[f64], tail: Tail) -> f64 {
        let n = diffs.len();
        let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
        let total: f64 = ranks.iter().sum();
        let obs_plus: f64 = diffs
            .iter()
            .zip(&ranks)
            .filter(|(d, _)| **d > 0.0)
            .map(|(_, r)| r)
            .sum();
        let obs_stat = obs_plus.min(total - obs_plus);
        let mut favorable = 0u64;
        for mask in 0u64..(1 << n) {
            let t: f64 = (0..n)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| ranks[i])
                .sum();
            let hit = match tail {
                Tail::TwoSided => t.min(total - t) <= obs_stat + 1e-9,
                Tail::Greater => t >= obs_plus - 1e-9,
                Tail::Less => t <= obs_plus + 1e-9,
            };
            if hit {
                favorable += 1;
            }
        }
        favorable as f64 / (1u64 << n) as f64
    }

    #[test]
    fn exact_p_matches_brute_force_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..50 {
            let n = rng.gen_range(5..=12usize);
            // Integer-ish values force plenty of ties.
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
            let nonzero = x.iter().zip(&y).filter(|(a, b)| a != b).count();
            if nonzero < WILCOXON_MIN_N {
                continue;
            }
            for tail in [Tail::TwoSided, Tail::Greater, Tail::Less] {
                let r = wilcoxon_signed_rank_tailed(&x, &y, tail).unwrap();
                let diffs: Vec<f64> =
                    x.iter().zip(&y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
                let oracle = brute_force_p(&diffs, tail);
                assert!(
                    (r.p_value - oracle).abs() < 1e-12,
                    "trial {trial} tail {tail:?}: impl {} vs oracle {oracle}",
                    r.p_value
                );
            }
        }
    }

    #[test]
    fn wilcoxon_is_symmetric_in_its_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(6..=30usize);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let a = wilcoxon_signed_rank(&x, &y).unwrap();
            let b = wilcoxon_signed_rank(&y, &x).unwrap();
            assert_eq!(a.w, b.w);
            assert!((a.p_value - b.p_value).abs() < 1e-12);
        }
    }

    #[test]
    fn large_samples_use_normal_approximation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f64> = (0..40).map(|_| rng.gen_range(0.0..1.0) + 0.3).collect();
        let y: Vec<f64> = (0..40).map(|_| rng.gen_range(0.0..1.0)).collect();
        let r = wilcoxon_signed_rank(&x, &y).unwrap();
        assert_eq!(r.method, WilcoxonMethod::NormalApprox);
        assert!(r.p_value > 0.0 && r.p_value <= 1.0);
    }

    #[test]
    fn t_test_zero_mean_difference() {
        let r = paired_t_test(&[1.0, -1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn t_test_hand_computed_example() {
        // d = (1, 2, 3, 4, 5): mean 3, sd sqrt(2.5), t = 3 sqrt(5) / sqrt(2.5).
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [0.0; 5];
        let r = paired_t_test(&x, &y).unwrap();
        assert!((r.t - 4.242640687119285).abs() < 1e-12);
        assert!((r.p_value - 0.0132).abs() / 0.0132 < 1e-2, "p = {}", r.p_value);
    }

    #[test]
    fn t_statistic_is_scale_invariant() {
        let x = [0.2, 0.9, 1.4, -0.3, 2.0, 0.7];
        let y = [0.0, 0.4, 1.0, 0.1, 1.1, 0.2];
        let a = paired_t_test(&x, &y).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let y2: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        let b = paired_t_test(&x2, &y2).unwrap();
        assert!((a.t - b.t).abs() < 1e-12);
        assert!((a.p_value - b.p_value).abs() < 1e-12);
    }

    #[test]
    fn t_test_zero_variance_error() {
        let x = [1.0, 2.0, 3.0];
        let y = [0.0, 1.0, 2.0];
        assert!(matches!(paired_t_test(&x, &y), Err(Error::ZeroVariance)));
    }

    #[test]
    fn p_value_decreases_as_t_grows() {
        // Fixed spread in the differences, growing mean: |t| increases with
        // the shift, so the p-value must fall.
        let noise = [0.05, -0.08, 0.02, -0.03, 0.07, -0.01];
        let y = [0.1, 0.9, 0.4, 0.6, 0.2, 0.8];
        let mut last_t = 0.0;
        let mut last_p = 1.0 + 1e-9;
        for shift in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let x: Vec<f64> = y
                .iter()
                .zip(&noise)
                .map(|(v, n)| v + n + shift)
                .collect();
            let r = paired_t_test(&x, &y).unwrap();
            assert!(r.t.abs() > last_t);
            assert!(r.p_value < last_p);
            assert!(r.p_value > 0.0 && r.p_value <= 1.0);
            last_t = r.t.abs();
            last_p = r.p_value;
        }
    }
}
