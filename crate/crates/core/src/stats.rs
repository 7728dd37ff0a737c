//! Ordinal tests of the i.i.d. null hypothesis: the chi-square test on
//! disjoint windows (Method 2), the G(L) permutation-entropy test and the
//! surrogate missing-pattern test (Method 1).
//!
//! Critical values are upper-tail: at level `α` the null is rejected when the
//! statistic exceeds the `1 − α` quantile of `χ²_{L!−1}`.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{domain, Result};
use crate::ordinal::{factorial, missing_patterns, ordinal_distribution, permutation_entropy};
use crate::rng::{rng_for_stream, stream};

/// Largest pattern order for the chi-square test.
pub const MAX_CHI2_ORDER: usize = 6;
/// Below this many surrogates the p-value resolution is coarser than 0.05.
pub const MIN_SURROGATES: usize = 19;

fn check_dof(dof: f64) -> Result<()> {
    if !(dof >= 1.0 && dof.is_finite()) {
        return Err(domain(format!("degrees of freedom must be ≥ 1, got {dof}")));
    }
    Ok(())
}

/// `P(χ²_dof ≤ x)`, the regularized lower incomplete gamma `P(dof/2, x/2)`.
pub fn chi2_cdf(x: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    if !(x >= 0.0) {
        return Err(domain(format!("chi-square argument must be ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma_lr(dof / 2.0, x / 2.0))
}

/// `P(χ²_dof > x)`, computed directly so that tiny tail probabilities keep
/// their relative accuracy.
pub fn chi2_sf(x: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    if !(x >= 0.0) {
        return Err(domain(format!("chi-square argument must be ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma_ur(dof / 2.0, x / 2.0))
}

/// Inverse of [`chi2_cdf`] by bracketing and bisection.
pub fn chi2_quantile(p: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let mut hi = dof.max(1.0);
    while chi2_cdf(hi, dof)? < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-13 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chi2_cdf(mid, dof)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: u64,
    pub alpha: f64,
    /// `χ²_{dof}` quantile at `1 − α`.
    pub critical_value: f64,
    pub p_value: f64,
    pub decision: Decision,
    /// Conditions under which the chi-square approximation is doubtful.
    pub flags: Vec<String>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

fn decide(statistic: f64, dof: u64, alpha: f64, flags: Vec<String>) -> Result<TestResult> {
    let critical_value = chi2_quantile(1.0 - alpha, dof as f64)?;
    let p_value = chi2_sf(statistic, dof as f64)?;
    let decision = if statistic > critical_value {
        Decision::Reject
    } else {
        Decision::Accept
    };
    Ok(TestResult {
        statistic,
        dof,
        alpha,
        critical_value,
        p_value,
        decision,
        flags,
    })
}

/// Chi-square goodness of fit of the pattern counts `ν` of the `K = ⌊N/L⌋`
/// disjoint windows to the uniform law on `S_L`:
/// `χ² = (L!/K) Σ ν² − K` with `L! − 1` degrees of freedom.
pub fn method2_chi2_test(x: &[f64], order: usize, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    if !(2..=MAX_CHI2_ORDER).contains(&order) {
        return Err(domain(format!(
            "pattern order must lie in 2..={MAX_CHI2_ORDER}, got {order}"
        )));
    }
    let dist = ordinal_distribution(x, order, order)?;
    let k = dist.total();
    if k < 2 {
        return Err(domain(format!("need at least 2 disjoint windows, got {k}")));
    }
    let fact = factorial(order);
    let sum_sq: u128 = dist
        .counts()
        .iter()
        .map(|&c| (c as u128) * (c as u128))
        .sum();
    // exact integer numerator, one rounding
    let statistic = ((fact as u128 * sum_sq - (k as u128) * (k as u128)) as f64) / k as f64;
    let mut flags = Vec::new();
    if dist.counts().iter().any(|&c| c > 0 && c <= 10) {
        flags.push("visible pattern with count ≤ 10".to_string());
    }
    if k as f64 / fact as f64 <= 5.0 {
        flags.push("K/L! ≤ 5".to_string());
    }
    decide(statistic, fact - 1, alpha, flags)
}

/// `G(L) = 2 (N − L + 1)(ln L! − h_L)` with `h_L` the permutation entropy of
/// the overlapping windows, against `χ²_{L!−1}`.
pub fn g_test(x: &[f64], order: usize, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let h = permutation_entropy(x, order)?.raw;
    let windows = (x.len() - order + 1) as f64;
    let fact = factorial(order);
    let statistic = (2.0 * windows * ((fact as f64).ln() - h)).max(0.0);
    let mut flags = Vec::new();
    if windows / (fact as f64) <= 5.0 {
        flags.push("(N − L + 1)/L! ≤ 5".to_string());
    }
    decide(statistic, fact - 1, alpha, flags)
}

/// A uniformly random permutation of `x` (Fisher–Yates) on stream
/// `SURROGATE_BASE + index` of `seed`.
pub fn surrogate(x: &[f64], seed: u64, index: u64) -> Vec<f64> {
    let mut rng = rng_for_stream(seed, stream::SURROGATE_BASE + index);
    let mut s = x.to_vec();
    s.shuffle(&mut rng);
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateResult {
    pub order: usize,
    pub observed_missing: usize,
    /// Missing patterns in the first half of the series, for judging whether
    /// the observed count is stable in the length.
    pub observed_missing_half: Option<usize>,
    /// One entry per surrogate, in surrogate order.
    pub surrogate_missing: Vec<usize>,
    /// Fraction of surrogates with at least as many missing patterns.
    pub p_value: f64,
    pub flags: Vec<String>,
}

/// Method 1: compares the number of missing patterns of `x` to that of
/// shuffled copies.
pub fn method1_surrogate_test(
    x: &[f64],
    order: usize,
    n_surrogates: usize,
    seed: u64,
) -> Result<SurrogateResult> {
    if n_surrogates == 0 {
        return Err(domain("need at least one surrogate"));
    }
    let observed = missing_patterns(x, order)?.missing;
    let half = &x[..x.len() / 2];
    let observed_half = if half.len() >= order {
        Some(missing_patterns(half, order)?.missing)
    } else {
        None
    };
    let surrogate_missing = (0..n_surrogates as u64)
        .into_par_iter()
        .map(|i| missing_patterns(&surrogate(x, seed, i), order).map(|m| m.missing))
        .collect::<Result<Vec<_>>>()?;
    let at_least = surrogate_missing.iter().filter(|&&m| m >= observed).count();
    let mut flags = Vec::new();
    if n_surrogates < MIN_SURROGATES {
        flags.push(format!("fewer than {MIN_SURROGATES} surrogates"));
    }
    if (x.len() as u64) < factorial(order + 1) {
        flags.push("N < (L+1)!".to_string());
    }
    Ok(SurrogateResult {
        order,
        observed_missing: observed,
        observed_missing_half: observed_half,
        surrogate_missing,
        p_value: at_least as f64 / n_surrogates as f64,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::IntervalMap;

    #[test]
    fn cdf_quantile_pairs() {
        assert_eq!(chi2_cdf(0.0, 3.0).unwrap(), 0.0);
        assert!((chi2_quantile(0.95, 1.0).unwrap() - 3.841_458_820_694_124).abs() < 1e-9);
        for &dof in &[1.0, 2.0, 5.0, 23.0, 119.0] {
            for &p in &[0.01, 0.05, 0.5, 0.95, 0.999] {
                let q = chi2_quantile(p, dof).unwrap();
                assert!((chi2_cdf(q, dof).unwrap() - p).abs() < 1e-9);
            }
        }
        assert!(chi2_quantile(1.0, 2.0).is_err());
        assert!(chi2_cdf(-1.0, 2.0).is_err());
        assert!(chi2_cdf(1.0, 0.0).is_err());
    }

    #[test]
    fn constant_series_maximal_statistics() {
        let x = vec![1.0; 600];
        let m2 = method2_chi2_test(&x, 3, 0.05).unwrap();
        assert_eq!(m2.statistic, 200.0 * 5.0);
        assert_eq!(m2.decision, Decision::Reject);
        let g = g_test(&x, 3, 0.05).unwrap();
        assert!((g.statistic - 2.0 * 598.0 * 6f64.ln()).abs() < 1e-9);
        assert_eq!(g.decision, Decision::Reject);
    }

    #[test]
    fn logistic_is_rejected() {
        let x = IntervalMap::logistic(4.0)
            .unwrap()
            .orbit(0.2718, 20_000)
            .unwrap();
        for t in [
            method2_chi2_test(&x, 3, 0.05).unwrap(),
            g_test(&x, 3, 0.05).unwrap(),
        ] {
            assert_eq!(t.decision, Decision::Reject);
            assert!(t.p_value < 1e-6);
        }
        let s = method1_surrogate_test(&x, 4, 19, 7).unwrap();
        assert_eq!(s.p_value, 0.0);
        assert!(s.flags.is_empty());
    }

    #[test]
    fn surrogates_preserve_values_and_are_seeded() {
        let x: Vec<f64> = (0..100).map(|i| ((i * 37) % 101) as f64).collect();
        let s = surrogate(&x, 3, 0);
        let mut a = x.clone();
        let mut b = s.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
        assert_eq!(s, surrogate(&x, 3, 0));
        assert_ne!(s, surrogate(&x, 3, 1));
        let r = method1_surrogate_test(&x, 3, 5, 1).unwrap();
        assert_eq!(r, method1_surrogate_test(&x, 3, 5, 1).unwrap());
        assert_eq!(r.flags.len(), 1);
    }

    #[test]
    fn rejects_bad_arguments() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        assert!(method2_chi2_test(&x, 7, 0.05).is_err());
        assert!(method2_chi2_test(&x, 3, 0.05).is_err());
        assert!(g_test(&x, 3, 1.0).is_err());
        assert!(method1_surrogate_test(&x, 3, 0, 1).is_err());
    }
}
