//! Approximate entropy, sample entropy and correlation-integral estimates.
//!
//! Delay vectors `x_i^{(m)} = (x_i, …, x_{i+m-1})` are compared in the maximum
//! norm and called similar when their distance is `≤ ε`. Everything is built
//! from exact integer match counts, so the counting strategy (and thread
//! count) never changes a result.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrParams {
    /// Embedding length `k ≥ 1`.
    pub k: usize,
    /// Similarity tolerance `ε > 0`, in the units of the series.
    pub epsilon: f64,
}

impl CorrParams {
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(domain("embedding length k must be ≥ 1"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(domain(format!(
                "tolerance ε must be positive and finite, got {epsilon}"
            )));
        }
        Ok(CorrParams { k, epsilon })
    }
}

/// `0.2 ×` the sample standard deviation.
pub fn default_epsilon(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    0.2 * (ss / (n - 1.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Compare every pair of delay vectors.
    Naive,
    /// Sort by first coordinate and only compare vectors whose first
    /// coordinates are within `ε`.
    #[default]
    Sorted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counting {
    pub strategy: Strategy,
    pub parallel: bool,
}

impl Default for Counting {
    fn default() -> Self {
        Counting {
            strategy: Strategy::Sorted,
            parallel: true,
        }
    }
}

#[inline]
fn similar(x: &[f64], i: usize, j: usize, m: usize, eps: f64) -> bool {
    (0..m).all(|l| (x[i + l] - x[j + l]).abs() <= eps)
}

/// `c_i = #{j : d(x_i^{(m)}, x_j^{(m)}) ≤ ε}` for each of the `N - m + 1`
/// templates, self-match included.
pub fn template_counts(x: &[f64], m: usize, eps: f64, counting: Counting) -> Vec<u64> {
    let n_templates = x.len() + 1 - m;
    match counting.strategy {
        Strategy::Naive => {
            let count = |i: usize| {
                (0..n_templates)
                    .filter(|&j| similar(x, i, j, m, eps))
                    .count() as u64
            };
            if counting.parallel {
                (0..n_templates).into_par_iter().map(count).collect()
            } else {
                (0..n_templates).map(count).collect()
            }
        }
        Strategy::Sorted => {
            let mut order: Vec<usize> = (0..n_templates).collect();
            order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
            let firsts: Vec<f64> = order.iter().map(|&i| x[i]).collect();
            let count = |i: usize| {
                let v = x[i];
                // both bounds use the same rounded difference as `similar`, and
                // a rounded difference is monotone in its argument
                let start = firsts.partition_point(|&b| b < v && (b - v).abs() > eps);
                let end = firsts.partition_point(|&b| b <= v || (b - v).abs() <= eps);
                order[start..end]
                    .iter()
                    .filter(|&&j| similar(x, i, j, m, eps))
                    .count() as u64
            };
            if counting.parallel {
                (0..n_templates).into_par_iter().map(count).collect()
            } else {
                (0..n_templates).map(count).collect()
            }
        }
    }
}

/// Number of similar pairs `i < j` at length `m`.
pub fn pair_count(x: &[f64], m: usize, eps: f64, counting: Counting) -> u64 {
    let counts = template_counts(x, m, eps, counting);
    let n = counts.len() as u64;
    (counts.iter().sum::<u64>() - n) / 2
}

fn check(x: &[f64], p: &CorrParams, min_len: usize) -> Result<()> {
    CorrParams::new(p.k, p.epsilon)?;
    if x.len() < min_len {
        return Err(domain(format!(
            "series of length {} is too short for k = {} (need ≥ {min_len})",
            x.len(),
            p.k
        )));
    }
    Ok(())
}

/// `Φ(m) = (1/M) Σ_i ln(c_i / M)` with `M = N - m + 1`, summed in index order.
fn phi(x: &[f64], m: usize, eps: f64, counting: Counting) -> f64 {
    let counts = template_counts(x, m, eps, counting);
    let total = counts.len() as f64;
    counts.iter().map(|&c| (c as f64 / total).ln()).sum::<f64>() / total
}

/// Approximate entropy `Φ(k) - Φ(k+1)`, self-matches included. Needs `N ≥ k + 2`.
pub fn apen(x: &[f64], p: &CorrParams) -> Result<f64> {
    apen_with(x, p, Counting::default())
}

pub fn apen_with(x: &[f64], p: &CorrParams, counting: Counting) -> Result<f64> {
    check(x, p, p.k + 2)?;
    Ok(phi(x, p.k, p.epsilon, counting) - phi(x, p.k + 1, p.epsilon, counting))
}

/// Sample entropy, which is undefined when no pair matches at length `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SampEn {
    Defined {
        value: f64,
        pairs_k: u64,
        pairs_k1: u64,
    },
    Undefined {
        pairs_k: u64,
        pairs_k1: u64,
    },
}

impl SampEn {
    pub fn value(&self) -> Option<f64> {
        match *self {
            SampEn::Defined { value, .. } => Some(value),
            SampEn::Undefined { .. } => None,
        }
    }
}

/// `Ĉ(m, ε)`: the fraction of the `M(M-1)/2` template pairs (`M = N - m + 1`)
/// that are similar.
fn correlation_sum(pairs: u64, m: usize, n: usize) -> f64 {
    let templates = (n + 1 - m) as f64;
    pairs as f64 / (templates * (templates - 1.0) / 2.0)
}

/// Sample entropy `ln Ĉ(k, ε) − ln Ĉ(k+1, ε)` over pairs `i < j`. Needs `N ≥ k + 2`.
pub fn sampen(x: &[f64], p: &CorrParams) -> Result<SampEn> {
    sampen_with(x, p, Counting::default())
}

pub fn sampen_with(x: &[f64], p: &CorrParams, counting: Counting) -> Result<SampEn> {
    check(x, p, p.k + 2)?;
    let pairs_k = pair_count(x, p.k, p.epsilon, counting);
    let pairs_k1 = pair_count(x, p.k + 1, p.epsilon, counting);
    if pairs_k1 == 0 {
        return Ok(SampEn::Undefined { pairs_k, pairs_k1 });
    }
    let c_k = correlation_sum(pairs_k, p.k, x.len());
    let c_k1 = correlation_sum(pairs_k1, p.k + 1, x.len());
    Ok(SampEn::Defined {
        value: c_k.ln() - c_k1.ln(),
        pairs_k,
        pairs_k1,
    })
}

/// `Ĉ(k, ε)` in `[0, 1]`. Needs at least two templates (`N ≥ k + 1`).
pub fn correlation_integral_estimate(x: &[f64], p: &CorrParams) -> Result<f64> {
    check(x, p, p.k + 1)?;
    let pairs = pair_count(x, p.k, p.epsilon, Counting::default());
    Ok(correlation_sum(pairs, p.k, x.len()))
}

/// `ln(Ĉ(k, ε) / Ĉ(k+1, ε))`, the correlation-entropy estimate; the same
/// quantity as [`sampen`] and computed by the same code.
pub fn h2_estimate(x: &[f64], p: &CorrParams) -> Result<SampEn> {
    sampen(x, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn strategies() -> [Counting; 4] {
        [
            Counting {
                strategy: Strategy::Naive,
                parallel: false,
            },
            Counting {
                strategy: Strategy::Naive,
                parallel: true,
            },
            Counting {
                strategy: Strategy::Sorted,
                parallel: false,
            },
            Counting {
                strategy: Strategy::Sorted,
                parallel: true,
            },
        ]
    }

    #[test]
    fn constant_series_is_zero() {
        let x = vec![3.5; 40];
        let p = CorrParams::new(2, 0.1).unwrap();
        assert_eq!(apen(&x, &p).unwrap(), 0.0);
        assert_eq!(sampen(&x, &p).unwrap().value(), Some(0.0));
        assert_eq!(h2_estimate(&x, &p).unwrap().value(), Some(0.0));
    }

    #[test]
    fn wide_tolerance() {
        let x = [0.1, 0.9, 0.4, 0.2, 0.7, 0.3];
        let p = CorrParams::new(2, 1.0).unwrap();
        assert_eq!(apen(&x, &p).unwrap(), 0.0);
        assert_eq!(correlation_integral_estimate(&x, &p).unwrap(), 1.0);
    }

    #[test]
    fn two_point_series() {
        let p = CorrParams::new(1, 0.5).unwrap();
        assert_eq!(correlation_integral_estimate(&[0.0, 1.0], &p).unwrap(), 0.0);
        assert!(sampen(&[0.0, 1.0], &p).is_err());
    }

    #[test]
    fn undefined_sampen() {
        let x = [0.0, 10.0, 20.0, 30.0, 40.0];
        let s = sampen(&x, &CorrParams::new(1, 1.0).unwrap()).unwrap();
        assert_eq!(
            s,
            SampEn::Undefined {
                pairs_k: 0,
                pairs_k1: 0
            }
        );
        assert_eq!(s.value(), None);
    }

    #[test]
    fn strategies_agree() {
        let mut rng = rng_from_seed(5);
        let x: Vec<f64> = (0..700)
            .map(|_| (rng.random::<f64>() * 16.0).round() / 8.0)
            .collect();
        for eps in [0.125, 0.25, 0.3] {
            let reference = template_counts(&x, 2, eps, strategies()[0]);
            for c in strategies() {
                assert_eq!(template_counts(&x, 2, eps, c), reference);
            }
        }
    }

    #[test]
    fn correlation_integral_monotone() {
        let mut rng = rng_from_seed(9);
        let x: Vec<f64> = (0..300).map(|_| rng.random()).collect();
        let mut prev = 0.0;
        for i in 1..20 {
            let c =
                correlation_integral_estimate(&x, &CorrParams::new(2, 0.05 * i as f64).unwrap())
                    .unwrap();
            assert!(c >= prev);
            prev = c;
        }
        let c2 = correlation_integral_estimate(&x, &CorrParams::new(2, 0.2).unwrap()).unwrap();
        let c3 = correlation_integral_estimate(&x, &CorrParams::new(3, 0.2).unwrap()).unwrap();
        assert!(c3 <= c2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CorrParams::new(0, 0.1).is_err());
        assert!(CorrParams::new(2, 0.0).is_err());
        assert!(CorrParams::new(2, f64::NAN).is_err());
        assert!(apen(&[1.0, 2.0, 3.0], &CorrParams::new(2, 0.1).unwrap()).is_err());
    }
}
