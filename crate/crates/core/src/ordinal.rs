//! Ordinal patterns and permutation entropies.
//!
//! The ordinal pattern of a window `(x_0, …, x_{L-1})` is the permutation
//! `r` with `x_{r_0} < x_{r_1} < … < x_{r_{L-1}}`; equal values are ranked
//! by position, earlier first. Windows run forward in time with delay 1.
//! Patterns are indexed by their Lehmer code, so a census over `S_L` is a
//! dense vector of length `L!`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, validation, Error, Result};
use crate::prob::entropy_of_counts;

/// Largest order for which full `L!` censuses are built.
pub const MAX_CENSUS_ORDER: usize = 8;
/// Largest order whose Lehmer code fits in a `u64`.
pub const MAX_PATTERN_ORDER: usize = 20;

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// A permutation of `0..L`, `L ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrdinalPattern {
    ranks: Vec<usize>,
}

impl OrdinalPattern {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let l = ranks.len();
        if !(2..=MAX_PATTERN_ORDER).contains(&l) {
            return Err(domain(format!(
                "pattern order must lie in 2..={MAX_PATTERN_ORDER}, got {l}"
            )));
        }
        let mut seen = vec![false; l];
        for &r in &ranks {
            if r >= l || seen[r] {
                return Err(validation(format!(
                    "{ranks:?} is not a permutation of 0..{l}"
                )));
            }
            seen[r] = true;
        }
        Ok(OrdinalPattern { ranks })
    }

    pub fn identity(order: usize) -> Result<Self> {
        Self::new((0..order).collect())
    }

    pub fn order(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Lehmer code in `0..L!`; the identity is 0.
    pub fn index(&self) -> u64 {
        lehmer_code(&self.ranks)
    }

    pub fn from_index(order: usize, index: u64) -> Result<Self> {
        if !(2..=MAX_PATTERN_ORDER).contains(&order) {
            return Err(domain(format!(
                "pattern order must lie in 2..={MAX_PATTERN_ORDER}, got {order}"
            )));
        }
        if index >= factorial(order) {
            return Err(domain(format!(
                "index {index} out of range for order {order}"
            )));
        }
        Ok(OrdinalPattern {
            ranks: lehmer_decode(order, index),
        })
    }
}

impl fmt::Display for OrdinalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for OrdinalPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ranks = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| validation(format!("bad rank {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ranks)
    }
}

impl Serialize for OrdinalPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn lehmer_code(perm: &[usize]) -> u64 {
    let l = perm.len();
    let mut code = 0u64;
    for i in 0..l {
        let smaller = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count() as u64;
        code = code * (l - i) as u64 + smaller;
    }
    code
}

fn lehmer_decode(order: usize, mut code: u64) -> Vec<usize> {
    let mut digits = vec![0usize; order];
    for i in (0..order).rev() {
        let radix = (order - i) as u64;
        digits[i] = (code % radix) as usize;
        code /= radix;
    }
    let mut pool: Vec<usize> = (0..order).collect();
    digits.into_iter().map(|d| pool.remove(d)).collect()
}

/// Lehmer code of the ordinal pattern of `w` without allocating.
fn window_code(w: &[f64]) -> u64 {
    let mut idx = [0usize; MAX_CENSUS_ORDER];
    let l = w.len();
    // insertion sort is stable, which realizes the earlier-index tie rule
    for i in 0..l {
        let mut j = i;
        while j > 0 && w[idx[j - 1]] > w[i] {
            idx[j] = idx[j - 1];
            j -= 1;
        }
        idx[j] = i;
    }
    lehmer_code(&idx[..l])
}

/// Ordinal pattern of a window; ties rank the earlier index lower.
pub fn pattern_of(window: &[f64]) -> Result<OrdinalPattern> {
    let l = window.len();
    if !(2..=MAX_PATTERN_ORDER).contains(&l) {
        return Err(domain(format!(
            "window length must lie in 2..={MAX_PATTERN_ORDER}, got {l}"
        )));
    }
    let mut idx: Vec<usize> = (0..l).collect();
    idx.sort_by(|&a, &b| window[a].total_cmp(&window[b]));
    Ok(OrdinalPattern { ranks: idx })
}

fn check_orders(r: &OrdinalPattern, s: &OrdinalPattern) -> Result<()> {
    if r.order() != s.order() {
        return Err(domain(format!(
            "pattern orders differ: {} vs {}",
            r.order(),
            s.order()
        )));
    }
    Ok(())
}

/// Group product `(r∘s)_i = s_{r_i}`.
pub fn compose(r: &OrdinalPattern, s: &OrdinalPattern) -> Result<OrdinalPattern> {
    check_orders(r, s)?;
    Ok(OrdinalPattern {
        ranks: r.ranks.iter().map(|&i| s.ranks[i]).collect(),
    })
}

pub fn invert(r: &OrdinalPattern) -> OrdinalPattern {
    let mut inv = vec![0; r.order()];
    for (i, &ri) in r.ranks.iter().enumerate() {
        inv[ri] = i;
    }
    OrdinalPattern { ranks: inv }
}

/// The transcript `τ = β∘α⁻¹`, the unique element with `τ∘α = β`.
pub fn transcript(alpha: &OrdinalPattern, beta: &OrdinalPattern) -> Result<OrdinalPattern> {
    check_orders(alpha, beta)?;
    compose(beta, &invert(alpha))
}

/// Window counts over `S_L`, indexed by Lehmer code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternDistribution {
    order: usize,
    stride: usize,
    counts: Vec<u64>,
    total: u64,
}

impl PatternDistribution {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Counts indexed by [`OrdinalPattern::index`].
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, pattern: &OrdinalPattern) -> u64 {
        if pattern.order() != self.order {
            return 0;
        }
        self.counts[pattern.index() as usize]
    }

    /// Observed patterns with their counts, in Lehmer order.
    pub fn observed(&self) -> impl Iterator<Item = (OrdinalPattern, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| {
                (
                    OrdinalPattern {
                        ranks: lehmer_decode(self.order, i as u64),
                    },
                    c,
                )
            })
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_counts(self.counts.iter().copied(), self.total)
    }
}

fn check_census(n: usize, order: usize) -> Result<()> {
    if !(2..=MAX_CENSUS_ORDER).contains(&order) {
        return Err(domain(format!(
            "pattern order must lie in 2..={MAX_CENSUS_ORDER}, got {order}"
        )));
    }
    if n < order {
        return Err(domain(format!(
            "series of length {n} is shorter than the pattern order {order}"
        )));
    }
    Ok(())
}

/// Census of the patterns of the windows starting at `0, stride, 2·stride, …`.
/// `stride = 1` gives overlapping windows, `stride = L` disjoint ones.
pub fn ordinal_distribution(x: &[f64], order: usize, stride: usize) -> Result<PatternDistribution> {
    check_census(x.len(), order)?;
    if stride == 0 {
        return Err(domain("stride must be ≥ 1"));
    }
    let windows = (x.len() - order) / stride + 1;
    let size = factorial(order) as usize;
    let counts = (0..windows)
        .into_par_iter()
        .with_min_len(4096)
        .fold(
            || vec![0u64; size],
            |mut acc, w| {
                let t = w * stride;
                acc[window_code(&x[t..t + order]) as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(PatternDistribution {
        order,
        stride,
        counts,
        total: windows as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PermutationEntropy {
    pub order: usize,
    /// `H(π_L)` in nats, in `[0, ln L!]`.
    pub raw: f64,
    /// `H(π_L) / L`.
    pub per_symbol: f64,
    /// `H(π_L) / (L - 1)`, entropy per transition inside a window.
    pub per_transition: f64,
    /// `H(π_L) / ln L!`.
    pub normalized: f64,
}

/// Permutation entropy of order `L` from overlapping windows.
pub fn permutation_entropy(x: &[f64], order: usize) -> Result<PermutationEntropy> {
    let h = ordinal_distribution(x, order, 1)?.entropy();
    let l = order as f64;
    Ok(PermutationEntropy {
        order,
        raw: h,
        per_symbol: h / l,
        per_transition: h / (l - 1.0),
        normalized: h / (factorial(order) as f64).ln(),
    })
}

/// `H(π_L ∨ T⁻¹π_L) − H(π_L)`: the entropy of the next window's pattern given
/// the current one, over the `N − L` consecutive window pairs.
pub fn conditional_entropy_ordinal(x: &[f64], order: usize) -> Result<f64> {
    check_census(x.len(), order)?;
    if x.len() < order + 1 {
        return Err(domain(format!(
            "need at least {} values, got {}",
            order + 1,
            x.len()
        )));
    }
    let codes: Vec<u64> = x.windows(order).map(window_code).collect();
    let size = factorial(order);
    let mut pairs: Vec<u64> = codes.windows(2).map(|w| w[0] * size + w[1]).collect();
    pairs.sort_unstable();
    let total = pairs.len() as u64;
    let run_lengths = |keys: &[u64]| -> Vec<u64> {
        keys.chunk_by(|a, b| a == b)
            .map(|c| c.len() as u64)
            .collect()
    };
    let h_joint = entropy_of_counts(run_lengths(&pairs), total);
    let mut first: Vec<u64> = pairs.iter().map(|k| k / size).collect();
    first.sort_unstable();
    let h_first = entropy_of_counts(run_lengths(&first), total);
    Ok((h_joint - h_first).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissingPatterns {
    pub order: usize,
    pub observed: usize,
    pub missing: usize,
    pub missing_list: Vec<OrdinalPattern>,
}

/// Patterns of order `L` that no window of `x` realizes.
pub fn missing_patterns(x: &[f64], order: usize) -> Result<MissingPatterns> {
    let dist = ordinal_distribution(x, order, 1)?;
    let missing_list: Vec<OrdinalPattern> = dist
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 0)
        .map(|(i, _)| OrdinalPattern {
            ranks: lehmer_decode(order, i as u64),
        })
        .collect();
    Ok(MissingPatterns {
        order,
        observed: dist.counts.len() - missing_list.len(),
        missing: missing_list.len(),
        missing_list,
    })
}

/// `(1/L) ln |π_L|`, with `|π_L|` the number of observed patterns.
pub fn topological_perm_entropy_order(x: &[f64], order: usize) -> Result<f64> {
    let m = missing_patterns(x, order)?;
    Ok((m.observed as f64).ln() / order as f64)
}

/// One pattern per line, ranks comma-separated.
pub fn format_pattern_list(patterns: &[OrdinalPattern]) -> String {
    patterns.iter().map(|p| format!("{p}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::IntervalMap;

    fn p(r: &[usize]) -> OrdinalPattern {
        OrdinalPattern::new(r.to_vec()).unwrap()
    }

    fn all(order: usize) -> Vec<OrdinalPattern> {
        (0..factorial(order))
            .map(|i| OrdinalPattern::from_index(order, i).unwrap())
            .collect()
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(pattern_of(&[1.0, 2.0, 3.0, 4.0]).unwrap(), p(&[0, 1, 2, 3]));
        assert_eq!(pattern_of(&[1.0, 3.0, 2.0]).unwrap(), p(&[0, 2, 1]));
        assert_eq!(pattern_of(&[5.0, 5.0]).unwrap(), p(&[0, 1]));
        assert!(pattern_of(&[1.0]).is_err());
    }

    #[test]
    fn window_code_matches_pattern_of() {
        let w = [0.3, 0.1, 0.3, 0.9, 0.1, 0.5];
        assert_eq!(window_code(&w), pattern_of(&w).unwrap().index());
    }

    #[test]
    fn lehmer_round_trip() {
        for order in 2..=5 {
            for (i, q) in all(order).iter().enumerate() {
                assert_eq!(q.index(), i as u64);
            }
        }
        assert_eq!(OrdinalPattern::identity(4).unwrap().index(), 0);
    }

    #[test]
    fn group_axioms_exhaustive() {
        for order in 2..=4 {
            let g = all(order);
            let e = OrdinalPattern::identity(order).unwrap();
            for a in &g {
                assert_eq!(&compose(&e, a).unwrap(), a);
                assert_eq!(&compose(a, &e).unwrap(), a);
                assert_eq!(compose(a, &invert(a)).unwrap(), e);
                assert_eq!(compose(&invert(a), a).unwrap(), e);
                if order <= 3 {
                    for b in &g {
                        for c in &g {
                            let left = compose(&compose(a, b).unwrap(), c).unwrap();
                            let right = compose(a, &compose(b, c).unwrap()).unwrap();
                            assert_eq!(left, right);
                        }
                    }
                }
            }
        }
        assert_eq!(compose(&p(&[1, 0]), &p(&[1, 0])).unwrap(), p(&[0, 1]));
        assert!(compose(&p(&[1, 0]), &p(&[0, 1, 2])).is_err());
    }

    #[test]
    fn transcripts_on_s3() {
        let g = all(3);
        let e = OrdinalPattern::identity(3).unwrap();
        let mut fibres = [0usize; 6];
        for a in &g {
            assert_eq!(transcript(a, a).unwrap(), e);
            for b in &g {
                let t = transcript(a, b).unwrap();
                assert_eq!(&compose(&t, a).unwrap(), b);
                fibres[t.index() as usize] += 1;
            }
        }
        assert!(fibres.iter().all(|&c| c == 6));
    }

    #[test]
    fn monotone_and_short_series() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let d = ordinal_distribution(&x, 4, 1).unwrap();
        assert_eq!(d.counts()[0], 47);
        assert_eq!(d.total(), 47);
        assert_eq!(permutation_entropy(&x, 4).unwrap().raw, 0.0);
        assert_eq!(conditional_entropy_ordinal(&x, 3).unwrap(), 0.0);
        assert_eq!(topological_perm_entropy_order(&x, 5).unwrap(), 0.0);
        let single = missing_patterns(&x[..4], 4).unwrap();
        assert_eq!(single.missing, 23);
        assert!(ordinal_distribution(&x[..2], 3, 1).is_err());
        assert!(ordinal_distribution(&x, 9, 1).is_err());
    }

    #[test]
    fn disjoint_windows_match_brute_force() {
        let x = IntervalMap::logistic(3.9)
            .unwrap()
            .orbit(0.123, 1000)
            .unwrap();
        let d = ordinal_distribution(&x, 4, 4).unwrap();
        let mut brute = [0u64; 24];
        for w in x.chunks_exact(4) {
            brute[pattern_of(w).unwrap().index() as usize] += 1;
        }
        assert_eq!(d.counts(), &brute[..]);
        assert_eq!(d.total(), 250);
    }

    #[test]
    fn logistic_forbidden_pattern() {
        let x = IntervalMap::logistic(4.0)
            .unwrap()
            .orbit(0.3141, 100_000)
            .unwrap();
        let m = missing_patterns(&x, 3).unwrap();
        assert_eq!(m.missing_list, vec![p(&[2, 1, 0])]);
        // each missing pattern at L = 3 leaves at least one missing extension at L = 4
        assert!(missing_patterns(&x, 4).unwrap().missing >= 1);
        let c = conditional_entropy_ordinal(&x, 3).unwrap();
        assert!(c > 0.0 && c <= 6f64.ln());
        assert_eq!(format_pattern_list(&m.missing_list), "2,1,0\n");
    }

    #[test]
    fn pattern_text_round_trip() {
        let q: OrdinalPattern = "2, 0,1".parse().unwrap();
        assert_eq!(q.to_string(), "2,0,1");
        assert!("0,0".parse::<OrdinalPattern>().is_err());
    }
}
