//! Exact entropies from ergodic theory and the simulators and plug-in
//! estimators that are validated against them.
//!
//! Symbols are `0..k`. Matrices are row-major `Vec<Vec<_>>`, with `P[i][j]`
//! the probability of moving from `i` to `j`.

mod interval;
mod sft;
mod toral;

pub use interval::{
    lap_number_entropy, lyapunov_entropy_estimate_1d, IntervalMap, LapCount, LyapunovEstimate,
};
pub use sft::{parry_measure, spectral_radius, topological_markov_entropy, TransitionMatrix01};
pub use toral::{characteristic_polynomial, toral_automorphism_entropy};

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{domain, validation, Error, Result};
use crate::prob::{entropy_of_counts, neg_x_ln_x_sum, ProbVec};
use crate::rng::{rng_for_stream, stream};

/// Row-sum tolerance for stochastic matrices.
pub const ROW_TOLERANCE: f64 = 1e-12;
/// Tolerance on `pP = p`.
pub const STATIONARITY_TOLERANCE: f64 = 1e-10;

/// A finite sequence over the alphabet `0..alphabet`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolSeq {
    symbols: Vec<usize>,
    alphabet: usize,
}

impl SymbolSeq {
    pub fn new(symbols: Vec<usize>, alphabet: usize) -> Result<Self> {
        if alphabet == 0 {
            return Err(validation("alphabet size must be ≥ 1"));
        }
        if let Some(i) = symbols.iter().position(|&s| s >= alphabet) {
            return Err(validation(format!(
                "symbol {} at {i} outside alphabet of size {alphabet}",
                symbols[i]
            )));
        }
        Ok(SymbolSeq { symbols, alphabet })
    }

    /// Uses the smallest alphabet that contains every symbol.
    pub fn from_symbols(symbols: Vec<usize>) -> Result<Self> {
        let k = symbols.iter().max().map_or(1, |m| m + 1);
        Self::new(symbols, k)
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Empirical symbol frequencies.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.alphabet];
        for &s in &self.symbols {
            counts[s] += 1;
        }
        let n = self.symbols.len().max(1) as f64;
        counts.into_iter().map(|c| c as f64 / n).collect()
    }
}

fn validate_stochastic(p: &[Vec<f64>]) -> Result<usize> {
    let k = p.len();
    if k == 0 {
        return Err(validation("transition matrix is empty"));
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != k {
            return Err(validation(format!(
                "transition matrix row {i} has {} entries, expected {k}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(validation(format!(
                "transition entry ({i},{j}) = {} is not a probability",
                row[j]
            )));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_TOLERANCE {
            return Err(validation(format!("row {i} sums to {s}, not 1")));
        }
    }
    Ok(k)
}

/// Strongly connected components of the directed graph `adj`, in discovery order.
pub(crate) fn strongly_connected_components(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let k = adj.len();
    let reach = |from: usize| {
        let mut seen = vec![false; k];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for v in 0..k {
                if adj[u][v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let reach_all: Vec<Vec<bool>> = (0..k).map(reach).collect();
    let mut assigned = vec![false; k];
    let mut comps = Vec::new();
    for i in 0..k {
        if assigned[i] {
            continue;
        }
        let comp: Vec<usize> = (0..k)
            .filter(|&j| reach_all[i][j] && reach_all[j][i])
            .collect();
        for &j in &comp {
            assigned[j] = true;
        }
        comps.push(comp);
    }
    comps
}

/// A component with no edge leaving it.
pub(crate) fn closed_class(adj: &[Vec<bool>], comps: &[Vec<usize>]) -> Vec<usize> {
    comps
        .iter()
        .find(|c| {
            c.iter()
                .all(|&u| (0..adj.len()).all(|v| !adj[u][v] || c.contains(&v)))
        })
        .cloned()
        .unwrap_or_default()
}

/// Unique stationary vector of an irreducible row-stochastic matrix.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<ProbVec> {
    let k = validate_stochastic(p)?;
    let adj: Vec<Vec<bool>> = p
        .iter()
        .map(|r| r.iter().map(|&x| x > 0.0).collect())
        .collect();
    let comps = strongly_connected_components(&adj);
    if comps.len() > 1 {
        return Err(Error::Reducible {
            class: closed_class(&adj, &comps),
        });
    }
    // p (P - I) = 0 with the last equation replaced by Σ p = 1
    let mut a = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            a[(j, i)] = p[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..k {
        a[(k - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k);
    b[k - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| validation("stationary system is singular"))?;
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    ProbVec::from_weights(&clipped)
}

/// A stationary Markov source: stationary vector `p` and transition matrix `P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovModel {
    stationary: ProbVec,
    transition: Vec<Vec<f64>>,
}

impl MarkovModel {
    pub fn new(stationary: ProbVec, transition: Vec<Vec<f64>>) -> Result<Self> {
        let k = validate_stochastic(&transition)?;
        if stationary.len() != k {
            return Err(validation(format!(
                "stationary vector has {} entries for {k} states",
                stationary.len()
            )));
        }
        let p = stationary.probs();
        for j in 0..k {
            let pj: f64 = (0..k).map(|i| p[i] * transition[i][j]).sum();
            if (pj - p[j]).abs() > STATIONARITY_TOLERANCE {
                return Err(validation(format!(
                    "pP differs from p at state {j}: {pj} vs {}",
                    p[j]
                )));
            }
        }
        Ok(MarkovModel {
            stationary,
            transition,
        })
    }

    /// Builds the model from an irreducible `P`, solving for its stationary vector.
    pub fn from_transition(transition: Vec<Vec<f64>>) -> Result<Self> {
        let stationary = stationary_distribution(&transition)?;
        Self::new(stationary, transition)
    }

    /// The i.i.d. source with every row equal to `p`.
    pub fn bernoulli(p: &ProbVec) -> Self {
        let rows = vec![p.probs().to_vec(); p.len()];
        MarkovModel {
            stationary: p.clone(),
            transition: rows,
        }
    }

    pub fn stationary(&self) -> &ProbVec {
        &self.stationary
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn states(&self) -> usize {
        self.transition.len()
    }

    /// `ln m([x_0 ... x_{n-1}])`, the log-probability of a cylinder.
    pub fn log_probability(&self, seq: &[usize]) -> f64 {
        let Some(&first) = seq.first() else {
            return 0.0;
        };
        let mut lp = self.stationary.probs()[first].ln();
        for w in seq.windows(2) {
            lp += self.transition[w[0]][w[1]].ln();
        }
        lp
    }
}

/// Entropy of the Bernoulli shift with one-symbol law `p`.
pub fn bernoulli_entropy(p: &ProbVec) -> f64 {
    neg_x_ln_x_sum(p.probs().iter().copied())
}

/// `-Σ_{i,j} p_i p_ij ln p_ij`.
pub fn markov_entropy_rate(m: &MarkovModel) -> f64 {
    m.stationary
        .probs()
        .iter()
        .zip(&m.transition)
        .map(|(&pi, row)| pi * neg_x_ln_x_sum(row.iter().copied()))
        .sum()
}

fn sample_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Draws `n` symbols from `m`, starting from the stationary law. Reproducible per `seed`.
pub fn simulate_markov(m: &MarkovModel, n: usize, seed: u64) -> Result<SymbolSeq> {
    if n == 0 {
        return Err(domain("simulation length must be ≥ 1"));
    }
    let mut rng = rng_for_stream(seed, stream::MARKOV);
    let mut out = Vec::with_capacity(n);
    let mut state = sample_index(m.stationary.probs(), rng.random());
    out.push(state);
    for _ in 1..n {
        state = sample_index(&m.transition[state], rng.random());
        out.push(state);
    }
    SymbolSeq::new(out, m.states())
}

/// Codes each value by the half-open cell `[c_i, c_{i+1})` of `cut_points` that contains it.
pub fn symbolize(values: &[f64], cut_points: &[f64]) -> Result<SymbolSeq> {
    if values.is_empty() {
        return Err(validation("cannot symbolize an empty series"));
    }
    if cut_points.windows(2).any(|w| !(w[0] < w[1])) || cut_points.iter().any(|c| !c.is_finite()) {
        return Err(validation(
            "cut points must be finite and strictly increasing",
        ));
    }
    let symbols = values
        .iter()
        .map(|&v| {
            if v.is_nan() {
                Err(validation("series contains NaN"))
            } else {
                Ok(cut_points.partition_point(|&c| c <= v))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SymbolSeq::new(symbols, cut_points.len() + 1)
}

/// Block and conditional plug-in entropy rates at block length `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PluginRate {
    pub block_length: usize,
    /// `H_n / n`
    pub block_rate: f64,
    /// `H_n - H_{n-1}`
    pub conditional_rate: f64,
    pub distinct_blocks: usize,
    /// More distinct blocks than a tenth of the sequence length.
    pub undersampled: bool,
}

/// Counts of the overlapping `n`-blocks of `s`, ordered by block.
pub(crate) fn block_counts(symbols: &[usize], alphabet: usize, n: usize) -> Vec<u64> {
    if n == 0 || symbols.len() < n {
        return Vec::new();
    }
    let radix = alphabet.max(2) as u128;
    let fits = (n as u32 + 1) * (128 - radix.leading_zeros()) <= 127;
    if fits {
        let modulus = radix.pow(n as u32);
        let mut map: HashMap<u128, u64> = HashMap::new();
        let mut code: u128 = 0;
        for (i, &s) in symbols.iter().enumerate() {
            code = (code * radix + s as u128) % modulus;
            if i + 1 >= n {
                *map.entry(code).or_insert(0) += 1;
            }
        }
        let mut v: Vec<(u128, u64)> = map.into_iter().collect();
        v.sort_unstable_by_key(|e| e.0);
        return v.into_iter().map(|e| e.1).collect();
    }
    let mut map: HashMap<&[usize], u64> = HashMap::new();
    for w in symbols.windows(n) {
        *map.entry(w).or_insert(0) += 1;
    }
    let mut sorted: Vec<(&[usize], u64)> = map.into_iter().collect();
    sorted.sort_unstable();
    sorted.into_iter().map(|e| e.1).collect()
}

/// Plug-in block entropy `H_n` of the observed `n`-blocks (nats, no bias correction).
pub fn block_entropy(s: &SymbolSeq, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let counts = block_counts(&s.symbols, s.alphabet, n);
    let total = counts.iter().sum();
    entropy_of_counts(counts, total)
}

pub fn plugin_entropy_rate(s: &SymbolSeq, n: usize) -> Result<PluginRate> {
    if n < 1 || n >= s.len() {
        return Err(domain(format!(
            "block length must satisfy 1 ≤ n < {}, got {n}",
            s.len()
        )));
    }
    let counts = block_counts(&s.symbols, s.alphabet, n);
    let distinct = counts.len();
    let total = counts.iter().sum();
    let h_n = entropy_of_counts(counts, total);
    let h_prev = block_entropy(s, n - 1);
    Ok(PluginRate {
        block_length: n,
        block_rate: h_n / n as f64,
        conditional_rate: h_n - h_prev,
        distinct_blocks: distinct,
        undersampled: distinct > s.len() / 10,
    })
}
