//! Topological Markov chains (one-step subshifts of finite type).

use serde::Serialize;

use super::{closed_class, strongly_connected_components, MarkovModel};
use crate::error::{validation, Error, Result};
use crate::prob::ProbVec;

/// Relative change between successive Perron-root estimates that ends the power iteration.
pub const POWER_TOLERANCE: f64 = 1e-13;
pub const POWER_MAX_ITERATIONS: usize = 100_000;

/// A 0/1 transition matrix: `a_ij = 1` iff symbol `j` may follow symbol `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix01 {
    entries: Vec<Vec<u8>>,
    irreducible: bool,
}

impl TransitionMatrix01 {
    pub fn new(entries: Vec<Vec<u8>>) -> Result<Self> {
        let k = entries.len();
        if k == 0 {
            return Err(validation("transition matrix is empty"));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != k {
                return Err(validation(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|&a| a > 1) {
                return Err(validation(format!(
                    "entry ({i},{j}) = {} is not 0 or 1",
                    row[j]
                )));
            }
        }
        let comps = strongly_connected_components(&adjacency(&entries));
        let irreducible = comps.len() == 1 && entries.iter().any(|r| r.contains(&1));
        Ok(TransitionMatrix01 {
            entries,
            irreducible,
        })
    }

    /// Accepts any real matrix whose entries are exactly 0 or 1.
    pub fn from_reals(rows: &[Vec<f64>]) -> Result<Self> {
        let entries = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| match x {
                        0.0 => Ok(0u8),
                        1.0 => Ok(1u8),
                        _ => Err(validation(format!("entry {x} is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn full_shift(k: usize) -> Result<Self> {
        Self::new(vec![vec![1; k]; k])
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i][j] == 1
    }

    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    /// Every symbol has a successor and a predecessor.
    pub fn is_essential(&self) -> bool {
        let k = self.size();
        (0..k).all(|i| self.entries[i].contains(&1))
            && (0..k).all(|j| (0..k).any(|i| self.get(i, j)))
    }
}

fn adjacency(entries: &[Vec<u8>]) -> Vec<Vec<bool>> {
    entries
        .iter()
        .map(|r| r.iter().map(|&a| a == 1).collect())
        .collect()
}

/// Perron root and eigenvector of an irreducible non-negative matrix `m`
/// (right eigenvector; pass the transpose for the left one).
///
/// Iterates with `m + I`, whose dominant eigenvalue is strictly dominant even
/// when `m` is periodic, and subtracts the shift at the end. The vector is
/// normalized to unit sum.
fn perron(m: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let k = m.len();
    let mut v = vec![1.0 / k as f64; k];
    let mut lambda = 0.0;
    for it in 0..POWER_MAX_ITERATIONS {
        let w: Vec<f64> = (0..k)
            .map(|i| v[i] + m[i].iter().zip(&v).map(|(a, x)| a * x).sum::<f64>())
            .collect();
        let est: f64 = w.iter().sum();
        let w: Vec<f64> = w.into_iter().map(|x| x / est).collect();
        let dv = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let converged =
            it > 0 && (est - lambda).abs() <= POWER_TOLERANCE * est && dv <= POWER_TOLERANCE;
        lambda = est;
        v = w;
        if converged {
            return Ok((lambda - 1.0, v));
        }
    }
    Err(Error::NonConvergence {
        iterations: POWER_MAX_ITERATIONS,
        residual: lambda,
    })
}

/// Spectral radius `ρ_A`, taken as the largest Perron root over the irreducible
/// components of `A`. Components without a cycle contribute 0.
pub fn spectral_radius(a: &TransitionMatrix01) -> Result<f64> {
    let adj = adjacency(&a.entries);
    let mut rho: f64 = 0.0;
    for comp in strongly_connected_components(&adj) {
        let has_cycle = comp.len() > 1 || adj[comp[0]][comp[0]];
        if !has_cycle {
            continue;
        }
        let sub: Vec<Vec<f64>> = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| a.entries[i][j] as f64).collect())
            .collect();
        rho = rho.max(perron(&sub)?.0);
    }
    Ok(rho)
}

/// Topological entropy `ln ρ_A` of the subshift, which is also the capacity
/// of the constrained channel with allowed transitions `A`.
pub fn topological_markov_entropy(a: &TransitionMatrix01) -> Result<f64> {
    let rho = spectral_radius(a)?;
    if rho == 0.0 {
        return Err(Error::NoAdmissibleSequence);
    }
    Ok(rho.ln().max(0.0))
}

/// The measure of maximal entropy on an irreducible subshift:
/// `p_ij = a_ij v_j / (ρ v_i)`, `p_i = u_i v_i / (u·v)` with `u`, `v` the left
/// and right Perron vectors.
pub fn parry_measure(a: &TransitionMatrix01) -> Result<MarkovModel> {
    if !a.is_irreducible() {
        let adj = adjacency(&a.entries);
        let comps = strongly_connected_components(&adj);
        return Err(Error::Reducible {
            class: closed_class(&adj, &comps),
        });
    }
    let k = a.size();
    let m: Vec<Vec<f64>> = a
        .entries
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    let mt: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| m[j][i]).collect()).collect();
    let (rho, v) = perron(&m)?;
    let (_, u) = perron(&mt)?;

    let transition: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let row: Vec<f64> = (0..k).map(|j| m[i][j] * v[j] / (rho * v[i])).collect();
            // absorb the residual of the eigen-solve so rows are exactly stochastic
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let weights: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a * b).collect();
    MarkovModel::new(ProbVec::from_weights(&weights)?, transition)
}
