//! Maximum-entropy inference.
//!
//! The discrete problem `max H(p)` subject to `Σ_n p_n φ_k(x_n) = m_k` has the
//! solution `p_n ∝ exp(Σ_k λ_k φ_k(x_n))`, where `λ` minimizes the convex dual
//! `D(λ) = ln Z(λ) − λ·m`. The gradient of `D` is the model moments minus the
//! targets and its Hessian is the model covariance of the features.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{domain, validation, Error, Result};
use crate::prob::{shannon_entropy, LogBase, ProbVec};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;
/// Multipliers beyond this magnitude are taken as divergence (infeasible targets).
pub const DIVERGENCE_BOUND: f64 = 1e8;

const ARMIJO: f64 = 1e-4;

/// Support points, feature tables `φ_k(x_n)` and moment targets `m_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSpec {
    support: Vec<f64>,
    features: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl MomentSpec {
    pub fn new(support: Vec<f64>, features: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        let n = support.len();
        if n == 0 {
            return Err(validation("support is empty"));
        }
        if features.len() != targets.len() {
            return Err(validation(format!(
                "{} features but {} targets",
                features.len(),
                targets.len()
            )));
        }
        for (k, f) in features.iter().enumerate() {
            if f.len() != n {
                return Err(validation(format!(
                    "feature {k} has {} values, support has {n}",
                    f.len()
                )));
            }
        }
        let all = support
            .iter()
            .chain(features.iter().flatten())
            .chain(&targets);
        if let Some(v) = all.into_iter().find(|v| !v.is_finite()) {
            return Err(validation(format!(
                "non-finite value {v} in moment specification"
            )));
        }
        Ok(MomentSpec {
            support,
            features,
            targets,
        })
    }

    /// A single mean constraint `Σ p_n x_n = mean` on the support itself.
    pub fn mean(support: Vec<f64>, mean: f64) -> Result<Self> {
        let f = support.clone();
        Self::new(support, vec![f], vec![mean])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    fn exponent(&self, lambda: &[f64], n: usize) -> f64 {
        self.features
            .iter()
            .zip(lambda)
            .map(|(f, l)| l * f[n])
            .sum()
    }

    /// `p_n ∝ exp(Σ λ_k φ_k(x_n))` and `ln Z`, with the maximum exponent
    /// subtracted before exponentiation.
    fn model(&self, lambda: &[f64]) -> (Vec<f64>, f64) {
        let s: Vec<f64> = (0..self.support.len())
            .map(|n| self.exponent(lambda, n))
            .collect();
        let shift = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = s.iter().map(|v| (v - shift).exp()).collect();
        let z: f64 = w.iter().sum();
        (w.into_iter().map(|x| x / z).collect(), shift + z.ln())
    }
}

/// `D(λ) = ln Z(λ) − λ·m`.
pub fn dual_objective(spec: &MomentSpec, lambda: &[f64]) -> f64 {
    let (_, log_z) = spec.model(lambda);
    log_z
        - lambda
            .iter()
            .zip(&spec.targets)
            .map(|(l, m)| l * m)
            .sum::<f64>()
}

/// `∇D(λ) = E_λ[φ] − m`.
pub fn dual_gradient(spec: &MomentSpec, lambda: &[f64]) -> Vec<f64> {
    let (p, _) = spec.model(lambda);
    spec.features
        .iter()
        .zip(&spec.targets)
        .map(|(f, m)| f.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>() - m)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxentSolution {
    pub distribution: ProbVec,
    pub multipliers: Vec<f64>,
    pub log_partition: f64,
    pub entropy: f64,
    pub iterations: usize,
    /// Largest absolute moment residual.
    pub residual: f64,
    /// Dual objective after each accepted step, starting at `λ = 0`.
    pub objective_history: Vec<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, g| m.max(g.abs()))
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Rejects targets outside the open convex hull of the feature vectors, for
/// one or two features. Targets on the boundary are rejected too: the
/// multipliers diverge there.
fn check_feasible(spec: &MomentSpec) -> Result<()> {
    match spec.features.len() {
        1 => {
            let f = &spec.features[0];
            let (lo, hi) = f
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                    (l.min(v), h.max(v))
                });
            let m = spec.targets[0];
            let inside = if lo == hi { m == lo } else { lo < m && m < hi };
            if !inside {
                return Err(Error::Infeasible(format!(
                    "target {m} is not inside the feature range ({lo}, {hi})"
                )));
            }
        }
        2 => {
            let mut pts: Vec<(f64, f64)> = spec.features[0]
                .iter()
                .zip(&spec.features[1])
                .map(|(&a, &b)| (a, b))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            pts.dedup();
            let hull = convex_hull(&pts);
            let m = (spec.targets[0], spec.targets[1]);
            let inside = if hull.len() >= 3 {
                (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], m) > 0.0)
            } else if hull.len() == 2 {
                // collinear features: target must lie strictly between the ends
                let (a, b) = (hull[0], hull[1]);
                cross(a, b, m) == 0.0 && (m.0 - a.0) * (m.0 - b.0) + (m.1 - a.1) * (m.1 - b.1) < 0.0
            } else {
                m == hull[0]
            };
            if !inside {
                return Err(Error::Infeasible(format!(
                    "target ({}, {}) is not inside the convex hull of the feature vectors",
                    m.0, m.1
                )));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Counter-clockwise hull of sorted, deduplicated points (monotone chain).
fn convex_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Solves the discrete maxent problem by damped Newton iteration on the dual,
/// with Armijo backtracking and a gradient step wherever the feature
/// covariance is not positive definite.
pub fn solve_discrete_maxent(
    spec: &MomentSpec,
    tol: f64,
    max_iter: usize,
) -> Result<MaxentSolution> {
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    check_feasible(spec)?;
    let k = spec.features.len();
    let n = spec.support.len();
    let mut lambda = vec![0.0; k];
    let mut objective = dual_objective(spec, &lambda);
    let mut history = vec![objective];
    let mut iterations = 0;
    loop {
        let (p, _) = spec.model(&lambda);
        let grad = dual_gradient(spec, &lambda);
        let residual = max_abs(&grad);
        if residual <= tol {
            break;
        }
        if iterations == max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        iterations += 1;

        let means: Vec<f64> = spec
            .features
            .iter()
            .map(|f| f.iter().zip(&p).map(|(a, b)| a * b).sum())
            .collect();
        let hessian = DMatrix::from_fn(k, k, |a, b| {
            (0..n)
                .map(|i| p[i] * (spec.features[a][i] - means[a]) * (spec.features[b][i] - means[b]))
                .sum()
        });
        let g = DVector::from_vec(grad.clone());
        let direction = match hessian.cholesky() {
            Some(ch) => -ch.solve(&g),
            None => -g.clone(),
        };
        let slope = g.dot(&direction);
        let mut step = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = lambda
                .iter()
                .zip(direction.iter())
                .map(|(l, d)| l + step * d)
                .collect();
            let value = dual_objective(spec, &trial);
            if value <= objective + ARMIJO * step * slope {
                break Some((trial, value));
            }
            // close to the optimum the decrease drops below the rounding of D;
            // progress is then judged by the moment residual
            if (value - objective).abs() <= 1e-14 * (1.0 + objective.abs())
                && max_abs(&dual_gradient(spec, &trial)) < residual
            {
                break Some((trial, value));
            }
            step *= 0.5;
            if step < 1e-20 {
                break None;
            }
        };
        match accepted {
            Some((trial, value)) => {
                lambda = trial;
                objective = value;
                history.push(value);
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations,
                    residual,
                })
            }
        }
        if lambda.iter().any(|l| l.abs() > DIVERGENCE_BOUND) {
            return Err(Error::Infeasible(format!(
                "multipliers diverged past {DIVERGENCE_BOUND:e}; the targets are outside the feasible moment set"
            )));
        }
    }
    let (p, log_partition) = spec.model(&lambda);
    let residual = max_abs(&dual_gradient(spec, &lambda));
    let distribution = ProbVec::from_weights(&p)?;
    let entropy = shannon_entropy(&distribution, LogBase::NATURAL);
    Ok(MaxentSolution {
        distribution,
        multipliers: lambda,
        log_partition,
        entropy,
        iterations,
        residual,
        objective_history: history,
    })
}

/// `p_i ∝ exp(−β ε_i)`.
pub fn gibbs_distribution(energies: &[f64], beta: f64) -> Result<ProbVec> {
    if energies.is_empty() {
        return Err(validation("no energies given"));
    }
    if !beta.is_finite() || energies.iter().any(|e| !e.is_finite()) {
        return Err(validation("β and the energies must be finite"));
    }
    let s: Vec<f64> = energies.iter().map(|e| -beta * e).collect();
    let shift = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = s.iter().map(|v| (v - shift).exp()).collect();
    ProbVec::from_weights(&w)
}

/// `p_i ∝ (1 − (q−1) β ε_i)^{1/(q−1)}`, with non-positive bases cut off to
/// probability 0. `q = 1` is the Gibbs distribution.
pub fn tsallis_maxent_distribution(energies: &[f64], beta: f64, q: f64) -> Result<ProbVec> {
    if !q.is_finite() {
        return Err(domain(format!("q must be finite, got {q}")));
    }
    if q == 1.0 {
        return gibbs_distribution(energies, beta);
    }
    if energies.is_empty() {
        return Err(validation("no energies given"));
    }
    let h = q - 1.0;
    // ln of the weight; ln_1p keeps the q → 1 limit accurate
    let logs: Vec<Option<f64>> = energies
        .iter()
        .map(|e| {
            let x = -h * beta * e;
            (x > -1.0).then(|| x.ln_1p() / h)
        })
        .collect();
    let shift = logs
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Err(domain("every Tsallis base 1 − (q−1)βε is non-positive"));
    }
    let w: Vec<f64> = logs
        .iter()
        .map(|l| l.map_or(0.0, |v| (v - shift).exp()))
        .collect();
    ProbVec::from_weights(&w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ContinuousFamily {
    /// Support `[a, b]`.
    Uniform { a: f64, b: f64 },
    /// Support `[0, ∞)`, mean `m`.
    Exponential { m: f64 },
    /// First and second moments `m1`, `m2`.
    Gaussian { m1: f64, m2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub family: ContinuousFamily,
    pub density: BTreeMap<&'static str, f64>,
    /// Differential entropy in nats.
    pub entropy: f64,
}

/// Maxent densities under the three classical constraint sets.
pub fn continuous_maxent_closed_forms(family: ContinuousFamily) -> Result<ClosedForm> {
    let (density, entropy) = match family {
        ContinuousFamily::Uniform { a, b } => {
            if !(b > a) || !a.is_finite() || !b.is_finite() {
                return Err(domain(format!(
                    "uniform needs finite a < b, got a = {a}, b = {b}"
                )));
            }
            (
                BTreeMap::from([("a", a), ("b", b), ("height", 1.0 / (b - a))]),
                (b - a).ln(),
            )
        }
        ContinuousFamily::Exponential { m } => {
            if !(m > 0.0) || !m.is_finite() {
                return Err(domain(format!(
                    "exponential needs a positive finite mean, got {m}"
                )));
            }
            (
                BTreeMap::from([("mean", m), ("rate", 1.0 / m)]),
                m.ln() + 1.0,
            )
        }
        ContinuousFamily::Gaussian { m1, m2 } => {
            let var = m2 - m1 * m1;
            if !(var > 0.0) || !var.is_finite() {
                return Err(domain(format!(
                    "gaussian needs m2 > m1², got m1 = {m1}, m2 = {m2}"
                )));
            }
            (
                BTreeMap::from([("mean", m1), ("variance", var)]),
                0.5 * (2.0 * PI * E * var).ln(),
            )
        }
    };
    Ok(ClosedForm {
        family,
        density,
        entropy,
    })
}

/// `½ ln((2πe)^n det R)` for a symmetric positive definite `R`.
pub fn gaussian_multivariate_entropy(r: &[Vec<f64>]) -> Result<f64> {
    let n = r.len();
    if n == 0 || r.iter().any(|row| row.len() != n) {
        return Err(validation("matrix must be square and non-empty"));
    }
    let scale = r.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for (i, row) in r.iter().enumerate() {
        for (j, &v) in row.iter().enumerate().take(i) {
            if (v - r[j][i]).abs() > 1e-12 * scale.max(1.0) {
                return Err(validation(format!("matrix is not symmetric at ({i},{j})")));
            }
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| r[i][j]);
    let ch = m
        .cholesky()
        .ok_or_else(|| domain("matrix is not positive definite"))?;
    let log_det: f64 = 2.0 * ch.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    Ok(0.5 * (n as f64 * (2.0 * PI * E).ln() + log_det))
}
