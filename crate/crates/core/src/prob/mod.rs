//! Distribution-level entropies.
//!
//! All functionals follow the convention `0 · ln 0 = 0`: zero-probability
//! entries are admitted and contribute nothing.

mod axioms;
mod huffman;

pub use axioms::{khinchin_axiom_suite, Axiom, AxiomCheck, AxiomReport, Functional};
pub use huffman::{huffman_average_length, HuffmanCode};

use crate::error::{domain, validation, Result};
use serde::Serialize;

/// Tolerance on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Entries in `[-NEGATIVE_CLAMP, 0)` are treated as floating-point noise and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-14;

/// Logarithm base for entropy units. Nats are the default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogBase(f64);

impl LogBase {
    pub const NATURAL: LogBase = LogBase(std::f64::consts::E);
    pub const BITS: LogBase = LogBase(2.0);

    pub fn new(base: f64) -> Result<Self> {
        if !(base.is_finite() && base > 1.0) {
            return Err(domain(format!(
                "log base must be a finite real > 1, got {base}"
            )));
        }
        Ok(LogBase(base))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Converts a quantity in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        if self.0 == std::f64::consts::E {
            nats
        } else {
            nats / self.0.ln()
        }
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::NATURAL
    }
}

/// A finite probability distribution `(p_1, ..., p_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbVec {
    probs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl ProbVec {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let probs = validate_probs(probs)?;
        Ok(ProbVec {
            probs,
            labels: None,
        })
    }

    pub fn with_labels(probs: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(validation(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        let mut p = Self::new(probs)?;
        p.labels = Some(labels);
        Ok(p)
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(validation("empty weight vector"));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(validation(format!(
                "weight {i} is {w}; weights must be finite and non-negative"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(validation("weights sum to zero"));
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        Ok(ProbVec {
            probs,
            labels: None,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(validation("uniform distribution over an empty alphabet"));
        }
        Ok(ProbVec {
            probs: vec![1.0 / n as f64; n],
            labels: None,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// Product distribution `p ⊗ q`, ordered `(p_1 q_1, ..., p_1 q_n, p_2 q_1, ...)`.
    pub fn product(&self, other: &ProbVec) -> ProbVec {
        let probs = self
            .probs
            .iter()
            .flat_map(|&a| other.probs.iter().map(move |&b| a * b))
            .collect();
        ProbVec {
            probs,
            labels: None,
        }
    }
}

fn validate_probs(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(validation("probability vector is empty"));
    }
    for (i, p) in probs.iter_mut().enumerate() {
        if !p.is_finite() {
            return Err(validation(format!("entry {i} is not finite: {p}")));
        }
        if *p < -NEGATIVE_CLAMP {
            return Err(validation(format!("entry {i} is negative: {p}")));
        }
        if *p < 0.0 {
            *p = 0.0;
        }
        if *p > 1.0 + MASS_TOLERANCE {
            return Err(validation(format!("entry {i} exceeds 1: {p}")));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(validation(format!("probabilities sum to {total}, not 1")));
    }
    Ok(probs)
}

/// `-Σ x ln x` over the given terms, skipping zeros.
pub(crate) fn neg_x_ln_x_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    terms
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// Plug-in Shannon entropy (nats) of a table of counts, summed in the given order.
pub fn entropy_of_counts<I>(counts: I, total: u64) -> f64
where
    I: IntoIterator<Item = u64>,
{
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Shannon entropy `-Σ p_i log p_i` in the requested base.
pub fn shannon_entropy(p: &ProbVec, base: LogBase) -> f64 {
    base.from_nats(neg_x_ln_x_sum(p.probs.iter().copied()))
}

/// Rényi entropy of order `q` in nats. `q = f64::INFINITY` gives the min-entropy,
/// `q = 0` the Hartley entropy and `q = 1` the Shannon entropy.
pub fn renyi_entropy(p: &ProbVec, q: f64) -> Result<f64> {
    if q.is_nan() || q < 0.0 {
        return Err(domain(format!("Rényi order must be ≥ 0, got {q}")));
    }
    let value = if q == 0.0 {
        (p.support_size() as f64).ln()
    } else if q == 1.0 {
        neg_x_ln_x_sum(p.probs.iter().copied())
    } else if q.is_infinite() {
        let max = p.probs.iter().copied().fold(0.0, f64::max);
        -max.ln()
    } else {
        let s: f64 = p
            .probs
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|x| x.powf(q))
            .sum();
        s.ln() / (1.0 - q)
    };
    // -0.0 from degenerate distributions
    Ok(value + 0.0)
}

/// Tsallis entropy `(Σ p_i^q - 1)/(1 - q)` with `k_B = 1`; Shannon at `q = 1`.
pub fn tsallis_entropy(p: &ProbVec, q: f64) -> Result<f64> {
    if !(q > 0.0) || q.is_infinite() {
        return Err(domain(format!(
            "Tsallis index must be a finite real > 0, got {q}"
        )));
    }
    if q == 1.0 {
        return Ok(neg_x_ln_x_sum(p.probs.iter().copied()));
    }
    let s: f64 = p
        .probs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x.powf(q))
        .sum();
    Ok((s - 1.0) / (1.0 - q) + 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Conversion {
    TsallisToRenyi,
    RenyiToTsallis,
}

/// Monotone map between Rényi (`f_q`) and Tsallis (`g_q`) values of the same order.
pub fn renyi_tsallis_convert(value: f64, q: f64, direction: Conversion) -> Result<f64> {
    if !q.is_finite() || q < 0.0 || q == 1.0 {
        return Err(domain(format!(
            "conversion needs a finite order q ≥ 0, q ≠ 1; got {q}"
        )));
    }
    let c = 1.0 - q;
    match direction {
        Conversion::TsallisToRenyi => {
            let arg = 1.0 + c * value;
            if arg <= 0.0 {
                return Err(domain(format!("1 + (1-q)·g = {arg} is not positive")));
            }
            Ok(arg.ln() / c)
        }
        Conversion::RenyiToTsallis => Ok((c * value).exp_m1() / c),
    }
}

/// Joint distribution `p(x, y)` stored row-major (`x` indexes rows).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointTable {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
}

impl JointTable {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        let rows = table.len();
        if rows == 0 || table[0].is_empty() {
            return Err(validation("joint table is empty"));
        }
        let cols = table[0].len();
        if let Some(r) = table.iter().position(|r| r.len() != cols) {
            return Err(validation(format!(
                "row {r} has {} columns, expected {cols}",
                table[r].len()
            )));
        }
        let flat = validate_probs(table.into_iter().flatten().collect())?;
        Ok(JointTable {
            rows,
            cols,
            table: flat,
        })
    }

    /// Independent coupling `p(x) q(y)`.
    pub fn product(px: &ProbVec, py: &ProbVec) -> Self {
        JointTable {
            rows: px.len(),
            cols: py.len(),
            table: px.product(py).probs,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.cols + y]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.table
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.table
            .chunks(self.cols)
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn transpose(&self) -> JointTable {
        let mut t = vec![0.0; self.table.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[j * self.rows + i] = self.get(i, j);
            }
        }
        JointTable {
            rows: self.cols,
            cols: self.rows,
            table: t,
        }
    }
}

/// Joint, conditional and mutual information of a two-variable table (nats).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointSummary {
    pub h_x: f64,
    pub h_y: f64,
    pub h_xy: f64,
    pub h_x_given_y: f64,
    pub h_y_given_x: f64,
    pub mutual_information: f64,
}

pub fn joint_conditional_mutual(t: &JointTable) -> JointSummary {
    let h_xy = neg_x_ln_x_sum(t.table.iter().copied());
    let h_x = neg_x_ln_x_sum(t.marginal_x());
    let h_y = neg_x_ln_x_sum(t.marginal_y());
    // I(X;Y) written symmetrically so that swapping the axes gives the same float
    let mutual_information = ((h_x + h_y) - h_xy).max(0.0);
    JointSummary {
        h_x,
        h_y,
        h_xy,
        h_x_given_y: h_xy - h_y,
        h_y_given_x: h_xy - h_x,
        mutual_information,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn pv(v: &[f64]) -> ProbVec {
        ProbVec::new(v.to_vec()).unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon_entropy(&pv(&[0.5, 0.5]), LogBase::NATURAL) - LN_2).abs() < 1e-15);
        let third = 1.0 / 3.0;
        assert!(
            (shannon_entropy(&pv(&[third, third, third]), LogBase::NATURAL) - 3f64.ln()).abs()
                < 1e-15
        );
        assert_eq!(
            shannon_entropy(&pv(&[1.0, 0.0, 0.0]), LogBase::NATURAL),
            0.0
        );
        assert!((shannon_entropy(&pv(&[0.5, 0.25, 0.25]), LogBase::BITS) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn probvec_validation() {
        assert!(ProbVec::new(vec![0.6, 0.6]).is_err());
        assert!(ProbVec::new(vec![1.1, -0.1]).is_err());
        assert!(ProbVec::new(vec![]).is_err());
        assert!(ProbVec::new(vec![f64::NAN, 1.0]).is_err());
        let p = ProbVec::new(vec![1.0, -1e-15]).unwrap();
        assert_eq!(p.probs()[1], 0.0);
        assert!(LogBase::new(1.0).is_err());
        assert!(ProbVec::with_labels(vec![1.0], vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn renyi_branches() {
        let p = pv(&[0.7, 0.3]);
        assert!(
            (renyi_entropy(&p, f64::INFINITY).unwrap() - 0.356_674_943_938_732_4).abs() < 1e-12
        );
        let h = shannon_entropy(&p, LogBase::NATURAL);
        for q in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!((renyi_entropy(&p, q).unwrap() - h).abs() < 1e-5);
        }
        assert_eq!(renyi_entropy(&pv(&[0.5, 0.5, 0.0]), 0.0).unwrap(), LN_2);
        assert!(renyi_entropy(&p, -0.5).is_err());
        let u = ProbVec::uniform(5).unwrap();
        for q in [0.0, 0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
            assert!((renyi_entropy(&u, q).unwrap() - 5f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn tsallis_examples() {
        assert!((tsallis_entropy(&pv(&[0.5, 0.5]), 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(tsallis_entropy(&pv(&[1.0, 0.0]), 3.0).unwrap(), 0.0);
        assert!(tsallis_entropy(&pv(&[1.0]), 0.0).is_err());
        let p = pv(&[0.2, 0.5, 0.3]);
        let h = shannon_entropy(&p, LogBase::NATURAL);
        for q in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!((tsallis_entropy(&p, q).unwrap() - h).abs() < 1e-5);
        }
    }

    #[test]
    fn conversion_examples() {
        assert_eq!(
            renyi_tsallis_convert(0.0, 3.0, Conversion::TsallisToRenyi).unwrap(),
            0.0
        );
        let f = renyi_tsallis_convert(0.5, 2.0, Conversion::TsallisToRenyi).unwrap();
        let direct = renyi_entropy(&pv(&[0.5, 0.5]), 2.0).unwrap();
        assert!((f - direct).abs() < 1e-15);
        // 1 + (1 - 3)·1 = -1
        assert!(renyi_tsallis_convert(1.0, 3.0, Conversion::TsallisToRenyi).is_err());
        assert!(renyi_tsallis_convert(1.0, 1.0, Conversion::TsallisToRenyi).is_err());
    }

    #[test]
    fn joint_examples() {
        let px = pv(&[0.2, 0.8]);
        let py = pv(&[0.1, 0.6, 0.3]);
        let s = joint_conditional_mutual(&JointTable::product(&px, &py));
        assert!(s.mutual_information.abs() < 1e-15);

        let k = 4;
        let diag: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 0.25 } else { 0.0 }).collect())
            .collect();
        let s = joint_conditional_mutual(&JointTable::new(diag).unwrap());
        assert!((s.mutual_information - 4f64.ln()).abs() < 1e-15);
        assert_eq!(s.h_x_given_y, 0.0);

        assert!(JointTable::new(vec![vec![0.5], vec![0.25, 0.25]]).is_err());
        assert!(JointTable::new(vec![vec![0.5, 0.6]]).is_err());
    }
}
