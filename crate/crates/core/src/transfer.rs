//! Transfer entropy, the directionality indicator, coupling complexity and
//! the algebraic (transcript-based) transfer entropy.
//!
//! All quantities are plug-in entropies of a [`WeightedJoint`]: a list of
//! integer tuples with weights. Samples enter with unit weight, exact
//! distributions with their probabilities, so both go through one code path.
//! Marginals are aggregated in key order, which makes every result
//! independent of hashing and thread scheduling.

use serde::Serialize;

use crate::error::{domain, validation, Result};
use crate::group::{FiniteGroup, Group};
use crate::symbolic::SymbolSeq;

/// Tolerance for the hypotheses of the dimensional-reduction theorem.
pub const HYPOTHESIS_TOLERANCE: f64 = 1e-12;

/// Rows of integer tuples with non-negative weights (unit weights when absent).
#[derive(Debug, Clone)]
pub struct WeightedJoint {
    columns: Vec<Vec<usize>>,
    bits: Vec<u32>,
    weights: Option<Vec<f64>>,
    total: f64,
}

fn bit_width(max: usize) -> u32 {
    usize::BITS - max.leading_zeros()
}

impl WeightedJoint {
    /// Unit-weight samples given column by column.
    pub fn from_columns(columns: Vec<Vec<usize>>) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(validation("columns have different lengths"));
        }
        if rows == 0 {
            return Err(validation("joint sample is empty"));
        }
        let bits = columns
            .iter()
            .map(|c| bit_width(c.iter().copied().max().unwrap_or(0)))
            .collect();
        Ok(WeightedJoint {
            columns,
            bits,
            weights: None,
            total: rows as f64,
        })
    }

    /// An exact distribution given as `(tuple, probability)` rows.
    pub fn from_rows(rows: &[(Vec<usize>, f64)]) -> Result<Self> {
        let arity = rows
            .first()
            .map(|r| r.0.len())
            .ok_or_else(|| validation("joint table is empty"))?;
        if rows.iter().any(|r| r.0.len() != arity) {
            return Err(validation("joint table rows have different arities"));
        }
        if let Some(r) = rows.iter().find(|r| !(r.1 >= 0.0 && r.1.is_finite())) {
            return Err(validation(format!(
                "weight {} of {:?} is not a non-negative number",
                r.1, r.0
            )));
        }
        let columns: Vec<Vec<usize>> = (0..arity)
            .map(|c| rows.iter().map(|r| r.0[c]).collect())
            .collect();
        let weights: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(validation("joint table has zero total weight"));
        }
        let mut joint = Self::from_columns(columns)?;
        joint.weights = Some(weights);
        joint.total = total;
        Ok(joint)
    }

    pub fn rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    /// Appends a derived column.
    fn push_column(&mut self, col: Vec<usize>) {
        self.bits
            .push(bit_width(col.iter().copied().max().unwrap_or(0)));
        self.columns.push(col);
    }

    /// Marginal weights of the projection on `sel`, in key order.
    fn marginal(&self, sel: &[usize]) -> Vec<f64> {
        let n = self.rows();
        if sel.iter().map(|&c| self.bits[c]).sum::<u32>() <= 128 {
            let keys: Vec<u128> = (0..n)
                .map(|r| {
                    sel.iter().fold(0u128, |k, &c| {
                        (k << self.bits[c]) | self.columns[c][r] as u128
                    })
                })
                .collect();
            self.aggregate(keys)
        } else {
            let keys: Vec<Vec<usize>> = (0..n)
                .map(|r| sel.iter().map(|&c| self.columns[c][r]).collect())
                .collect();
            self.aggregate(keys)
        }
    }

    fn aggregate<K: Ord>(&self, keys: Vec<K>) -> Vec<f64> {
        match &self.weights {
            None => {
                let mut keys = keys;
                keys.sort_unstable();
                keys.chunk_by(|a, b| a == b)
                    .map(|run| run.len() as f64)
                    .collect()
            }
            Some(w) => {
                let mut idx: Vec<usize> = (0..keys.len()).collect();
                // stable: equal keys accumulate in row order
                idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
                idx.chunk_by(|&a, &b| keys[a] == keys[b])
                    .map(|run| run.iter().map(|&r| w[r]).sum())
                    .collect()
            }
        }
    }

    /// Number of distinct tuples in the projection on `sel`.
    pub fn distinct(&self, sel: &[usize]) -> usize {
        self.marginal(sel).iter().filter(|&&w| w > 0.0).count()
    }

    /// Entropy (nats) of the projection on the columns `sel`.
    pub fn entropy(&self, sel: &[usize]) -> f64 {
        if sel.is_empty() {
            return 0.0;
        }
        self.marginal(sel)
            .into_iter()
            .filter(|&w| w > 0.0)
            .map(|w| {
                let p = w / self.total;
                -p * p.ln()
            })
            .sum()
    }

    /// `H(a | b) = H(a, b) − H(b)`.
    pub fn conditional_entropy(&self, a: &[usize], b: &[usize]) -> f64 {
        self.entropy(&[a, b].concat()) - self.entropy(b)
    }

    /// `I(a; c)`.
    pub fn mutual_information(&self, a: &[usize], c: &[usize]) -> f64 {
        self.entropy(a) + self.entropy(c) - self.entropy(&[a, c].concat())
    }

    /// `I(a; c | b) = H(a | b) − H(a | b, c)`.
    pub fn conditional_mutual_information(&self, a: &[usize], c: &[usize], b: &[usize]) -> f64 {
        self.conditional_entropy(a, b) - self.conditional_entropy(a, &[b, c].concat())
    }
}

/// Two symbol sequences of equal length, `x` the target and `y` the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairedSymbolSeq {
    x: SymbolSeq,
    y: SymbolSeq,
}

impl PairedSymbolSeq {
    pub fn new(x: SymbolSeq, y: SymbolSeq) -> Result<Self> {
        if x.len() != y.len() {
            return Err(validation(format!(
                "paired sequences differ in length: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        Ok(PairedSymbolSeq { x, y })
    }

    pub fn x(&self) -> &SymbolSeq {
        &self.x
    }

    pub fn y(&self) -> &SymbolSeq {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn swapped(&self) -> Self {
        PairedSymbolSeq {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

/// Coupling delay `Λ` and history lengths `n` (target) and `k` (source).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TEParams {
    pub lambda: usize,
    pub n: usize,
    pub k: usize,
}

impl Default for TEParams {
    fn default() -> Self {
        TEParams {
            lambda: 1,
            n: 1,
            k: 1,
        }
    }
}

impl TEParams {
    pub fn new(lambda: usize, n: usize, k: usize) -> Result<Self> {
        if lambda == 0 || n == 0 || k == 0 {
            return Err(domain(format!(
                "Λ, n and k must be ≥ 1, got Λ = {lambda}, n = {n}, k = {k}"
            )));
        }
        Ok(TEParams { lambda, n, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeEstimate {
    /// Nats.
    pub value: f64,
    pub samples: usize,
    /// Distinct joint histories `(x_t^{(n)}, y_t^{(k)})`.
    pub distinct_contexts: usize,
    /// More distinct histories than a tenth of the samples.
    pub undersampled: bool,
}

/// Columns: future `x_{t+Λ}`, then `x_t … x_{t-n+1}`, then `y_t … y_{t-k+1}`.
fn te_joint(p: &PairedSymbolSeq, params: &TEParams) -> Result<WeightedJoint> {
    TEParams::new(params.lambda, params.n, params.k)?;
    let len = p.len();
    let hist = params.n.max(params.k);
    if params.lambda + hist >= len {
        return Err(domain(format!(
            "sequences of length {len} are too short for Λ = {} and history {hist}",
            params.lambda
        )));
    }
    let (x, y) = (p.x.symbols(), p.y.symbols());
    let times = hist - 1..len - params.lambda;
    let mut columns = vec![times
        .clone()
        .map(|t| x[t + params.lambda])
        .collect::<Vec<_>>()];
    for i in 0..params.n {
        columns.push(times.clone().map(|t| x[t - i]).collect());
    }
    for j in 0..params.k {
        columns.push(times.clone().map(|t| y[t - j]).collect());
    }
    WeightedJoint::from_columns(columns)
}

fn te_layout(params: &TEParams) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let b: Vec<usize> = (1..=params.n).collect();
    let c: Vec<usize> = (params.n + 1..=params.n + params.k).collect();
    (vec![0], b, c)
}

fn te_estimate(joint: &WeightedJoint, params: &TEParams, value: f64) -> TeEstimate {
    let (_, b, c) = te_layout(params);
    let samples = joint.rows();
    let distinct_contexts = joint.distinct(&[b, c].concat());
    TeEstimate {
        value,
        samples,
        distinct_contexts,
        undersampled: distinct_contexts > samples / 10,
    }
}

/// `T_{Y→X} = H(X_{t+Λ} | X_t^{(n)}) − H(X_{t+Λ} | X_t^{(n)}, Y_t^{(k)})`.
pub fn transfer_entropy(p: &PairedSymbolSeq, params: &TEParams) -> Result<TeEstimate> {
    let joint = te_joint(p, params)?;
    let (a, b, c) = te_layout(params);
    let value = joint.conditional_entropy(&a, &b)
        - joint.conditional_entropy(&a, &[b.as_slice(), &c].concat());
    Ok(te_estimate(&joint, params, value))
}

/// The same quantity written as `I(X_{t+Λ}; Y_t^{(k)} | X_t^{(n)})`.
pub fn transfer_entropy_cmi(p: &PairedSymbolSeq, params: &TEParams) -> Result<TeEstimate> {
    let joint = te_joint(p, params)?;
    let (a, b, c) = te_layout(params);
    let value = joint.conditional_mutual_information(&a, &c, &b);
    Ok(te_estimate(&joint, params, value))
}

/// `ΔT_{Y→X} = T_{Y→X} − T_{X→Y}`; positive when `Y` drives `X`.
pub fn directionality(p: &PairedSymbolSeq, params: &TEParams) -> Result<f64> {
    let forward = transfer_entropy(p, params)?.value;
    let backward = transfer_entropy(&p.swapped(), params)?.value;
    Ok(forward - backward)
}

fn check_elements(group: &Group, seq: &[usize]) -> Result<()> {
    if let Some(&g) = seq.iter().find(|&&g| !group.contains(g)) {
        return Err(validation(format!(
            "element {g} does not belong to {group}"
        )));
    }
    Ok(())
}

/// Appends the transcripts `τ_{α_i, α_{i+1}}` of the given columns and
/// returns their column indices.
fn add_transcripts(joint: &mut WeightedJoint, group: &Group, chain: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for w in chain.windows(2) {
        let col: Vec<usize> = joint.columns[w[0]]
            .iter()
            .zip(&joint.columns[w[1]])
            .map(|(&a, &b)| group.transcript(a, b))
            .collect();
        joint.push_column(col);
        out.push(joint.arity() - 1);
    }
    out
}

/// `min_n I(α_n; τ_{α_1,α_2}, …, τ_{α_{N-1},α_N})` over the given columns.
fn coupling_on(joint: &mut WeightedJoint, group: &Group, vars: &[usize]) -> f64 {
    if vars.len() < 2 {
        return 0.0;
    }
    let taus = add_transcripts(joint, group, vars);
    let value = vars
        .iter()
        .map(|&v| joint.mutual_information(&[v], &taus))
        .fold(f64::INFINITY, f64::min);
    value.max(0.0)
}

/// Coupling complexity `C(α_1, …, α_N)` of group-valued samples, one
/// sequence per variable. A single variable gives 0.
pub fn coupling_complexity(group: &Group, vars: &[Vec<usize>]) -> Result<f64> {
    if vars.is_empty() {
        return Err(validation(
            "coupling complexity needs at least one variable",
        ));
    }
    for v in vars {
        check_elements(group, v)?;
    }
    let mut joint = WeightedJoint::from_columns(vars.to_vec())?;
    let cols: Vec<usize> = (0..vars.len()).collect();
    Ok(coupling_on(&mut joint, group, &cols))
}

/// Coupling complexity of an exact joint distribution of `(α_1, …, α_N)`.
pub fn coupling_complexity_joint(group: &Group, rows: &[(Vec<usize>, f64)]) -> Result<f64> {
    for r in rows {
        check_elements(group, &r.0)?;
    }
    let mut joint = WeightedJoint::from_rows(rows)?;
    let cols: Vec<usize> = (0..joint.arity()).collect();
    Ok(coupling_on(&mut joint, group, &cols))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionHypotheses {
    /// `C(ξ_{t+Λ}, η_t, ξ_t)`.
    pub coupling_complexity: f64,
    pub h_xi: f64,
    pub h_eta: f64,
    /// `max_g |P(ξ_{t+Λ} = g) − P(ξ_t = g)|`; zero for a stationary process.
    pub stationarity_gap: f64,
    /// `C = 0`, `H(ξ_t) ≤ H(η_t)` and a stationary `ξ`, all within
    /// [`HYPOTHESIS_TOLERANCE`].
    pub applicable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraicTransfer {
    /// `I(ξ_{t+Λ}; η_t | ξ_t)`.
    pub lhs: f64,
    /// `I(τ_{ξ_{t+Λ}, ξ_t}; τ_{η_t, ξ_t})`.
    pub rhs: f64,
    pub hypotheses: ReductionHypotheses,
}

/// Columns `0 = ξ_{t+Λ}`, `1 = η_t`, `2 = ξ_t`.
fn algebraic_on(mut joint: WeightedJoint, group: &Group) -> AlgebraicTransfer {
    let lhs = joint.conditional_mutual_information(&[0], &[1], &[2]);
    let coupling = coupling_on(&mut joint.clone(), group, &[0, 1, 2]);
    let t_future = add_transcripts(&mut joint, group, &[0, 2])[0];
    let t_source = add_transcripts(&mut joint, group, &[1, 2])[0];
    let rhs = joint.mutual_information(&[t_future], &[t_source]);

    let h_xi = joint.entropy(&[2]);
    let h_eta = joint.entropy(&[1]);
    let mut gap: f64 = 0.0;
    for g in 0..group.order() {
        let mass = |c: usize| -> f64 {
            let w = joint.columns[c]
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v == g);
            match &joint.weights {
                Some(ws) => w.map(|(r, _)| ws[r]).sum::<f64>() / joint.total,
                None => w.count() as f64 / joint.total,
            }
        };
        gap = gap.max((mass(0) - mass(2)).abs());
    }
    let applicable = coupling < HYPOTHESIS_TOLERANCE
        && h_xi <= h_eta + HYPOTHESIS_TOLERANCE
        && gap < HYPOTHESIS_TOLERANCE;
    AlgebraicTransfer {
        lhs,
        rhs,
        hypotheses: ReductionHypotheses {
            coupling_complexity: coupling,
            h_xi,
            h_eta,
            stationarity_gap: gap,
            applicable,
        },
    }
}

/// Algebraic transfer entropy `T_{η→ξ}(Λ)` with unit histories, alongside
/// its transcript form and the hypotheses under which the two agree.
pub fn algebraic_transfer_entropy(
    group: &Group,
    xi: &[usize],
    eta: &[usize],
    lambda: usize,
) -> Result<AlgebraicTransfer> {
    if xi.len() != eta.len() {
        return Err(validation(format!(
            "paired sequences differ in length: {} vs {}",
            xi.len(),
            eta.len()
        )));
    }
    if lambda == 0 || lambda >= xi.len() {
        return Err(domain(format!(
            "Λ must satisfy 1 ≤ Λ < {}, got {lambda}",
            xi.len()
        )));
    }
    check_elements(group, xi)?;
    check_elements(group, eta)?;
    let m = xi.len() - lambda;
    let joint = WeightedJoint::from_columns(vec![
        xi[lambda..].to_vec(),
        eta[..m].to_vec(),
        xi[..m].to_vec(),
    ])?;
    Ok(algebraic_on(joint, group))
}

/// Algebraic transfer entropy of an exact distribution of `(ξ_{t+Λ}, η_t, ξ_t)`.
pub fn algebraic_transfer_entropy_joint(
    group: &Group,
    rows: &[(Vec<usize>, f64)],
) -> Result<AlgebraicTransfer> {
    if rows.iter().any(|r| r.0.len() != 3) {
        return Err(validation("rows must be (ξ_{t+Λ}, η_t, ξ_t) triples"));
    }
    for r in rows {
        check_elements(group, &r.0)?;
    }
    Ok(algebraic_on(WeightedJoint::from_rows(rows)?, group))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn seq(s: &[usize]) -> SymbolSeq {
        SymbolSeq::new(s.to_vec(), 2).unwrap()
    }

    #[test]
    fn identical_sequences() {
        let s = seq(&[0, 1, 1, 0, 1, 0, 0, 0, 1, 1, 0, 1, 1, 1, 0, 0]);
        let p = PairedSymbolSeq::new(s.clone(), s).unwrap();
        let te = transfer_entropy(&p, &TEParams::default()).unwrap();
        assert!(te.value.abs() < 1e-12);
        assert_eq!(directionality(&p, &TEParams::default()).unwrap(), 0.0);
    }

    #[test]
    fn exact_copy_table() {
        // x_{t+1} = y_t, x_t and y_t independent fair bits
        let rows: Vec<(Vec<usize>, f64)> =
            (0..4).map(|i| (vec![i & 1, i >> 1, i & 1], 0.25)).collect();
        let joint = WeightedJoint::from_rows(&rows).unwrap();
        let te = joint.conditional_entropy(&[0], &[1]) - joint.conditional_entropy(&[0], &[1, 2]);
        assert!((te - LN_2).abs() < 1e-12);
        assert_eq!(te, joint.conditional_mutual_information(&[0], &[2], &[1]));
    }

    #[test]
    fn layout_and_length_checks() {
        let p = PairedSymbolSeq::new(seq(&[0, 1, 0]), seq(&[1, 1, 0])).unwrap();
        assert!(transfer_entropy(&p, &TEParams::new(2, 1, 1).unwrap()).is_err());
        assert!(transfer_entropy(
            &p,
            &TEParams {
                lambda: 1,
                n: 2,
                k: 1
            }
        )
        .is_err());
        assert!(TEParams::new(0, 1, 1).is_err());
        assert!(PairedSymbolSeq::new(seq(&[0]), seq(&[0, 1])).is_err());
    }

    #[test]
    fn coupling_examples() {
        let z2 = Group::Cyclic(2);
        let independent: Vec<(Vec<usize>, f64)> =
            (0..4).map(|i| (vec![i & 1, i >> 1], 0.25)).collect();
        assert!(coupling_complexity_joint(&z2, &independent).unwrap().abs() < 1e-15);
        assert_eq!(coupling_complexity(&z2, &[vec![0, 1, 1]]).unwrap(), 0.0);
        assert!(coupling_complexity(&z2, &[vec![0, 2]]).is_err());
    }

    #[test]
    fn joint_rejects_bad_rows() {
        assert!(WeightedJoint::from_rows(&[]).is_err());
        assert!(WeightedJoint::from_rows(&[(vec![0], -0.5)]).is_err());
        assert!(WeightedJoint::from_rows(&[(vec![0], 0.5), (vec![0, 1], 0.5)]).is_err());
    }
}
