use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::{neg_x_ln_x_sum, ProbVec};
use crate::error::{domain, Result};

/// Codeword lengths of a D-ary Huffman code and the coding-theorem quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuffmanCode {
    pub arity: usize,
    /// Codeword length per symbol, in input order.
    pub lengths: Vec<usize>,
    /// `Σ p_i L_i`
    pub avg_len: f64,
    /// Entropy in base `arity`.
    pub entropy: f64,
}

#[derive(Debug)]
struct Node {
    weight: f64,
    /// Smallest original symbol index in the subtree; dummies sort after every real symbol.
    min_index: usize,
    symbols: Vec<usize>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // reversed: BinaryHeap pops the lightest node, then the smallest index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then_with(|| other.min_index.cmp(&self.min_index))
    }
}

/// Builds a D-ary Huffman code for `p` and returns its average length together
/// with `H_D(p)`; the result always satisfies `H_D ≤ avg_len < H_D + 1`.
pub fn huffman_average_length(p: &ProbVec, arity: usize) -> Result<HuffmanCode> {
    if arity < 2 {
        return Err(domain(format!(
            "code alphabet size must be ≥ 2, got {arity}"
        )));
    }
    let n = p.len();
    let entropy = neg_x_ln_x_sum(p.probs().iter().copied()) / (arity as f64).ln();
    let mut lengths = vec![0usize; n];
    if n == 1 {
        // a single outcome needs no code symbols at all
        return Ok(HuffmanCode {
            arity,
            lengths,
            avg_len: 0.0,
            entropy,
        });
    }

    let mut heap: BinaryHeap<Node> = p
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &w)| Node {
            weight: w,
            min_index: i,
            symbols: vec![i],
        })
        .collect();
    // pad so that every merge takes exactly `arity` nodes
    let mut padded = n;
    while !(padded - 1).is_multiple_of(arity - 1) {
        heap.push(Node {
            weight: 0.0,
            min_index: padded,
            symbols: Vec::new(),
        });
        padded += 1;
    }

    while heap.len() > 1 {
        let mut merged = Node {
            weight: 0.0,
            min_index: usize::MAX,
            symbols: Vec::new(),
        };
        for _ in 0..arity {
            let node = heap.pop().expect("padding guarantees a full group");
            merged.weight += node.weight;
            merged.min_index = merged.min_index.min(node.min_index);
            merged.symbols.extend(node.symbols);
        }
        for &s in &merged.symbols {
            lengths[s] += 1;
        }
        heap.push(merged);
    }

    let avg_len = p
        .probs()
        .iter()
        .zip(&lengths)
        .map(|(&q, &l)| q * l as f64)
        .sum();
    Ok(HuffmanCode {
        arity,
        lengths,
        avg_len,
        entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_code_is_exact() {
        let p = ProbVec::new(vec![0.5, 0.25, 0.25]).unwrap();
        let code = huffman_average_length(&p, 2).unwrap();
        assert_eq!(code.lengths, vec![1, 2, 2]);
        assert!((code.avg_len - 1.5).abs() < 1e-15);
        assert!((code.entropy - 1.5).abs() < 1e-15);
    }

    #[test]
    fn balanced_tree_for_uniform() {
        for k in 1..6 {
            let p = ProbVec::uniform(1 << k).unwrap();
            let code = huffman_average_length(&p, 2).unwrap();
            assert!((code.avg_len - k as f64).abs() < 1e-12);
        }
    }

    /// Minimum average length over all binary prefix codes with lengths ≤ 3,
    /// enumerated through the Kraft inequality.
    fn brute_force_optimum(p: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for l0 in 1..=3u32 {
            for l1 in 1..=3u32 {
                for l2 in 1..=3u32 {
                    let kraft: f64 = [l0, l1, l2].iter().map(|&l| 0.5f64.powi(l as i32)).sum();
                    if kraft <= 1.0 {
                        let avg = p[0] * l0 as f64 + p[1] * l1 as f64 + p[2] * l2 as f64;
                        best = best.min(avg);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn matches_prefix_code_brute_force() {
        let raw = [0.4, 0.3, 0.3];
        let p = ProbVec::new(raw.to_vec()).unwrap();
        let code = huffman_average_length(&p, 2).unwrap();
        assert!((code.avg_len - brute_force_optimum(&raw)).abs() < 1e-12);
        assert!(code.entropy <= code.avg_len && code.avg_len < code.entropy + 1.0);
    }

    #[test]
    fn ties_prefer_lower_index() {
        let p = ProbVec::uniform(3).unwrap();
        let code = huffman_average_length(&p, 2).unwrap();
        // symbols 0 and 1 merge first and get the longer codewords
        assert_eq!(code.lengths, vec![2, 2, 1]);
    }

    #[test]
    fn ternary_padding() {
        let p = ProbVec::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let code = huffman_average_length(&p, 3).unwrap();
        assert!(code.entropy <= code.avg_len && code.avg_len < code.entropy + 1.0);
        assert!(huffman_average_length(&p, 1).is_err());
    }
}
