//! Finite groups whose elements serve as symbols for transcripts.
//!
//! Elements are encoded as integers `0..order`: residues for `Z_m`, Lehmer
//! codes for `S_L`. The product follows the ordinal convention
//! `(r∘s)_i = s_{r_i}`, and the transcript from `α` to `β` is `β·α⁻¹`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{validation, Error, Result};
use crate::ordinal::{self, factorial, OrdinalPattern, MAX_CENSUS_ORDER};

pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    fn inv(&self, a: usize) -> usize;

    /// The unique `τ` with `τ·α = β`.
    fn transcript(&self, alpha: usize, beta: usize) -> usize {
        self.mul(beta, self.inv(alpha))
    }

    fn contains(&self, a: usize) -> bool {
        a < self.order()
    }
}

/// `S_L` (`2 ≤ L ≤ 8`) or `Z_m` (`m ≥ 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "group", content = "param", rename_all = "snake_case")]
pub enum Group {
    Symmetric(usize),
    Cyclic(usize),
}

impl Group {
    pub fn symmetric(l: usize) -> Result<Self> {
        if !(2..=MAX_CENSUS_ORDER).contains(&l) {
            return Err(validation(format!(
                "S_L needs 2 ≤ L ≤ {MAX_CENSUS_ORDER}, got {l}"
            )));
        }
        Ok(Group::Symmetric(l))
    }

    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(validation("Z_m needs m ≥ 1"));
        }
        Ok(Group::Cyclic(m))
    }

    fn perm(l: usize, a: usize) -> OrdinalPattern {
        OrdinalPattern::from_index(l, a as u64).expect("element index checked by caller")
    }
}

impl FiniteGroup for Group {
    fn order(&self) -> usize {
        match *self {
            Group::Symmetric(l) => factorial(l) as usize,
            Group::Cyclic(m) => m,
        }
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        match *self {
            Group::Symmetric(l) => {
                let ab =
                    ordinal::compose(&Self::perm(l, a), &Self::perm(l, b)).expect("same order");
                ab.index() as usize
            }
            Group::Cyclic(m) => (a + b) % m,
        }
    }

    fn inv(&self, a: usize) -> usize {
        match *self {
            Group::Symmetric(l) => ordinal::invert(&Self::perm(l, a)).index() as usize,
            Group::Cyclic(m) => (m - a) % m,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Symmetric(l) => write!(f, "sL:{l}"),
            Group::Cyclic(m) => write!(f, "zm:{m}"),
        }
    }
}

/// Parses `sL:<L>` or `zm:<m>`.
impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, n) = s
            .split_once(':')
            .ok_or_else(|| validation(format!("group must be sL:<L> or zm:<m>, got {s:?}")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| validation(format!("bad group parameter in {s:?}")))?;
        match kind.trim() {
            "sL" | "sl" | "S" => Group::symmetric(n),
            "zm" | "Zm" | "Z" => Group::cyclic(n),
            other => Err(validation(format!("unknown group kind {other:?}"))),
        }
    }
}
