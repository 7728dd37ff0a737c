//! Entropy toolkit: distribution entropies, exact dynamical-systems oracles,
//! time-series estimators (approximate, sample, permutation and transfer
//! entropy), maximum-entropy inference and ordinal independence tests.
//!
//! Entropies are in nats unless a [`prob::LogBase`] is passed explicitly.
//!
//! | module | contents |
//! |--------|----------|
//! | [`prob`] | Shannon/Rényi/Tsallis, joint and mutual information, axiom suite, Huffman bound |
//! | [`symbolic`] | Markov and topological Markov entropies, Parry measure, toral automorphisms, interval maps, simulators, plug-in rates |
//! | [`correlation`] | approximate entropy, sample entropy, correlation integral |
//! | [`ordinal`] | ordinal patterns, symmetric group, permutation entropies, forbidden-pattern census |
//! | [`transfer`] | transfer entropy, directionality, coupling complexity, algebraic transfer entropy |
//! | [`maxent`] | discrete maxent solver, Gibbs and Tsallis distributions, continuous closed forms |
//! | [`stats`] | chi-square machinery, Method 1/Method 2 and G(L) tests |
//! | [`io`] | plain-text input formats |

pub mod correlation;
pub mod error;
pub mod group;
pub mod io;
pub mod maxent;
pub mod ordinal;
pub mod prob;
pub mod rng;
pub mod series;
pub mod stats;
pub mod symbolic;
pub mod transfer;

pub use error::{Error, Result};
pub use prob::{JointTable, LogBase, ProbVec};
pub use series::TimeSeries;
