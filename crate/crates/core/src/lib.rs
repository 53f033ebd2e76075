//! Optimal two-dimensional subsystem codes built from classical linear codes.
//!
//! The crate covers the full pipeline:
//!
//! * [`f2`]: bit-packed GF(2) linear algebra.
//! * [`classical`]: classical linear codes, transpose codes, distances, alist I/O.
//! * [`expander`]: bipartite graphs, exact expansion certificates, Tanner codes.
//! * [`flip`]: the bucketed flip decoder for noisy syndromes and its guarantee.
//! * [`pauli`]: CSS subsystem codes as support matrices over a qubit layout.
//! * [`bbs`]: Bravyi-Bacon-Shor codes, the augmented 2D-local variant, and
//!   the classical-to-quantum construction `A = G₁ᵀ Q G₂`.
//! * [`hgp`]: hypergraph product codes.
//! * [`gaugefix`]: ancilla appending and gauge-fixing verification.
//! * [`sim`]: noise models, gauge measurement, induced decoding, Monte Carlo.

pub mod bbs;
pub mod classical;
pub mod error;
pub mod expander;
pub mod f2;
pub mod flip;
pub mod gaugefix;
pub mod hgp;
pub mod pauli;
pub mod sim;

pub use error::{Error, Result};
pub use f2::{BitMatrix, BitVec};
