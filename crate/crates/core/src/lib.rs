//! Analysis of bipartite quantum states.
//!
//! - [`state`]: density matrices on `H_A ⊗ H_B`, partial trace and partial
//!   transpose, local embeddings.
//! - [`criteria`]: PPT and reduction criteria, von Neumann entropy,
//!   witness expectations and the correlation gap.
//! - [`reductions`]: projective collapse, outcome-conditioned states, Zeno
//!   disentanglement and the probability-averaged projective state.
//! - [`correlated`]: correlated local states for an assumed pointer and the
//!   self-consistent fixed-point solver for the correlated product pair.
//! - [`two_qubit`]: closed-form two-qubit expansions used as oracles.
//! - [`gen`]: seeded state generators.
//!
//! Composite indices follow `a * n_b + b`. Entropies are in nats.

#![forbid(unsafe_code)]

pub mod correlated;
pub mod criteria;
pub mod error;
pub mod gen;
pub mod linalg;
pub mod reductions;
pub mod state;
pub mod two_qubit;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use state::{
    BipartiteDensityMatrix, BipartiteDims, DensityMatrix, Observable, Projector, Subsystem,
    DEFAULT_TOL,
};
