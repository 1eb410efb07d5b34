//! Least-squares twin support vector machines, solved in closed form and by a
//! dense statevector simulation of the quantum training and prediction
//! circuits (input-state preparation, density-matrix Hamiltonians with a
//! first-order Trotter split, HHL-style linear solving, SWAP-test prediction).

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod datagen;
pub mod error;
pub mod hamiltonian;
pub mod hhl;
pub mod numerics;
pub mod pipeline;
pub mod quantum;
pub mod rng;
pub mod state_prep;
pub mod swap;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
