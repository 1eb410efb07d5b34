//! Dense statevector and density-matrix simulation.
//!
//! Registers are addressed by name through a [`RegisterLayout`]; the first
//! register listed is the most significant part of a basis index. Dimensions
//! that are not powers of two are zero-padded, and every register has at
//! least one qubit.

mod density;
mod layout;
mod measure;
mod state;

pub use density::{partial_trace, DensityMatrix, DENSITY_TOLERANCE};
pub use layout::{qubits_for_dim, RegisterLayout, RegisterSpan};
pub use measure::{
    measure_projective, postselect, register_probabilities, sample_counts, Postselected, ProjectiveMeasurement,
    ShotCounts, PROJECTOR_TOLERANCE,
};
pub use state::{
    fidelity, hadamard, hadamard_matrix, normalize_real, normalize_to_state, StateVector, NORM_TOLERANCE,
    UNITARY_TOLERANCE, ZERO_NORM,
};
