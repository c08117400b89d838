//! Approximate quantum states built from randomized single-qubit measurements.
//!
//! An [`ApproximateState`] holds `M` snapshots of an `N`-qubit register, each
//! snapshot being one `(outcome, theta, phi)` triple per qubit. Any observable
//! given as a sum of Pauli strings, or as a sum of tensor products of
//! single-qubit operators, can be estimated from it, with a standard deviation
//! bounded by the observable's seminorm over `sqrt(M)`.
//!
//! The [`statevector`] module provides exact reference values, and
//! [`harness`] ties everything together into reproducible experiments.

pub mod error;
pub mod estimator;
pub mod format;
pub mod harness;
pub mod pauli;
pub mod rng;
pub mod snapshot;
pub mod statevector;
pub mod stats;

pub use error::{Error, Result};
pub use estimator::{
    estimate_factored, estimate_observable, estimate_pauli_string, p_odd, predict_attenuated, reconstruct_density,
    EstimateResult,
};
pub use pauli::{
    projector_factored, projector_pauli_expansion, FactoredObservable, Normalization, Observable, PauliAxis,
    PauliString, SingleQubitOperator,
};
pub use snapshot::{build_approximate_state, ApproximateState, Direction, NoiseModel};
pub use statevector::{Circuit, Gate, Statevector};
