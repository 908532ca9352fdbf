//! Numerical toolkit for the three-qubit bound entangled state built from the
//! unextendable product basis `{|01+>, |1+0>, |+01>, |--->}`, written in
//! terms of its tensor of coherences.
//!
//! - [`pauli`]: tensor-Pauli basis, coherence tensors, kets and reductions.
//! - [`linalg`]: Hermitian Jacobi eigensolver and unitary flows.
//! - [`upb`]: named states, reflections, set C and the UPB check.
//! - [`entanglement`]: partial transposes and local-hidden-variable checks.
//! - [`dynamics`]: preparation schedules, the PPT orbit and closed-form flows.
//! - [`verify`]: the claim runner and report/CSV writers behind the CLI.

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod upb;
pub mod verify;

pub use error::{Error, Result};
