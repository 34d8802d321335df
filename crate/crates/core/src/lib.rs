//! Simulation of entanglement loss in a two-qubit open system.
//!
//! The crate covers three regimes of the same model:
//!
//! * unitary evolution under a Heisenberg-coupled Hamiltonian, where
//!   concurrence oscillates as `|sin 2yt|`;
//! * Markovian pure dephasing, written both as a Lindblad dissipator and as
//!   the phenomenological rate superoperator, where a Bell state loses its
//!   concurrence exponentially;
//! * Wiseman-Milburn direct feedback, which yields a unique entangled steady
//!   state on the `{|01>, |10>}` subspace with closed-form purity and
//!   concurrence.
//!
//! All dense kernels live in [`linalg`]; the remaining modules are thin layers
//! over them.

pub mod error;
pub mod evolution;
pub mod feedback;
pub mod generators;
pub mod linalg;
pub mod quantum;

pub use error::{Error, Result};
pub use linalg::{c64, ComplexMatrix};
pub use num_complex::Complex64;
