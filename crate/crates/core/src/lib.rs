//! Markovian relaxation generators for open quantum systems.
//!
//! Two generators are built for the same microscopic model and compared:
//! the conventional Markov (CM) superoperator, obtained by pulling the
//! density matrix out of the collision integral, and the temporally
//! symmetrized, coarse-grained generator (SYM), which comes out in
//! Lindblad form and therefore keeps the density matrix positive.
//!
//! Module map:
//!
//! - [`numkernel`]: dense complex matrices, eigen-solvers, matrix exponential,
//!   row-major matrix/vector mapping.
//! - [`rates`]: generalized scattering-rate tensors, Liouvillian assembly,
//!   Gaussian-filtered jump operators and the GKSL dissipator.
//! - [`qdphonon`]: quantum-dot / acoustic-phonon closed forms and the CM
//!   criticality thresholds.
//! - [`twolevel`]: the bound-to-continuum 4x4 reduction in closed form.
//! - [`dynamics`]: time propagation, trajectory diagnostics, Boltzmann limit.
//! - [`cli`]: configuration and the `simulate` run modes.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod numkernel;
pub mod qdphonon;
pub mod rates;
pub mod tolerances;
pub mod twolevel;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
