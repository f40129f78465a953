//! Quantum Wasserstein distances between density matrices.
//!
//! The squared distance between two states `rho` and `sigma` is a minimum of a
//! two-body cost over *couplings*: bipartite density matrices whose marginals
//! are the two states. Restricting the coupling to separable (in practice PPT)
//! states turns the self-distance from the Wigner–Yanase skew information into a
//! quarter of the quantum Fisher information.
//!
//! Crate layout:
//!
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, partial trace and
//!   transpose, realification for the solver.
//! - [`sdp`]: primal-dual interior-point solver for block-diagonal SDPs.
//! - [`qstates`]: Paulis, SU(d) generators, spin operators, validated states.
//! - [`metrology`]: variance, QFI, skew information, generalized QFI family.
//! - [`coupling`]: feasible sets of couplings turned into LMI problems.
//! - [`wasserstein`]: distances, variance-like quantities, tables, sweeps.
//! - [`transport`]: Kraus transport maps for separable couplings.
//! - [`entanglement`]: variance and second-moment entanglement criteria.
//! - [`random`]: seeded random states and observables.

pub mod coupling;
pub mod entanglement;
mod error;
pub mod linalg;
pub mod metrology;
pub mod qstates;
pub mod random;
pub mod sdp;
pub mod tolerances;
pub mod transport;
pub mod wasserstein;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, Subsystem};
pub use num_complex::Complex64 as C64;
pub use qstates::{DensityMatrix, HermitianOperator};
