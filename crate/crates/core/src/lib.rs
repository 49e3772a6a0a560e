//! Entanglement production by operators on tensor-product Hilbert spaces.
//!
//! For an operator `A` on `H = H_1 ⊗ … ⊗ H_N` the measure compares the
//! Hilbert–Schmidt norm of `A` with that of its nonentangling counterpart,
//! the normalized tensor product of its block marginals:
//!
//! ```text
//! A_⊗ = (A_1 ⊗ … ⊗ A_N) / (Tr A)^(N-1),      ε(A) = log ||A|| / ||A_⊗||
//! ```
//!
//! The crate is organized as
//!
//! - [`hilbert`]: dense operators on tensor-product layouts, partial traces,
//!   norms and scalar state functionals (purity, Rényi-2, IPR, …).
//! - [`measure`]: ε for arbitrary operators, pure states, Gibbs states,
//!   measurement reduction and composite-measurement correlators.
//! - [`states`]: EPR, Bell, GHZ, multicat, multimode and separable states
//!   with their closed-form ε.
//! - [`register`]: the two-qubit Ising register in a thermal bath.
//! - [`decoherence`]: bipartite dephasing dynamics and the ε trajectory.
//! - [`spinor`]: Young-diagram dimensions and the spinor-system measures.
//! - [`cli`]: the `entprod` command-line front end and its file formats.

pub mod cli;
pub mod decoherence;
pub mod error;
pub mod hilbert;
pub mod measure;
pub mod random;
pub mod register;
pub mod spinor;
pub mod states;
pub mod tol;

pub use error::{Error, Invariant, Result};
pub use hilbert::{DenseOperator, DensityOperator, Partition, SpaceLayout};
pub use measure::{LogBase, MeasureReport};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
