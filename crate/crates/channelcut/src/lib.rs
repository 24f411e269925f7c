//! Quasiprobability decomposition of quantum channels into tensor products of
//! one-qubit operations.
//!
//! The library decomposes an `n`-qubit unitary channel over a fixed 16-element
//! one-qubit operation basis, shrinks the decomposition when the channel is
//! used between known pre- and post-selection projectors, and validates the
//! resulting signed-sampling scheme with a density-matrix simulator and a
//! small gate-level HHL linear solver.
//!
//! Modules, bottom-up:
//!
//! * [`matcore`] — dense complex linear algebra: Kronecker products,
//!   vectorization, projector eigendecomposition, real least squares.
//! * [`channels`] — operator channels `[V]ρ = VρV†`, mixtures, Choi matrices,
//!   and the 16-element one-qubit basis.
//! * [`qpd`] — quasiprobability decomposition of n-qubit unitaries over
//!   tensor products of the one-qubit basis, with sampling overhead γ.
//! * [`selection`] — reduction of a channel sandwiched between projectors to
//!   an effective operator on fewer qubits, plus overhead grids.
//! * [`simkit`] — density-matrix circuit simulator with depolarizing noise
//!   and signed Monte-Carlo estimators.
//! * [`hhl`] — a small gate-level HHL linear solver used as the end-to-end
//!   validation workload.

pub mod channels;
mod exec;
pub mod hhl;
pub mod matcore;
pub mod qpd;
pub mod selection;
pub mod simkit;
