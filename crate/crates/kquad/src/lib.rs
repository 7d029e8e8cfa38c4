//! Greedy kernel quadrature.
//!
//! Given a strictly positive definite kernel and a linear functional L
//! represented as a discrete measure, this crate selects quadrature nodes by
//! greedy interpolation of the Riesz representer of L and computes the
//! weight-optimal rule together with an exactly tracked worst-case error on
//! the unit ball of the kernel's native space.
//!
//! The pieces:
//!
//! - [`kernels`]: kernel families, point sets, Gram matrices.
//! - [`functionals`]: discrete functionals, Monte Carlo surrogates of
//!   integration functionals, Riesz representer evaluation.
//! - [`newton`]: the incremental Newton-basis factorization driving the
//!   greedy updates.
//! - [`greedy`]: selection rules, termination, the greedy driver, error
//!   certification, measure compression.
//! - [`perturbation`]: error decomposition under a perturbed representer.
//! - [`oracle`]: independent dense reference implementations for tests and
//!   validation.
//! - [`io`]: the CSV formats shared with the command-line harness.
//!
//! With the default `parallel` feature the inner loops run on rayon; results
//! are identical bit-for-bit with and without it.

pub mod error;
#[doc(hidden)]
pub mod exec;
pub mod functionals;
pub mod greedy;
pub mod io;
pub mod kernels;
pub mod newton;
pub mod oracle;
pub mod perturbation;

pub use error::{Error, Result};
pub use functionals::{
    monte_carlo_functional, uniform_points, DensitySpec, DiscreteFunctional, DomainSpec,
};
pub use greedy::{
    canonical_continuity, compress, greedy_bound_constant, run_greedy, worst_case_error,
    worst_case_error_parts, QuadratureRule, SelectionRule, Status, Termination, TraceEntry,
};
pub use kernels::{KernelFamily, KernelSpec, PointSet};
pub use newton::GreedyState;
pub use perturbation::{
    functional_difference, perturbation_decomposition, PerturbationDecomposition,
};
