//! Random generation, almost-uniform sampling and approximate counting of
//! standard set-valued tableaux.
//!
//! * [`generator::svgen`] completes a pre-tableau at random by extending the
//!   hook walk; its output law has the closed form in [`probability`].
//! * [`chain`] turns the generator into an almost-uniform sampler with a
//!   Metropolis correction and computes exact mixing diagnostics on small
//!   state spaces.
//! * [`fpras`] estimates the number of completions by telescoping ratios.
//! * [`oracle`] enumerates everything exhaustively and is the reference the
//!   other modules are tested against.
//!
//! Probabilities are generic over [`Probability`]; [`ExactProb`] is the exact
//! rational instantiation used wherever equalities are asserted.

pub mod chain;
pub mod error;
pub mod fpras;
pub mod generator;
pub mod oracle;
pub mod probability;
pub mod rng;
pub mod scalar;
pub mod shapes;
pub mod tableaux;

pub use error::{Error, Result};
pub use scalar::Probability;
pub use shapes::{Cell, CellSet, Partition};
pub use tableaux::{PreTableau, TableauKey};

/// Exact nonnegative rational probability.
pub type ExactProb = num_rational::BigRational;
/// Exact law over tableaux.
pub type DistributionTable = probability::Distribution<ExactProb>;
/// Floating-point law over tableaux, e.g. empirical frequencies.
pub type FloatDistribution = probability::Distribution<f64>;
pub type ExactBounds = probability::ProbBounds<ExactProb>;
pub type FloatBounds = probability::ProbBounds<f64>;
