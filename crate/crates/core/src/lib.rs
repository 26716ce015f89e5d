//! Continuous quantum clocks built from qubit dynamics.
//!
//! Three clock designs are modelled:
//!
//! - a one-qubit clock with visibility `chi`, read out in the `|±⟩` basis,
//! - a two-qubit clock whose control qubit selects a slow (`omega`) or fast
//!   (`big_omega`) oscillation of the target qubit,
//! - an `n`-qubit GHZ clock whose collective phase runs `n` times faster.
//!
//! The crate computes exact outcome distributions, classical and quantum
//! Fisher information, Cramér-Rao bounds, closed-form and numeric
//! maximum-likelihood time estimators, and seeded Monte-Carlo error sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counts;
pub mod error;
pub mod estimators;
pub mod fisher;
pub mod model;
pub mod montecarlo;
pub mod optimize;
pub mod recurrence;
pub mod state;

pub use counts::CountVector;
pub use error::{ClockError, Result};
pub use estimators::{Branch, EstimateReport};
pub use fisher::{FisherKind, FisherReport};
pub use model::{ClockModel, ModelKind, OutcomeDistribution};
pub use state::{DiagonalHamiltonian, ProjectiveMeasurement, PureState};
