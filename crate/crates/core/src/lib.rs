//! Wasserstein distributionally robust regret minimization for linear
//! objectives over compact feasible sets.
//!
//! The crate evaluates worst-case expected regret and worst-case CVaR of
//! regret in closed form, compiles the minimization problems into linear
//! programs (or solves them with projected subgradient steps when the set
//! is not polyhedral), and ships an independent optimal-transport oracle
//! that certifies the closed forms numerically.

pub mod cli;
pub mod error;
pub mod fmt;
pub mod geometry;
pub mod lp;
pub mod oracle;
pub mod reformulate;
pub mod regret;
pub mod solve;

pub use error::{Error, Result};
pub use geometry::{FeasibleSet, Norm, Shape};
pub use regret::{AmbiguitySet, Atom, DiscreteDistribution, RiskLevel};
