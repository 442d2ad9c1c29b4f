//! Finite-alphabet information measures and the applications built on them:
//! wrong-code bounds, information rates of coupled stationary sources, Kelly
//! horse races with side information, log-optimal portfolios, and a GARCH(1,1)
//! measure of market inefficiency.
//!
//! All quantities are in bits (base-2 logarithms).

pub mod coding;
pub mod error;
pub mod info;
pub mod kelly;
pub mod market;
pub mod par;
pub mod rates;

pub use error::{Error, Result};
pub use info::{Distribution, JointDistribution, ThreeWayTable};
pub use par::Execution;
