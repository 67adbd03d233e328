//! Exact local dynamics of planar polynomial germs fixing the origin.
//!
//! The engine computes zero orders and fixed-point indices of iterates,
//! Dold indices `P_M(f,0)` and the number `O_M(f,0) = P_M(f,0)/M` of periodic
//! orbits hidden at the origin. It decides when every germ with a given
//! linear part must hide at least two orbits of period `M`, and cross-checks
//! orbit counts numerically by perturbation and Newton iteration.

pub mod classify;
pub mod dold;
pub mod error;
pub mod exactnum;
pub mod jet;
pub(crate) mod linalg;
pub mod multiplicity;
pub mod normalform;
pub mod numverify;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
