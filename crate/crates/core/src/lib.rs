//! Budget-constrained bidding in repeated first-price auctions.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every piece of the
//! simulation that is pure computation:
//!
//! - [`distributions`]: value and rival-bid laws on `[0, 1]`, seeded sampling.
//! - [`estimation`]: empirical CDFs, Cox partial-likelihood fits and the
//!   kernel-smoothed product-limit estimator for censored rival bids.
//! - [`dp`]: the finite-truncation Bellman recursion over (budget, time) and a
//!   brute-force oracle for tiny instances.
//! - [`policies`]: the oracle bidder, the full-feedback learner, the phased
//!   censored-feedback learner and the half-value baseline.
//! - [`auction`]: round settlement, feedback channel and the simulation loop.
//! - [`regret`]: expected rewards, regret of one coupled replication, the
//!   closed-form regret bounds and the two-distribution benchmark example.
//!
//! IO, configuration files, CLI and parallel orchestration live in the
//! companion `fpa-lab` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod auction;
pub mod distributions;
pub mod dp;
pub mod error;
pub mod estimation;
pub mod policies;
pub mod regret;
pub mod rng;

pub use error::{Error, Result};
