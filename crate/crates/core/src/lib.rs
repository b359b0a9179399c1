//! Partition-tree-weighted Bayesian control for non-stationary Bernoulli
//! bandits.
//!
//! The crate is organised bottom-up:
//!
//! - [`kt`]: Krichevsky–Trofimov estimators and the per-arm KT environment.
//! - [`ptw`]: the incremental partition-tree mixture and its posterior over
//!   active segments.
//! - [`policy`]: ActivePTW and the baseline bandit algorithms behind one
//!   [`policy::Policy`] trait.
//! - [`env`]: piecewise-stationary environments, generators and the regret
//!   oracle.
//! - [`harness`]: episode runner, common-random-number seeding, aggregation
//!   and CSV output. Episodes run on rayon when the `parallel` feature is on.
//! - [`verification`]: brute-force oracles and bound checks.

pub mod env;
pub mod error;
pub mod harness;
pub mod kt;
pub mod logspace;
pub mod policy;
pub mod ptw;
pub mod verification;

pub use error::{Error, Result};
pub use logspace::LogProb;
