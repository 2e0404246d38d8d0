//! Best-arm identification for two-armed (and, for lower bounds, K-armed)
//! stochastic bandits.
//!
//! The crate covers the informational complexities that govern the
//! fixed-confidence and fixed-budget settings, the lower bounds built from
//! them, the matching sequential and static strategies, and a deterministic
//! Monte Carlo harness for comparing the two settings.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod complexity;
pub mod dists;
pub mod error;
pub mod fb_algos;
pub mod fc_algos;
pub mod harness;
pub mod instance;

pub use dists::{ArmDistribution, ExpFamily, Family, RngState};
pub use error::{BaiError, Result};
pub use instance::{BanditInstance, InstanceSpec};
