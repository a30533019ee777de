//! Simulator for a hybrid quantum-scissors device: a nondegenerate parametric
//! amplifier (modes `a`, `b`) followed by a beamsplitter mixing `b` with an
//! input mode `c`, with photon counting on two of the three outputs.
//!
//! * [`fock`] holds state types and expectation machinery.
//! * [`devices`] builds the pre-detection three-mode state, both from the
//!   closed-form sum and from numerically exponentiated generators.
//! * [`scissors`] post-selects on ideal photon counts.
//! * [`detection`] models lossy, dark-count-prone number-resolving detectors.
//! * [`metrics`] evaluates Mandel Q, quadrature variance and skew information.
//! * [`cli`] drives single-point runs and parameter sweeps.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod detection;
pub mod devices;
pub mod error;
pub mod fock;
pub mod metrics;
pub mod scissors;
pub mod special;

pub use error::{Error, Result};
