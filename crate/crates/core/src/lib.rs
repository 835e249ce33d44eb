//! Hybrid battery voltage models: an equivalent-circuit analytical model
//! plus a NARX neural error compensator whose output is gated by a
//! one-class SVM description of the training data.
//!
//! Module map:
//!
//! - [`signal`]: time series, CSV, anti-alias decimation, noise, scaling.
//! - [`plant`]: equivalent-circuit model and the synthetic ground-truth plant.
//! - [`netdyn`]: three-layer tanh network, NARX wrappers, LM and RTRL training.
//! - [`envelope`]: OCSVM, convex hulls, and the gating function.
//! - [`compose`]: the hybrid model, free simulation, validation metrics.
//! - [`bench`]: experiment harness (polynomial study, battery study, plots).

pub mod bench;
pub mod compose;
pub mod envelope;
pub mod error;
pub mod netdyn;
pub mod persist;
pub mod plant;
pub mod signal;

pub use error::{Error, Result};
