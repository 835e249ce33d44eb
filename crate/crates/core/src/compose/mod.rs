//! Hybrid model: analytical voltage plus a gated, recurrent error model.

mod hybrid;
mod metrics;

pub use hybrid::{compute_error_channel, hybrid_simulate, Envelope, HybridModel, HybridRun};
pub use metrics::{evaluate, write_report_csv, CycleReport, MetricsReport};
