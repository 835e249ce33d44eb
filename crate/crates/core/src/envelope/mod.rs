//! Boundary models of the training distribution and the gate that limits
//! the error model outside of it.

mod gate;
mod hull;
mod kernel;
mod lp;
mod ocsvm;
mod tune;

pub use gate::{gate, gate_multiplier, GateConfig, GateVariant};
pub use hull::{hull_3d, hull_contains, quickhull_2d, Facet, HullModel, HULL_TOL};
pub use kernel::gaussian_kernel;
pub use lp::convex_combination_feasible;
pub use ocsvm::{train_ocsvm, OcsvmFit, OcsvmModel};
pub use tune::{bounding_box_probes, confusion_rates, tune_ocsvm, TuneCell, TuneResult};
