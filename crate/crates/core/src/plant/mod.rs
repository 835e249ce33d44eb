//! Equivalent-circuit analytical model (R0 plus two RC pairs) and the
//! richer synthetic plant used as ground truth.
//!
//! Sign convention: current is positive while charging. State of charge
//! rises with positive current, and the terminal voltage is
//! `OCV(soc) - i_dis * R0 - sum(v_c)` with `i_dis = -i`.

mod am;
mod params;
mod synth;

pub use am::{coulomb_count, simulate_am, AmOutput, AmState};
pub use params::{arrhenius_resistance, Arrhenius, EquivCircuitParams, Grid3, OcvTable, ParamMap};
pub use synth::{simulate_plant, Hysteresis, PlantConfig, RcPair};
