//! Experiment harness: the polynomial study, the battery study, plots.

mod battery;
mod cycles;
mod halton;
mod plot;
mod poly;

pub use battery::{
    evaluate_cycle, inside_fraction, mean_metric, ocsvm_gate, prepare_cycle, prepare_dataset, projection, projection_hull,
    read_trace_csv, run_battery_experiment, select_edge_cycles, train_battery_models, train_envelope, train_error_model,
    write_battery_report, write_battery_summary, write_edge_csv, write_evaluation, write_trace_csv, BatteryExperimentConfig,
    BatteryReport, CycleTrace, TrainedBattery, BATTERY_VARIANTS, HULL_DIMS,
};
pub use cycles::{DriveCycle, DriveProfile};
pub use halton::{halton_cover, radical_inverse};
pub use plot::{emit_plots, projection_svg, trace_svg};
pub use poly::{
    gen_polynomial, run_poly_experiment, run_poly_seed, write_poly_csv, PolyExperimentConfig, PolyReport, PolyRun,
    PolySeedResult, PolySpec, PolyTerm, Polynomial, POLY_VARIANTS,
};
