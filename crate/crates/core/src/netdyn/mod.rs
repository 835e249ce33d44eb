//! Data-driven error regression: a three-layer tanh network, NARX
//! regressor handling, Levenberg-Marquardt (series-parallel) and RTRL
//! (parallel) training, and the hidden-size grid search.

mod grid;
mod lm;
mod mlp;
mod narx;
mod rtrl;

pub use grid::{grid_search_neurons, GridSearchResult};
pub use lm::{fit_mlp, train_lm, FitOutcome, StopReason, TrainOptions, TrainOutcome};
pub use mlp::{MlpModel, StepModel};
pub use narx::{
    narx_predict_series_parallel, narx_regressors, narx_simulate_parallel, FreeRun, NarxModel,
    NarxSpec,
};
pub use rtrl::{fit_narx, free_run_mse, rtrl_gradient, train_rtrl, RtrlGradient, RtrlOutcome};
