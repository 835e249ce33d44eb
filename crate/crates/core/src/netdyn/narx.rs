use serde::{Deserialize, Serialize};

use super::mlp::{MlpModel, StepModel};
use crate::error::{ensure, Error, Result};
use crate::signal::{channel, TimeSeries};

/// First-order NARX regressor
/// `[i(k), i(k-1), T(k), soc(k), e(k-1)]` predicting `e(k)`.
///
/// The fields name the channels each input is read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NarxSpec {
    pub current: String,
    pub temperature: String,
    pub soc: String,
    pub error: String,
}

impl Default for NarxSpec {
    fn default() -> Self {
        NarxSpec {
            current: channel::CURRENT.into(),
            temperature: channel::TEMPERATURE.into(),
            soc: channel::SOC.into(),
            error: channel::ERROR.into(),
        }
    }
}

pub(crate) struct Inputs<'a> {
    pub current: &'a [f64],
    pub temperature: &'a [f64],
    pub soc: &'a [f64],
}

impl NarxSpec {
    pub const WIDTH: usize = 5;
    /// Position of the fed-back error in the regressor.
    pub const FEEDBACK: usize = 4;

    pub(crate) fn inputs<'a>(&self, ts: &'a TimeSeries) -> Result<Inputs<'a>> {
        Ok(Inputs {
            current: ts.require(&self.current)?,
            temperature: ts.require(&self.temperature)?,
            soc: ts.require(&self.soc)?,
        })
    }

    /// Regressor for step `k >= 1`.
    #[inline]
    pub(crate) fn row(u: &Inputs<'_>, k: usize, e_prev: f64) -> [f64; 5] {
        [u.current[k], u.current[k - 1], u.temperature[k], u.soc[k], e_prev]
    }
}

/// A trained error model: network plus regressor layout and the free-run
/// divergence bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NarxModel {
    pub net: MlpModel,
    pub spec: NarxSpec,
    /// Free-run outputs are clamped to `±error_guard`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_guard: Option<f64>,
}

impl NarxModel {
    /// Guard set to ten times the largest absolute training error.
    pub fn with_training_guard(net: MlpModel, spec: NarxSpec, train_errors: impl Iterator<Item = f64>) -> Self {
        let max = train_errors.fold(0.0f64, |m, e| m.max(e.abs()));
        NarxModel {
            net,
            spec,
            error_guard: (max > 0.0).then_some(10.0 * max),
        }
    }
}

/// Regressor rows and one-step targets for `k = 1..len`.
pub fn narx_regressors(spec: &NarxSpec, ts: &TimeSeries) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let u = spec.inputs(ts)?;
    let e = ts.require(&spec.error)?;
    ensure(ts.len() >= 2, || "NARX regressors need at least two samples".into())?;
    let x = (1..ts.len()).map(|k| NarxSpec::row(&u, k, e[k - 1]).to_vec()).collect();
    Ok((x, e[1..].to_vec()))
}

/// One-step-ahead predictions using the measured past error (series-parallel).
/// Element `k - 1` of the result predicts `e(k)`.
pub fn narx_predict_series_parallel<M: StepModel>(model: &M, spec: &NarxSpec, ts: &TimeSeries) -> Result<Vec<f64>> {
    if model.input_width() != NarxSpec::WIDTH {
        return Err(Error::Dimension {
            expected: NarxSpec::WIDTH,
            got: model.input_width(),
        });
    }
    let (x, _) = narx_regressors(spec, ts)?;
    Ok(x.iter().map(|r| model.predict(r)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeRun {
    pub error: Vec<f64>,
    /// Set when the guard clamped at least one output.
    pub diverged: bool,
}

/// Free-run (parallel) simulation feeding back the model's own prediction.
/// `error[0] = e0`; later samples are clamped to `±guard` when a guard is given.
pub fn narx_simulate_parallel<M: StepModel>(
    model: &M,
    spec: &NarxSpec,
    ts: &TimeSeries,
    e0: f64,
    guard: Option<f64>,
) -> Result<FreeRun> {
    if model.input_width() != NarxSpec::WIDTH {
        return Err(Error::Dimension {
            expected: NarxSpec::WIDTH,
            got: model.input_width(),
        });
    }
    let u = spec.inputs(ts)?;
    let mut error = Vec::with_capacity(ts.len());
    error.push(e0);
    let mut diverged = false;
    for k in 1..ts.len() {
        let mut e = model.predict(&NarxSpec::row(&u, k, error[k - 1]));
        if let Some(g) = guard {
            if !(e.abs() <= g) {
                diverged = true;
                e = if e.is_nan() { 0.0 } else { e.clamp(-g, g) };
            }
        }
        error.push(e);
    }
    Ok(FreeRun { error, diverged })
}
