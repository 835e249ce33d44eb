use serde::{Deserialize, Serialize};

use crate::envelope::{gate, hull_contains, GateConfig, HullModel, OcsvmModel};
use crate::error::{ensure, Error, Result};
use crate::netdyn::{NarxModel, NarxSpec};
use crate::plant::{AmState, EquivCircuitParams};
use crate::signal::{channel, TimeSeries};

/// `e(k) = y_measured(k) - y_am(k)`, appended as the error channel.
pub fn compute_error_channel(measured: &TimeSeries, am_voltage: &[f64]) -> Result<TimeSeries> {
    let v = measured.require(channel::VOLTAGE)?;
    if v.len() != am_voltage.len() {
        return Err(Error::Dimension {
            expected: v.len(),
            got: am_voltage.len(),
        });
    }
    let e = v.iter().zip(am_voltage).map(|(y, a)| y - a).collect();
    measured.with_channel(channel::ERROR, e)
}

/// Region in which the error model is trusted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    /// Scored on the full regressor.
    Ocsvm { model: OcsvmModel },
    /// Scored on the regressor coordinates listed in `dims`:
    /// `+1` inside, `-1` outside.
    Hull { hull: HullModel, dims: Vec<usize> },
}

impl Envelope {
    pub fn score(&self, regressor: &[f64]) -> Result<f64> {
        match self {
            Envelope::Ocsvm { model } => model.score(regressor),
            Envelope::Hull { hull, dims } => {
                let p: Vec<f64> = dims.iter().map(|&d| regressor[d]).collect();
                Ok(if hull_contains(hull, &p)? { 1.0 } else { -1.0 })
            }
        }
    }

    fn validate(&self, width: usize) -> Result<()> {
        match self {
            Envelope::Ocsvm { model } if model.dim() != width => Err(Error::Dimension {
                expected: width,
                got: model.dim(),
            }),
            Envelope::Hull { hull, dims } => {
                ensure(dims.iter().all(|&d| d < width), || {
                    format!("hull projection {dims:?} exceeds regressor width {width}")
                })?;
                if hull.dim() != dims.len() {
                    return Err(Error::Dimension {
                        expected: dims.len(),
                        got: hull.dim(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridModel {
    pub am: EquivCircuitParams,
    pub narx: NarxModel,
    /// `None` applies the raw error model everywhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Envelope>,
    #[serde(default)]
    pub gate: GateConfig,
}

impl HybridModel {
    pub fn validate(&self) -> Result<()> {
        self.am.validate()?;
        self.narx.net.validate()?;
        if self.narx.net.n_in != NarxSpec::WIDTH {
            return Err(Error::Dimension {
                expected: NarxSpec::WIDTH,
                got: self.narx.net.n_in,
            });
        }
        self.gate.validate()?;
        if let Some(env) = &self.envelope {
            env.validate(NarxSpec::WIDTH)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridRun {
    /// `y_am + e_dd`.
    pub voltage: Vec<f64>,
    pub am_voltage: Vec<f64>,
    pub am_soc: Vec<f64>,
    /// Gated compensation; `e_dd[0] = 0`.
    pub error: Vec<f64>,
    /// Ungated error-model output at the same regressors.
    pub raw_error: Vec<f64>,
    /// Envelope score per step, when an envelope is present. Step 0 is
    /// scored with `i(-1) = i(0)`.
    pub score: Option<Vec<f64>>,
    /// Regressor rows, step 0 padded as for the score.
    pub regressors: Vec<[f64; 5]>,
    pub diverged: bool,
}

/// Free simulation of the hybrid model. The network's own ungated output is
/// fed back as `e(k-1)`, so the gate limits the compensation without
/// perturbing the error model's internal recursion.
pub fn hybrid_simulate(h: &HybridModel, current: &[f64], temp_c: &[f64], soc0: f64, dt: f64) -> Result<HybridRun> {
    h.validate()?;
    ensure(current.len() == temp_c.len(), || {
        format!("current has {} samples, temperature {}", current.len(), temp_c.len())
    })?;
    let n = current.len();
    let mut am = AmState::new(&h.am, soc0, dt)?;
    let mut run = HybridRun {
        voltage: Vec::with_capacity(n),
        am_voltage: Vec::with_capacity(n),
        am_soc: Vec::with_capacity(n),
        error: Vec::with_capacity(n),
        raw_error: Vec::with_capacity(n),
        score: h.envelope.as_ref().map(|_| Vec::with_capacity(n)),
        regressors: Vec::with_capacity(n),
        diverged: false,
    };
    let guard = h.narx.error_guard;
    for k in 0..n {
        let v_am = am.step(current[k], temp_c[k]);
        let soc = am.soc();
        let (i_prev, e_prev) = if k == 0 { (current[0], 0.0) } else { (current[k - 1], run.raw_error[k - 1]) };
        let x = [current[k], i_prev, temp_c[k], soc, e_prev];
        let f_oc = match &h.envelope {
            Some(env) => Some(env.score(&x)?),
            None => None,
        };
        let (raw, e) = if k == 0 {
            (0.0, 0.0)
        } else {
            let mut raw = h.narx.net.eval(&x);
            if let Some(g) = guard {
                if !(raw.abs() <= g) {
                    run.diverged = true;
                    raw = if raw.is_nan() { 0.0 } else { raw.clamp(-g, g) };
                }
            }
            (raw, f_oc.map_or(raw, |f| gate(raw, f, &h.gate)))
        };
        if let (Some(s), Some(f)) = (run.score.as_mut(), f_oc) {
            s.push(f);
        }
        run.voltage.push(v_am + e);
        run.am_voltage.push(v_am);
        run.am_soc.push(soc);
        run.error.push(e);
        run.raw_error.push(raw);
        run.regressors.push(x);
    }
    Ok(run)
}
