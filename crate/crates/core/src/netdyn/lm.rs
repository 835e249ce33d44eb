use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mlp::MlpModel;
use crate::error::{ensure, Error, Result};
use crate::signal::{ColumnScale, ScalingInfo};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainOptions {
    pub max_epochs: usize,
    /// Training stops once the epoch-to-epoch loss change stays within this
    /// band for `stop_patience` consecutive epochs.
    pub stop_band: f64,
    pub stop_patience: usize,
    pub lm_lambda0: f64,
    pub lm_lambda_up: f64,
    pub lm_lambda_down: f64,
    /// Damping above this value halts the epoch loop.
    pub lm_lambda_max: f64,
    /// Independent random initializations per fit; the best is kept.
    pub restarts: usize,
    pub seed: u64,
    /// RTRL sensitivities with a larger norm are flagged as exploding.
    pub sensitivity_bound: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            max_epochs: 200,
            stop_band: 1e-8,
            stop_patience: 10,
            lm_lambda0: 1e-3,
            lm_lambda_up: 10.0,
            lm_lambda_down: 0.1,
            lm_lambda_max: 1e10,
            restarts: 3,
            seed: 0,
            sensitivity_bound: 1e6,
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        ensure(self.stop_band > 0.0, || "stop_band must be positive".into())?;
        ensure(self.stop_patience >= 1, || "stop_patience must be at least 1".into())?;
        ensure(self.lm_lambda_up > 1.0, || "lm_lambda_up must exceed 1".into())?;
        ensure(self.lm_lambda_down > 0.0 && self.lm_lambda_down < 1.0, || {
            "lm_lambda_down must lie in (0, 1)".into()
        })?;
        ensure(self.lm_lambda0 > 0.0 && self.lm_lambda_max > self.lm_lambda0, || {
            "lambda0 must be positive and below lambda_max".into()
        })?;
        ensure(self.restarts >= 1, || "at least one restart required".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Loss change stayed inside the stop band for the patience window.
    Converged,
    MaxEpochs,
    /// No acceptable step before the damping limit; best-so-far kept.
    LambdaLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: MlpModel,
    /// Loss before training followed by the loss after every accepted epoch.
    pub trace: Vec<f64>,
    pub epochs: usize,
    pub stop: StopReason,
}

impl TrainOutcome {
    pub fn final_loss(&self) -> f64 {
        *self.trace.last().unwrap()
    }
}

/// Residual problem in normalized units, `r = target - prediction`.
pub(crate) trait LeastSquares: Sync {
    fn n_params(&self) -> usize;
    /// Mean squared residual at `theta`.
    fn loss(&self, theta: &[f64]) -> f64;
    /// `(JᵀJ, Jᵀr, mean squared residual)` where `J = d prediction / d theta`.
    fn normal_equations(&self, theta: &[f64]) -> (DMatrix<f64>, DVector<f64>, f64);
}

pub(crate) struct LmRun {
    pub theta: Vec<f64>,
    pub trace: Vec<f64>,
    pub epochs: usize,
    pub stop: StopReason,
}

/// Damped Gauss-Newton iterations `(JᵀJ + λI) Δ = Jᵀr`.
pub(crate) fn levenberg_marquardt<P: LeastSquares>(problem: &P, theta0: Vec<f64>, opts: &TrainOptions) -> LmRun {
    let p = problem.n_params();
    let mut theta = theta0;
    let mut lambda = opts.lm_lambda0;
    let (mut jtj, mut jtr, _) = problem.normal_equations(&theta);
    // the trace only ever compares values from `loss` so acceptance is exact
    let mut loss = problem.loss(&theta);
    let mut trace = vec![loss];
    let mut stall = 0;
    let mut epochs = 0;
    let mut stop = StopReason::MaxEpochs;

    'epochs: while epochs < opts.max_epochs {
        epochs += 1;
        let accepted = loop {
            let mut a = jtj.clone();
            for d in 0..p {
                a[(d, d)] += lambda;
            }
            if let Some(chol) = a.cholesky() {
                let delta = chol.solve(&jtr);
                let cand: Vec<f64> = theta.iter().zip(delta.iter()).map(|(t, d)| t + d).collect();
                let cand_loss = problem.loss(&cand);
                if cand_loss.is_finite() && cand_loss <= loss {
                    lambda = (lambda * opts.lm_lambda_down).max(1e-20);
                    break Some((cand, cand_loss));
                }
            }
            lambda *= opts.lm_lambda_up;
            if lambda > opts.lm_lambda_max {
                break None;
            }
        };
        let Some((cand, cand_loss)) = accepted else {
            stop = StopReason::LambdaLimit;
            break 'epochs;
        };
        let change = (loss - cand_loss).abs();
        theta = cand;
        loss = cand_loss;
        trace.push(cand_loss);
        stall = if change <= opts.stop_band { stall + 1 } else { 0 };
        if stall >= opts.stop_patience {
            stop = StopReason::Converged;
            break;
        }
        if epochs < opts.max_epochs {
            (jtj, jtr, _) = problem.normal_equations(&theta);
        }
    }
    LmRun { theta, trace, epochs, stop }
}

/// Rows per Jacobian block when accumulating normal equations.
const BLOCK_ROWS: usize = 256;
/// Fixed work split so results do not depend on the thread count.
const SPLITS: usize = 16;

/// Streams Jacobian rows into `JᵀJ` / `Jᵀr` in fixed-size blocks.
pub(crate) struct NormalAccumulator {
    pub jtj: DMatrix<f64>,
    pub jtr: DVector<f64>,
    pub sse: f64,
    block: DMatrix<f64>,
    res: DVector<f64>,
    fill: usize,
}

impl NormalAccumulator {
    pub fn new(n_params: usize) -> Self {
        NormalAccumulator {
            jtj: DMatrix::zeros(n_params, n_params),
            jtr: DVector::zeros(n_params),
            sse: 0.0,
            block: DMatrix::zeros(BLOCK_ROWS, n_params),
            res: DVector::zeros(BLOCK_ROWS),
            fill: 0,
        }
    }

    pub fn push(&mut self, row: &[f64], residual: f64) {
        for (c, v) in row.iter().enumerate() {
            self.block[(self.fill, c)] = *v;
        }
        self.res[self.fill] = residual;
        self.sse += residual * residual;
        self.fill += 1;
        if self.fill == BLOCK_ROWS {
            self.flush();
        }
    }

    fn flush(&mut self) {
        if self.fill > 0 {
            let b = self.block.rows(0, self.fill);
            let r = self.res.rows(0, self.fill);
            self.jtj.gemm_tr(1.0, &b, &b, 1.0);
            self.jtr.gemv_tr(1.0, &b, &r, 1.0);
            self.fill = 0;
        }
    }

    pub fn finish(mut self) -> (DMatrix<f64>, DVector<f64>, f64) {
        self.flush();
        (self.jtj, self.jtr, self.sse)
    }
}

/// Sums partial normal equations in the given order.
pub(crate) fn reduce_normal(
    n_params: usize,
    parts: Vec<(DMatrix<f64>, DVector<f64>, f64)>,
) -> (DMatrix<f64>, DVector<f64>, f64) {
    let mut jtj = DMatrix::<f64>::zeros(n_params, n_params);
    let mut jtr = DVector::<f64>::zeros(n_params);
    let mut sse = 0.0;
    for (a, b, s) in parts {
        jtj += a;
        jtr += b;
        sse += s;
    }
    (jtj, jtr, sse)
}

/// `JᵀJ`, `Jᵀr` and mean squared residual for rows produced by
/// `fill(row, jac_row) -> residual`.
pub(crate) fn accumulate_rows<F>(n_rows: usize, n_params: usize, fill: F) -> (DMatrix<f64>, DVector<f64>, f64)
where
    F: Fn(usize, &mut [f64]) -> f64 + Sync,
{
    let per = n_rows.div_ceil(SPLITS).max(1);
    let parts: Vec<_> = (0..SPLITS)
        .into_par_iter()
        .map(|s| {
            let mut acc = NormalAccumulator::new(n_params);
            let mut row = vec![0.0; n_params];
            for k in (s * per).min(n_rows)..((s + 1) * per).min(n_rows) {
                let e = fill(k, &mut row);
                acc.push(&row, e);
            }
            acc.finish()
        })
        .collect();
    let (jtj, jtr, sse) = reduce_normal(n_params, parts);
    (jtj, jtr, sse / n_rows.max(1) as f64)
}

struct MlpRegression<'a> {
    template: &'a MlpModel,
    x: &'a [Vec<f64>],
    y: &'a [f64],
}

impl LeastSquares for MlpRegression<'_> {
    fn n_params(&self) -> usize {
        self.template.n_params()
    }

    fn loss(&self, theta: &[f64]) -> f64 {
        let m = self.template.with_params(theta);
        let gain = m.output_scaling.half_range;
        let sse: f64 = self
            .x
            .par_iter()
            .zip(self.y.par_iter())
            .with_min_len(1024)
            .map(|(x, y)| ((y - m.eval(x)) / gain).powi(2))
            .collect::<Vec<_>>()
            .iter()
            .sum();
        sse / self.y.len() as f64
    }

    fn normal_equations(&self, theta: &[f64]) -> (DMatrix<f64>, DVector<f64>, f64) {
        let m = self.template.with_params(theta);
        let gain = m.output_scaling.half_range;
        accumulate_rows(self.y.len(), m.n_params(), |k, row| {
            let yhat = m.eval_grad(&self.x[k], row, None);
            row.iter_mut().for_each(|v| *v /= gain);
            (self.y[k] - yhat) / gain
        })
    }
}

/// Levenberg-Marquardt fit of `model` to `(x, y)`, starting from its current
/// parameters. The loss is the mean squared error in the model's normalized
/// output units.
pub fn train_lm(model: &MlpModel, x: &[Vec<f64>], y: &[f64], opts: &TrainOptions) -> Result<TrainOutcome> {
    opts.validate()?;
    model.validate()?;
    ensure(!x.is_empty(), || "no training rows".into())?;
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: y.len(),
        });
    }
    if let Some(bad) = x.iter().find(|r| r.len() != model.n_in) {
        return Err(Error::Dimension {
            expected: model.n_in,
            got: bad.len(),
        });
    }
    ensure(x.iter().flatten().chain(y).all(|v| v.is_finite()), || {
        "training data contains non-finite values".into()
    })?;
    let problem = MlpRegression { template: model, x, y };
    let run = levenberg_marquardt(&problem, model.params(), opts);
    Ok(TrainOutcome {
        model: model.with_params(&run.theta),
        trace: run.trace,
        epochs: run.epochs,
        stop: run.stop,
    })
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub best: TrainOutcome,
    /// One entry per restart, in restart order.
    pub restarts: Vec<TrainOutcome>,
}

/// Fits scalings to the data, then trains `opts.restarts` randomly
/// initialized networks and keeps the lowest final loss (earliest on ties).
pub fn fit_mlp(n_hidden: usize, x: &[Vec<f64>], y: &[f64], opts: &TrainOptions) -> Result<FitOutcome> {
    opts.validate()?;
    ensure(n_hidden >= 1, || "hidden layer needs at least one unit".into())?;
    ensure(!x.is_empty(), || "no training rows".into())?;
    let n_in = x[0].len();
    let input_scaling = ScalingInfo::fit(x);
    let output_scaling = ColumnScale::fit(y.iter().copied());
    let restarts: Vec<TrainOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            let mut m = MlpModel::random(n_in, n_hidden, &mut rng);
            m.input_scaling = input_scaling.clone();
            m.output_scaling = output_scaling;
            train_lm(&m, x, y, opts)
        })
        .collect::<Result<_>>()?;
    let best = restarts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.final_loss().total_cmp(&b.1.final_loss()).then(a.0.cmp(&b.0)))
        .map(|(_, o)| o.clone())
        .unwrap();
    Ok(FitOutcome { best, restarts })
}
