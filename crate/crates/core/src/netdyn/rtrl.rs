use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::lm::{fit_mlp, levenberg_marquardt, reduce_normal, FitOutcome, LeastSquares, NormalAccumulator, TrainOptions, TrainOutcome};
use super::mlp::{MlpModel, StepModel};
use super::narx::{narx_regressors, narx_simulate_parallel, Inputs, NarxModel, NarxSpec};
use crate::error::{ensure, Error, Result};
use crate::signal::{Dataset, TimeSeries};

/// Free-run pass with forward sensitivities
/// `S(k) = df/dθ + (df/de(k-1)) · S(k-1)`, `S(0) = 0`.
///
/// `visit(k, prediction, S(k))` is called for every `k >= 1`. A clamped
/// output has zero sensitivity. Returns `(diverged, exploding)`.
fn sensitivity_pass<V>(
    net: &MlpModel,
    u: &Inputs<'_>,
    len: usize,
    e0: f64,
    guard: Option<f64>,
    bound: f64,
    mut visit: V,
) -> (bool, bool)
where
    V: FnMut(usize, f64, &[f64]),
{
    let p = net.n_params();
    let mut s_prev = vec![0.0; p];
    let mut s = vec![0.0; p];
    let mut dx = [0.0; NarxSpec::WIDTH];
    let mut e_prev = e0;
    let (mut diverged, mut exploding) = (false, false);
    for k in 1..len {
        let x = NarxSpec::row(u, k, e_prev);
        let mut y = net.eval_grad(&x, &mut s, Some(&mut dx));
        let feedback = dx[NarxSpec::FEEDBACK];
        let mut norm2 = 0.0;
        for (sk, sp) in s.iter_mut().zip(&s_prev) {
            *sk += feedback * sp;
            norm2 += *sk * *sk;
        }
        if let Some(g) = guard {
            if !(y.abs() <= g) {
                diverged = true;
                y = if y.is_nan() { 0.0 } else { y.clamp(-g, g) };
                s.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        if norm2.sqrt() > bound {
            exploding = true;
        }
        visit(k, y, &s);
        e_prev = y;
        std::mem::swap(&mut s, &mut s_prev);
    }
    (diverged, exploding)
}

/// Sum of squared free-run errors and its exact gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct RtrlGradient {
    /// `sum_k (e(k) - ê(k))²` over `k >= 1` of every cycle.
    pub sse: f64,
    /// `d sse / d params` in the network's flat parameter order.
    pub gradient: Vec<f64>,
    pub diverged: bool,
    pub exploding: bool,
}

/// Free-run loss and RTRL gradient over a set of cycles, each starting from
/// `ê(0) = e0` with zero sensitivity.
pub fn rtrl_gradient(net: &MlpModel, spec: &NarxSpec, cycles: &[TimeSeries], e0: f64, guard: Option<f64>) -> Result<RtrlGradient> {
    let mut out = RtrlGradient {
        sse: 0.0,
        gradient: vec![0.0; net.n_params()],
        diverged: false,
        exploding: false,
    };
    for ts in cycles {
        let u = spec.inputs(ts)?;
        let e = ts.require(&spec.error)?;
        let (d, x) = sensitivity_pass(net, &u, ts.len(), e0, guard, f64::INFINITY, |k, y, s| {
            let r = e[k] - y;
            out.sse += r * r;
            for (g, sv) in out.gradient.iter_mut().zip(s) {
                *g -= 2.0 * r * sv;
            }
        });
        out.diverged |= d;
        out.exploding |= x;
    }
    Ok(out)
}

struct FreeRunProblem<'a> {
    template: &'a MlpModel,
    cycles: Vec<(Inputs<'a>, &'a [f64])>,
    rows: usize,
    guard: Option<f64>,
    bound: f64,
    diverged: AtomicBool,
    exploding: AtomicBool,
}

impl LeastSquares for FreeRunProblem<'_> {
    fn n_params(&self) -> usize {
        self.template.n_params()
    }

    fn loss(&self, theta: &[f64]) -> f64 {
        let net = self.template.with_params(theta);
        let gain = net.output_scaling.half_range;
        let parts: Vec<f64> = self
            .cycles
            .par_iter()
            .map(|(u, e)| {
                let mut sse = 0.0;
                let mut e_prev = 0.0;
                for k in 1..e.len() {
                    let mut y = net.eval(&NarxSpec::row(u, k, e_prev));
                    if let Some(g) = self.guard {
                        if !(y.abs() <= g) {
                            y = if y.is_nan() { 0.0 } else { y.clamp(-g, g) };
                        }
                    }
                    sse += ((e[k] - y) / gain).powi(2);
                    e_prev = y;
                }
                sse
            })
            .collect();
        parts.iter().sum::<f64>() / self.rows as f64
    }

    fn normal_equations(&self, theta: &[f64]) -> (DMatrix<f64>, DVector<f64>, f64) {
        let net = self.template.with_params(theta);
        let gain = net.output_scaling.half_range;
        let p = net.n_params();
        let parts: Vec<_> = self
            .cycles
            .par_iter()
            .map(|(u, e)| {
                let mut acc = NormalAccumulator::new(p);
                let mut row = vec![0.0; p];
                let (d, x) = sensitivity_pass(&net, u, e.len(), 0.0, self.guard, self.bound, |k, y, s| {
                    for (r, sv) in row.iter_mut().zip(s) {
                        *r = sv / gain;
                    }
                    acc.push(&row, (e[k] - y) / gain);
                });
                if d {
                    self.diverged.store(true, Ordering::Relaxed);
                }
                if x {
                    self.exploding.store(true, Ordering::Relaxed);
                }
                acc.finish()
            })
            .collect();
        let (jtj, jtr, sse) = reduce_normal(p, parts);
        (jtj, jtr, sse / self.rows as f64)
    }
}

#[derive(Debug, Clone)]
pub struct RtrlOutcome {
    pub train: TrainOutcome,
    /// Some run clamped at the divergence guard.
    pub diverged: bool,
    /// Some sensitivity norm exceeded `opts.sensitivity_bound`.
    pub exploding: bool,
}

/// Parallel-mode training: damped Gauss-Newton on the free-run residuals
/// of every cycle with RTRL sensitivities as the Jacobian. Each cycle starts
/// from `ê(0) = 0`. The loss is the free-run MSE in normalized output units.
pub fn train_rtrl(net: &MlpModel, spec: &NarxSpec, data: &Dataset, opts: &TrainOptions) -> Result<RtrlOutcome> {
    opts.validate()?;
    net.validate()?;
    if net.n_in != NarxSpec::WIDTH {
        return Err(Error::Dimension {
            expected: NarxSpec::WIDTH,
            got: net.n_in,
        });
    }
    ensure(!data.is_empty(), || "no training cycles".into())?;
    let mut cycles = Vec::with_capacity(data.len());
    let mut max_err = 0.0f64;
    for c in data.cycles() {
        ensure(c.series.len() >= 3, || {
            format!("cycle `{}` is too short for free-run training", c.name)
        })?;
        let e = c.series.require(&spec.error)?;
        max_err = e.iter().fold(max_err, |m, v| m.max(v.abs()));
        cycles.push((spec.inputs(&c.series)?, e));
    }
    let rows = cycles.iter().map(|(_, e)| e.len() - 1).sum();
    let problem = FreeRunProblem {
        template: net,
        cycles,
        rows,
        guard: (max_err > 0.0).then_some(10.0 * max_err),
        bound: opts.sensitivity_bound,
        diverged: AtomicBool::new(false),
        exploding: AtomicBool::new(false),
    };
    let run = levenberg_marquardt(&problem, net.params(), opts);
    Ok(RtrlOutcome {
        train: TrainOutcome {
            model: net.with_params(&run.theta),
            trace: run.trace,
            epochs: run.epochs,
            stop: run.stop,
        },
        diverged: problem.diverged.load(Ordering::Relaxed),
        exploding: problem.exploding.load(Ordering::Relaxed),
    })
}

/// Free-run mean squared error over every cycle of `data`, starting each
/// from `ê(0) = 0`. Infinite when a run leaves the finite range.
pub fn free_run_mse<M: StepModel>(model: &M, spec: &NarxSpec, data: &Dataset) -> Result<f64> {
    let (mut sse, mut n) = (0.0, 0usize);
    for c in data.cycles() {
        let run = narx_simulate_parallel(model, spec, &c.series, 0.0, None)?;
        let e = c.series.require(&spec.error)?;
        sse += e[1..].iter().zip(&run.error[1..]).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        n += e.len() - 1;
    }
    let mse = sse / n.max(1) as f64;
    Ok(if mse.is_finite() { mse } else { f64::INFINITY })
}

/// Full error-model fit: series-parallel LM with restarts on every
/// `sp_stride`-th regressor row, then RTRL refinement on the whole cycles.
/// RTRL starts from the restart with the lowest free-run training error,
/// which is not necessarily the one with the lowest one-step loss.
pub fn fit_narx(
    data: &Dataset,
    spec: &NarxSpec,
    n_hidden: usize,
    sp_stride: usize,
    sp_opts: &TrainOptions,
    rtrl_opts: &TrainOptions,
) -> Result<(NarxModel, FitOutcome, RtrlOutcome)> {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for c in data.cycles() {
        let (cx, cy) = narx_regressors(spec, &c.series)?;
        x.extend(cx.into_iter().step_by(sp_stride.max(1)));
        y.extend(cy.into_iter().step_by(sp_stride.max(1)));
    }
    let sp = fit_mlp(n_hidden, &x, &y, sp_opts)?;
    let mut start = &sp.best.model;
    let mut best = f64::INFINITY;
    for r in &sp.restarts {
        let mse = free_run_mse(&r.model, spec, data)?;
        if mse < best {
            best = mse;
            start = &r.model;
        }
    }
    let rtrl = train_rtrl(start, spec, data, rtrl_opts)?;
    let all_errors = data
        .cycles()
        .iter()
        .flat_map(|c| c.series.require(&spec.error).unwrap().iter().copied());
    let model = NarxModel::with_training_guard(rtrl.train.model.clone(), spec.clone(), all_errors);
    Ok((model, sp, rtrl))
}
