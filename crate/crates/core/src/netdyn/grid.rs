use rayon::prelude::*;

use super::lm::{fit_mlp, TrainOptions};
use super::narx::{narx_regressors, narx_simulate_parallel, NarxSpec};
use crate::error::{ensure, Result};
use crate::signal::{space_filling_subset, Dataset};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best_hidden: usize,
    /// `(hidden units, free-run validation RMSE)` in candidate order;
    /// `None` marks a candidate whose training or simulation failed.
    pub scores: Vec<(usize, Option<f64>)>,
}

/// Picks the hidden-layer size with the lowest free-run validation RMSE.
///
/// Every candidate is trained series-parallel on the same maximin subset of
/// `subset_size` regressor rows from `train`. Ties go to the smaller network.
pub fn grid_search_neurons(
    train: &Dataset,
    validation: &Dataset,
    spec: &NarxSpec,
    subset_size: usize,
    candidates: &[usize],
    opts: &TrainOptions,
) -> Result<GridSearchResult> {
    ensure(!candidates.is_empty(), || "no hidden-size candidates".into())?;
    ensure(!validation.is_empty(), || "validation set is empty".into())?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for c in train.cycles() {
        let (cx, cy) = narx_regressors(spec, &c.series)?;
        x.extend(cx);
        y.extend(cy);
    }
    let n = subset_size.min(x.len());
    let idx = space_filling_subset(&x, n)?;
    let xs: Vec<Vec<f64>> = idx.iter().map(|&k| x[k].clone()).collect();
    let ys: Vec<f64> = idx.iter().map(|&k| y[k]).collect();

    let scores: Vec<(usize, Option<f64>)> = candidates
        .par_iter()
        .map(|&h| {
            let score = (|| -> Result<f64> {
                let fit = fit_mlp(h, &xs, &ys, opts)?;
                let (mut sse, mut count) = (0.0, 0usize);
                for c in validation.cycles() {
                    let run = narx_simulate_parallel(&fit.best.model, spec, &c.series, 0.0, None)?;
                    let e = c.series.require(&spec.error)?;
                    for k in 1..e.len() {
                        sse += (e[k] - run.error[k]).powi(2);
                    }
                    count += e.len() - 1;
                }
                Ok((sse / count.max(1) as f64).sqrt())
            })();
            (h, score.ok().filter(|s| s.is_finite()))
        })
        .collect();

    let best_hidden = scores
        .iter()
        .filter_map(|(h, s)| s.map(|s| (*h, s)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(h, _)| h)
        .ok_or_else(|| crate::Error::Numerical("every grid-search candidate failed".into()))?;
    Ok(GridSearchResult { best_hidden, scores })
}
