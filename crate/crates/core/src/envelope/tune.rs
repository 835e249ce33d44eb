//! Grid search of OCSVM hyperparameters against a reference hull.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hull::{hull_contains, HullModel};
use super::ocsvm::{train_ocsvm, OcsvmModel};
use crate::error::{ensure, Error, Result};

/// One cell of the confusion table. Rates are `None` when training failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneCell {
    pub nu: f64,
    pub sigma: f64,
    pub fpr: Option<f64>,
    pub fnr: Option<f64>,
}

impl TuneCell {
    pub fn total(&self) -> Option<f64> {
        Some(self.fpr? + self.fnr?)
    }
}

#[derive(Debug, Clone)]
pub struct TuneResult {
    pub nu: f64,
    pub sigma: f64,
    pub model: OcsvmModel,
    pub table: Vec<TuneCell>,
    pub probes_inside: usize,
    pub probes_outside: usize,
}

/// Uniform probes over the bounding box of `x`, seeded.
pub fn bounding_box_probes(x: &[Vec<f64>], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let d = x[0].len();
    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..d)
        .map(|j| {
            x.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[j]), hi.max(p[j])))
        })
        .unzip();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..d).map(|j| lo[j] + (hi[j] - lo[j]) * rng.random::<f64>()).collect())
        .collect()
}

/// Rates of an accept/reject classifier against hull membership labels.
/// Returns `(fpr, fnr)`; an empty class gives a rate of 0.
pub fn confusion_rates(inside_hull: &[bool], accepted: &[bool]) -> (f64, f64) {
    let (mut fp, mut out, mut fneg, mut inn) = (0usize, 0usize, 0usize, 0usize);
    for (&h, &a) in inside_hull.iter().zip(accepted) {
        if h {
            inn += 1;
            fneg += usize::from(!a);
        } else {
            out += 1;
            fp += usize::from(a);
        }
    }
    let rate = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    (rate(fp, out), rate(fneg, inn))
}

/// Trains one OCSVM per `(nu, sigma)` cell, labels uniform probes with the
/// reference hull and keeps the cell with the smallest FPR + FNR.
/// Ties go to the smaller sigma, then the larger nu.
pub fn tune_ocsvm(
    x: &[Vec<f64>],
    nu_grid: &[f64],
    sigma_grid: &[f64],
    reference: &HullModel,
    probe_count: usize,
    seed: u64,
    tol: f64,
) -> Result<TuneResult> {
    ensure(!nu_grid.is_empty() && !sigma_grid.is_empty(), || "tuning grids must be non-empty".into())?;
    ensure(!x.is_empty(), || "no training points".into())?;
    ensure(probe_count > 0, || "probe_count must be positive".into())?;
    let d = reference.dim();
    if x[0].len() != d {
        return Err(Error::Dimension { expected: d, got: x[0].len() });
    }

    let probes = bounding_box_probes(x, probe_count, seed);
    let labels = probes
        .par_iter()
        .map(|p| hull_contains(reference, p))
        .collect::<Result<Vec<bool>>>()?;
    let probes_inside = labels.iter().filter(|&&b| b).count();
    if probes_inside == 0 {
        return Err(Error::Degenerate("reference hull contains none of the probes".into()));
    }

    let cells: Vec<(f64, f64)> = sigma_grid
        .iter()
        .flat_map(|&s| nu_grid.iter().map(move |&n| (n, s)))
        .collect();
    let fitted: Vec<(TuneCell, Option<OcsvmModel>)> = cells
        .par_iter()
        .map(|&(nu, sigma)| match train_ocsvm(x, nu, sigma, tol) {
            Ok(fit) => {
                let accepted: Vec<bool> = probes.iter().map(|p| fit.model.score_unchecked(p) > 0.0).collect();
                let (fpr, fnr) = confusion_rates(&labels, &accepted);
                let cell = TuneCell { nu, sigma, fpr: Some(fpr), fnr: Some(fnr) };
                (cell, Some(fit.model))
            }
            Err(_) => (TuneCell { nu, sigma, fpr: None, fnr: None }, None),
        })
        .collect();

    let best = fitted
        .iter()
        .enumerate()
        .filter_map(|(i, (c, _))| c.total().map(|t| (i, t, c)))
        .min_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then(a.2.sigma.total_cmp(&b.2.sigma))
                .then(b.2.nu.total_cmp(&a.2.nu))
        })
        .map(|(i, _, _)| i)
        .ok_or_else(|| Error::Infeasible("no grid cell produced a model".into()))?;

    let model = fitted[best].1.clone().expect("selected cell has a model");
    Ok(TuneResult {
        nu: fitted[best].0.nu,
        sigma: fitted[best].0.sigma,
        model,
        table: fitted.into_iter().map(|(c, _)| c).collect(),
        probes_inside,
        probes_outside: probe_count - probes_inside,
    })
}
