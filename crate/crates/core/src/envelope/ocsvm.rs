//! One-class SVM trained by pairwise (SMO) updates on the dual
//!
//! ```text
//! min ½ αᵀKα   s.t.  Σα = 1,  0 ≤ α ≤ 1/(νl)
//! ```
//!
//! with a Gaussian kernel on min-max scaled inputs. The decision function is
//! `f(x) = Σ αᵢ K(x, svᵢ) - (b - offset)`; positive means inside.

use serde::{Deserialize, Serialize};

use super::kernel::rbf;
use crate::error::{ensure, Error, Result};
use crate::signal::ScalingInfo;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcsvmModel {
    /// Retained training points (α > 0), in scaled coordinates.
    pub support_vectors: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub bias_b: f64,
    pub sigma: f64,
    pub nu: f64,
    /// Additive score shift; positive values widen the boundary.
    pub bias_offset: f64,
    pub scaling: ScalingInfo,
    /// Training set size `l`.
    pub n_train: usize,
}

impl OcsvmModel {
    pub fn dim(&self) -> usize {
        self.scaling.width()
    }

    /// Upper bound on each multiplier, `1/(νl)`.
    pub fn alpha_cap(&self) -> f64 {
        1.0 / (self.nu * self.n_train as f64)
    }

    /// Signed boundary score of a raw (unscaled) point.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.score_unchecked(x))
    }

    pub(crate) fn score_unchecked(&self, x: &[f64]) -> f64 {
        let xs = self.scaling.apply(x);
        self.score_scaled(&xs)
    }

    /// Score of a point already in the model's scaled coordinates.
    pub fn score_scaled(&self, xs: &[f64]) -> f64 {
        let g = 1.0 / (2.0 * self.sigma * self.sigma);
        let s: f64 = self
            .support_vectors
            .iter()
            .zip(&self.alphas)
            .map(|(sv, a)| a * rbf(xs, sv, g))
            .sum();
        s - (self.bias_b - self.bias_offset)
    }

    pub fn with_offset(&self, bias_offset: f64) -> Self {
        OcsvmModel {
            bias_offset,
            ..self.clone()
        }
    }
}

/// Training result with solver diagnostics.
#[derive(Debug, Clone)]
pub struct OcsvmFit {
    pub model: OcsvmModel,
    /// Multipliers for every training point, in input order.
    pub alpha: Vec<f64>,
    pub objective: f64,
    /// `max_{α>0} G - min_{α<C} G` at exit, with `G = Kα`.
    pub kkt_residual: f64,
    pub iterations: usize,
}

fn kernel_matrix(x: &[Vec<f64>], sigma: f64) -> Vec<f64> {
    let l = x.len();
    let g = 1.0 / (2.0 * sigma * sigma);
    let mut k = vec![0.0; l * l];
    for i in 0..l {
        k[i * l + i] = 1.0;
        for j in 0..i {
            let v = rbf(&x[i], &x[j], g);
            k[i * l + j] = v;
            k[j * l + i] = v;
        }
    }
    k
}

/// Trains a one-class SVM on `x` (rows are points).
///
/// Requires `l ≥ 2`, `ν ∈ (0, 1]` and `νl ≥ 1`. Stops once the KKT
/// residual drops below `tol`.
pub fn train_ocsvm(x: &[Vec<f64>], nu: f64, sigma: f64, tol: f64) -> Result<OcsvmFit> {
    let l = x.len();
    ensure(l >= 2, || format!("need at least two training points, got {l}"))?;
    ensure(nu > 0.0 && nu <= 1.0, || format!("nu must lie in (0, 1], got {nu}"))?;
    ensure(sigma > 0.0, || format!("sigma must be positive, got {sigma}"))?;
    ensure(tol > 0.0, || "tolerance must be positive".into())?;
    let dim = x[0].len();
    if let Some(bad) = x.iter().find(|r| r.len() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            got: bad.len(),
        });
    }
    if nu * (l as f64) < 1.0 - 1e-12 {
        return Err(Error::Infeasible(format!(
            "nu·l = {} < 1: the box [0, 1/(nu·l)] cannot hold a unit sum",
            nu * l as f64
        )));
    }

    let scaling = ScalingInfo::fit(x);
    let xs: Vec<Vec<f64>> = x.iter().map(|r| scaling.apply(r)).collect();
    let k = kernel_matrix(&xs, sigma);
    let cap = (1.0 / (nu * l as f64)).min(1.0);

    // feasible start: fill multipliers to the cap in index order
    let mut alpha = vec![0.0; l];
    let mut left = 1.0;
    for a in alpha.iter_mut() {
        let v = cap.min(left);
        *a = v;
        left -= v;
        if left <= 0.0 {
            break;
        }
    }
    let mut grad = vec![0.0; l];
    for (i, a) in alpha.iter().enumerate() {
        if *a != 0.0 {
            for j in 0..l {
                grad[j] += a * k[i * l + j];
            }
        }
    }

    let max_iter = 100_000usize.max(200 * l);
    let mut iterations = 0;
    let residual = loop {
        // most violating "up" index: smallest gradient among α < C
        let mut up = usize::MAX;
        let mut g_up = f64::INFINITY;
        let mut g_down_max = f64::NEG_INFINITY;
        for t in 0..l {
            if alpha[t] < cap && grad[t] < g_up {
                g_up = grad[t];
                up = t;
            }
            if alpha[t] > 0.0 && grad[t] > g_down_max {
                g_down_max = grad[t];
            }
        }
        let residual = g_down_max - g_up;
        if up == usize::MAX || residual < tol {
            break residual.max(0.0);
        }
        if iterations >= max_iter {
            return Err(Error::NotConverged { iterations, residual });
        }
        // second-order choice of the "down" index
        let mut down = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for t in 0..l {
            if alpha[t] > 0.0 && grad[t] > g_up {
                let b = grad[t] - g_up;
                let eta = (k[up * l + up] + k[t * l + t] - 2.0 * k[up * l + t]).max(1e-12);
                let gain = b * b / eta;
                if gain > best_gain {
                    best_gain = gain;
                    down = t;
                }
            }
        }
        let (i, j) = (up, down);
        let eta = (k[i * l + i] + k[j * l + j] - 2.0 * k[i * l + j]).max(1e-12);
        let room_i = cap - alpha[i];
        let step = ((grad[j] - grad[i]) / eta).min(room_i).min(alpha[j]);
        if step == room_i {
            alpha[i] = cap;
        } else {
            alpha[i] += step;
        }
        if step == alpha[j] {
            alpha[j] = 0.0;
        } else {
            alpha[j] -= step;
        }
        let (ri, rj) = (i * l, j * l);
        for t in 0..l {
            grad[t] += step * (k[ri + t] - k[rj + t]);
        }
        iterations += 1;
    };

    let objective = 0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * g).sum::<f64>();

    // b: mean gradient over margin SVs, else the middle of the feasible range
    let margin: Vec<f64> = (0..l).filter(|&t| alpha[t] > 0.0 && alpha[t] < cap).map(|t| grad[t]).collect();
    let bias_b = if !margin.is_empty() {
        margin.iter().sum::<f64>() / margin.len() as f64
    } else {
        let lower = (0..l).filter(|&t| alpha[t] > 0.0).map(|t| grad[t]).fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..l).filter(|&t| alpha[t] == 0.0).map(|t| grad[t]).fold(f64::INFINITY, f64::min);
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    };

    let (support_vectors, alphas): (Vec<_>, Vec<_>) = xs
        .into_iter()
        .zip(&alpha)
        .filter(|(_, a)| **a > 0.0)
        .map(|(x, a)| (x, *a))
        .unzip();
    Ok(OcsvmFit {
        model: OcsvmModel {
            support_vectors,
            alphas,
            bias_b,
            sigma,
            nu,
            bias_offset: 0.0,
            scaling,
            n_train: l,
        },
        alpha,
        objective,
        kkt_residual: residual,
        iterations,
    })
}
