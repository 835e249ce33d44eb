//! Synthetic two-input regression study: an overfitted network is compared
//! with the same network limited to a hull or an OCSVM region.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::halton::halton_cover;
use crate::envelope::{gate, hull_contains, quickhull_2d, tune_ocsvm, GateConfig, GateVariant, HullModel, OcsvmModel};
use crate::error::{ensure, Error, Result};
use crate::netdyn::{fit_mlp, MlpModel, TrainOptions};
use crate::signal::awgn;

/// Random sum of sine-modulated monomials on `[0, 1]^2`.
///
/// Each term has total degree drawn uniformly from `0..=2*avg_exponent`
/// (so the mean is `avg_exponent`), split uniformly between `x1` and `x2`.
/// Coefficients are normal with standard deviation `coef_std`; frequencies
/// and phases are uniform in their ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolySpec {
    pub n_terms: usize,
    pub avg_exponent: u32,
    pub sine: bool,
    pub omega_range: [f64; 2],
    pub phase_range: [f64; 2],
    pub coef_std: f64,
    pub seed: u64,
}

impl Default for PolySpec {
    fn default() -> Self {
        PolySpec {
            n_terms: 30,
            avg_exponent: 5,
            sine: true,
            omega_range: [4.0, 16.0],
            phase_range: [0.0, std::f64::consts::TAU],
            coef_std: 2.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coef: f64,
    pub powers: [u32; 2],
    /// `None` leaves the monomial unmodulated.
    pub sine: Option<(f64, f64)>,
}

impl PolyTerm {
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let m = self.coef * x1.powi(self.powers[0] as i32) * x2.powi(self.powers[1] as i32);
        match self.sine {
            Some((omega, phase)) => m * (omega * (x1 + x2) + phase).sin(),
            None => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<PolyTerm>,
}

impl Polynomial {
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x1, x2)).sum()
    }
}

pub fn gen_polynomial(spec: &PolySpec) -> Result<Polynomial> {
    ensure(spec.n_terms >= 1, || "a polynomial needs at least one term".into())?;
    ensure(spec.omega_range[0] <= spec.omega_range[1] && spec.phase_range[0] <= spec.phase_range[1], || {
        "frequency and phase ranges must be ordered".into()
    })?;
    let coef = Normal::new(0.0, spec.coef_std).map_err(|e| Error::Precondition(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let terms = (0..spec.n_terms)
        .map(|_| {
            let degree = rng.random_range(0..=2 * spec.avg_exponent);
            let p1 = rng.random_range(0..=degree);
            let c = coef.sample(&mut rng);
            let omega = rng.random_range(spec.omega_range[0]..=spec.omega_range[1]);
            let phase = rng.random_range(spec.phase_range[0]..=spec.phase_range[1]);
            PolyTerm {
                coef: c,
                powers: [p1, degree - p1],
                sine: spec.sine.then_some((omega, phase)),
            }
        })
        .collect();
    Ok(Polynomial { terms })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolyExperimentConfig {
    pub seeds: Vec<u64>,
    pub poly: PolySpec,
    pub train_points: usize,
    /// Training inputs are uniform in `[lo, hi]^2`.
    pub train_box: [f64; 2],
    pub test_points: usize,
    /// Applied to inputs and outputs; `inf` disables noise.
    pub snr_db: f64,
    pub hidden: usize,
    pub train: TrainOptions,
    pub nu_grid: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub probe_count: usize,
    pub ocsvm_tol: f64,
    /// Added to the tuned OCSVM bias to widen its region.
    pub bias_offset: f64,
    /// Gate applied with the OCSVM score; the hull always gates hard.
    pub gate: GateConfig,
}

impl Default for PolyExperimentConfig {
    fn default() -> Self {
        PolyExperimentConfig {
            seeds: (0..100).collect(),
            poly: PolySpec::default(),
            train_points: 20,
            train_box: [0.15, 0.85],
            test_points: 20_000,
            snr_db: 40.0,
            hidden: 10,
            train: TrainOptions::default(),
            nu_grid: vec![0.05, 0.1, 0.2, 0.3, 0.5],
            sigma_grid: vec![0.1, 0.2, 0.3, 0.5, 0.8],
            probe_count: 4000,
            ocsvm_tol: 1e-8,
            bias_offset: 0.03,
            gate: GateConfig {
                gamma: 2.0,
                variant: GateVariant::Hard,
            },
        }
    }
}

impl PolyExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(!self.seeds.is_empty(), || "no seeds".into())?;
        ensure(self.train_points >= 3 && self.test_points >= 1, || "point counts must be positive".into())?;
        ensure(
            0.0 <= self.train_box[0] && self.train_box[0] < self.train_box[1] && self.train_box[1] <= 1.0,
            || format!("train_box {:?} must be an interval inside [0, 1]", self.train_box),
        )?;
        ensure(self.hidden >= 1, || "hidden must be positive".into())?;
        self.gate.validate()?;
        self.train.validate()
    }
}

pub const POLY_VARIANTS: [&str; 3] = ["fnn", "fnn_ocsvm", "fnn_hull"];

/// Outcome for one seed: RMSE per variant in `POLY_VARIANTS` order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySeedResult {
    pub seed: u64,
    pub rmse: [f64; 3],
    pub nu: f64,
    pub sigma: f64,
    pub hull_area_frac: f64,
    pub ocsvm_area_frac: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyReport {
    pub seeds: Vec<PolySeedResult>,
    /// Seeds that failed, with the error kind and message.
    pub failed: Vec<(u64, String)>,
    /// Mean RMSE per variant over the successful seeds.
    pub mean: [f64; 3],
}

/// Pieces of one seed's run, kept for plotting and inspection.
#[derive(Debug, Clone)]
pub struct PolyRun {
    pub poly: Polynomial,
    pub train_x: Vec<Vec<f64>>,
    pub train_y: Vec<f64>,
    pub net: MlpModel,
    pub hull: HullModel,
    pub ocsvm: OcsvmModel,
    pub result: PolySeedResult,
}

fn rmse(pred: impl Iterator<Item = f64>, truth: &[f64]) -> f64 {
    let sse: f64 = pred.zip(truth).map(|(p, t)| (p - t).powi(2)).sum();
    (sse / truth.len() as f64).sqrt()
}

pub fn run_poly_seed(config: &PolyExperimentConfig, seed: u64) -> Result<PolyRun> {
    let poly = gen_polynomial(&PolySpec {
        seed,
        ..config.poly.clone()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_0F_7A1A);
    let [lo, hi] = config.train_box;
    let clean_x: Vec<[f64; 2]> = (0..config.train_points)
        .map(|_| [rng.random_range(lo..=hi), rng.random_range(lo..=hi)])
        .collect();
    let clean_y: Vec<f64> = clean_x.iter().map(|p| poly.eval(p[0], p[1])).collect();
    let x1: Vec<f64> = clean_x.iter().map(|p| p[0]).collect();
    let x2: Vec<f64> = clean_x.iter().map(|p| p[1]).collect();
    let (x1, x2, train_y) = if config.snr_db.is_infinite() {
        (x1, x2, clean_y)
    } else {
        (
            awgn(&x1, config.snr_db, &mut rng)?,
            awgn(&x2, config.snr_db, &mut rng)?,
            awgn(&clean_y, config.snr_db, &mut rng)?,
        )
    };
    let train_x: Vec<Vec<f64>> = x1.iter().zip(&x2).map(|(a, b)| vec![*a, *b]).collect();

    let fit = fit_mlp(
        config.hidden,
        &train_x,
        &train_y,
        &TrainOptions {
            seed: config.train.seed.wrapping_add(seed.wrapping_mul(1000)),
            ..config.train.clone()
        },
    )?;
    let net = fit.best.model;
    let hull = quickhull_2d(&train_x)?;
    let tuned = tune_ocsvm(
        &train_x,
        &config.nu_grid,
        &config.sigma_grid,
        &hull,
        config.probe_count,
        seed,
        config.ocsvm_tol,
    )?;
    let ocsvm = tuned.model.with_offset(config.bias_offset);

    let test = halton_cover(config.test_points, 2, seed);
    let truth: Vec<f64> = test.iter().map(|p| poly.eval(p[0], p[1])).collect();
    let scored: Vec<(f64, f64, bool)> = test
        .par_iter()
        .map(|p| {
            let inside_hull = hull_contains(&hull, p).expect("dimension checked");
            (net.eval(p), ocsvm.score_unchecked(p), inside_hull)
        })
        .collect();
    let n = test.len() as f64;
    let result = PolySeedResult {
        seed,
        rmse: [
            rmse(scored.iter().map(|s| s.0), &truth),
            rmse(scored.iter().map(|s| gate(s.0, s.1, &config.gate)), &truth),
            rmse(scored.iter().map(|s| if s.2 { s.0 } else { 0.0 }), &truth),
        ],
        nu: tuned.nu,
        sigma: tuned.sigma,
        hull_area_frac: scored.iter().filter(|s| s.2).count() as f64 / n,
        ocsvm_area_frac: scored.iter().filter(|s| s.1 > 0.0).count() as f64 / n,
    };
    Ok(PolyRun {
        poly,
        train_x,
        train_y,
        net,
        hull,
        ocsvm,
        result,
    })
}

/// Runs every seed. Failed seeds are listed and left out of the means.
pub fn run_poly_experiment(config: &PolyExperimentConfig) -> Result<PolyReport> {
    config.validate()?;
    let runs: Vec<(u64, Result<PolyRun>)> = config
        .seeds
        .par_iter()
        .map(|&s| (s, run_poly_seed(config, s)))
        .collect();
    let mut seeds = Vec::new();
    let mut failed = Vec::new();
    for (s, r) in runs {
        match r {
            Ok(run) => seeds.push(run.result),
            Err(e) => failed.push((s, format!("{}: {e}", e.kind()))),
        }
    }
    if seeds.is_empty() {
        return Err(Error::Infeasible(format!("all {} seeds failed", failed.len())));
    }
    let mut mean = [0.0; 3];
    for r in &seeds {
        for v in 0..3 {
            mean[v] += r.rmse[v] / seeds.len() as f64;
        }
    }
    Ok(PolyReport { seeds, failed, mean })
}

/// CSV with one row per seed and variant, then `mean` rows.
pub fn write_poly_csv<W: std::io::Write>(report: &PolyReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let wrap = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["seed", "variant", "rmse", "nu", "sigma", "hull_area", "ocsvm_area"])
        .map_err(wrap)?;
    for r in &report.seeds {
        for (v, name) in POLY_VARIANTS.iter().enumerate() {
            w.write_record([
                r.seed.to_string(),
                name.to_string(),
                r.rmse[v].to_string(),
                r.nu.to_string(),
                r.sigma.to_string(),
                r.hull_area_frac.to_string(),
                r.ocsvm_area_frac.to_string(),
            ])
            .map_err(wrap)?;
        }
    }
    for (v, name) in POLY_VARIANTS.iter().enumerate() {
        w.write_record(["mean", name, &report.mean[v].to_string(), "", "", "", ""])
            .map_err(wrap)?;
    }
    for (s, msg) in &report.failed {
        w.write_record([s.to_string().as_str(), "failed", "", "", "", "", msg.as_str()])
            .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}
