//! Battery study on the synthetic plant: analytical model alone, with the
//! raw error model, and with the error model gated by an OCSVM or a hull.

use serde::{Deserialize, Serialize};

use super::cycles::DriveProfile;
use crate::compose::{compute_error_channel, evaluate, hybrid_simulate, CycleReport, Envelope, HybridModel, HybridRun};
use crate::envelope::{hull_3d, hull_contains, train_ocsvm, GateConfig, GateVariant, HullModel, OcsvmModel};
use crate::error::{ensure, Error, Result};
use crate::netdyn::{fit_narx, grid_search_neurons, narx_regressors, GridSearchResult, NarxModel, NarxSpec, TrainOptions};
use crate::plant::{simulate_am, simulate_plant, EquivCircuitParams, PlantConfig};
use crate::signal::{antialias_downsample, channel, space_filling_subset, Cycle, Dataset};

pub const BATTERY_VARIANTS: [&str; 4] = ["am", "ecm", "ecm_ocsvm", "ecm_hull"];

/// Regressor coordinates `i(k), T(k), soc(k)` used by the hull.
pub const HULL_DIMS: [usize; 3] = [0, 2, 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryExperimentConfig {
    /// Mixed into every profile and noise seed.
    pub seed: u64,
    pub plant: PlantConfig,
    /// Analytical model used for compensation.
    pub am: EquivCircuitParams,
    pub plant_rate_hz: f64,
    pub model_rate_hz: f64,
    pub cutoff_hz: f64,
    pub train: Vec<DriveProfile>,
    /// Free-run scoring of the hidden-size candidates.
    pub grid_validation: Vec<DriveProfile>,
    /// In-distribution validation cycles.
    pub validation: Vec<DriveProfile>,
    /// Pool from which the edge cycles are selected.
    pub edge_candidates: Vec<DriveProfile>,
    pub edge_count: usize,
    pub hidden_candidates: Vec<usize>,
    pub grid_subset: usize,
    pub sp_stride: usize,
    pub sp_train: TrainOptions,
    pub rtrl_train: TrainOptions,
    pub ocsvm_subset: usize,
    pub nu: f64,
    pub sigma: f64,
    pub ocsvm_tol: f64,
    pub bias_offset: f64,
    pub gate: GateConfig,
    pub hull_gate: GateVariant,
    /// Multiplies gamma by `nu * l`, i.e. applies it to scores whose
    /// multipliers sum to `nu * l` rather than 1.
    #[serde(default)]
    pub gamma_on_nu_l_scale: bool,
}

fn profile(name: &str, seed: u64, max_a: f64, temp: [f64; 2], soc0: f64) -> DriveProfile {
    DriveProfile {
        name: name.into(),
        duration_s: 900.0,
        max_current_a: max_a,
        current_offset_a: 0.0,
        mean_pulse_s: 8.0,
        smoothing_s: 0.5,
        temp_c: temp,
        temp_ripple_c: 0.5,
        soc0,
        soc_target: soc0,
        soc_pull: 2.0,
        concentration: 1.0,
        seed,
    }
}

impl Default for BatteryExperimentConfig {
    fn default() -> Self {
        // Training stays near equilibrium: |i| <= 1C, 20-30 °C, mid soc.
        let train = (0..8)
            .map(|k| {
                let t0 = 20.0 + 1.25 * ((3 * k) % 8) as f64;
                profile(&format!("train{k:02}"), 100 + k, 4.0, [t0, t0 + 3.0], 0.45 + 0.04 * k as f64)
            })
            .collect();
        let grid_validation = (0..2)
            .map(|k| profile(&format!("gridval{k}"), 200 + k, 4.0, [22.0 + 3.0 * k as f64, 26.0], 0.55))
            .collect();
        let validation = (0..3)
            .map(|k| {
                profile(
                    &format!("val{k}"),
                    300 + k,
                    3.5,
                    [21.0 + 2.0 * k as f64, 25.0 + 2.0 * k as f64],
                    0.5 + 0.08 * k as f64,
                )
            })
            .collect();
        let edge_candidates = vec![
            profile("edge_hot", 400, 4.0, [34.0, 40.0], 0.6),
            profile("edge_warm", 401, 4.0, [29.0, 36.0], 0.6),
            profile("edge_cool", 402, 4.0, [15.0, 23.0], 0.55),
            profile("edge_cold", 403, 4.0, [8.0, 16.0], 0.5),
            profile("edge_high_current", 404, 7.0, [22.0, 28.0], 0.6),
            profile("edge_low_soc", 405, 4.0, [22.0, 27.0], 0.35),
            profile("edge_high_soc", 406, 4.0, [22.0, 27.0], 0.82),
            profile("edge_mixed", 407, 5.5, [16.0, 24.0], 0.5),
        ];
        BatteryExperimentConfig {
            seed: 0,
            plant: PlantConfig::desk_default(),
            am: EquivCircuitParams::desk_default(),
            plant_rate_hz: 100.0,
            model_rate_hz: 20.0,
            cutoff_hz: 8.0,
            train,
            grid_validation,
            validation,
            edge_candidates,
            edge_count: 5,
            hidden_candidates: vec![2, 4, 6, 8],
            grid_subset: 1500,
            sp_stride: 4,
            sp_train: TrainOptions::default(),
            rtrl_train: TrainOptions {
                max_epochs: 40,
                restarts: 1,
                ..TrainOptions::default()
            },
            ocsvm_subset: 400,
            nu: 0.05,
            sigma: 0.3,
            ocsvm_tol: 1e-8,
            bias_offset: 0.0,
            gate: GateConfig::default(),
            hull_gate: GateVariant::Hard,
            gamma_on_nu_l_scale: true,
        }
    }
}

impl BatteryExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.am.validate()?;
        ensure(!self.train.is_empty() && !self.grid_validation.is_empty(), || {
            "training and grid-validation profiles are required".into()
        })?;
        ensure(!self.validation.is_empty(), || "no validation profiles".into())?;
        ensure(self.edge_count <= self.edge_candidates.len(), || {
            format!(
                "edge_count {} exceeds the {} candidates",
                self.edge_count,
                self.edge_candidates.len()
            )
        })?;
        self.gate.validate()?;
        self.sp_train.validate()?;
        self.rtrl_train.validate()
    }
}

/// Plant run at the plant rate, decimated to the model rate, with the
/// analytical model evaluated at the model rate. The soc channel holds the
/// analytical model's soc so the regressor matches free simulation.
pub fn prepare_cycle(config: &BatteryExperimentConfig, profile: &DriveProfile, noise_seed: u64) -> Result<Cycle> {
    let p = DriveProfile {
        seed: profile.seed.wrapping_add(config.seed.wrapping_mul(7919)),
        ..profile.clone()
    };
    let drive = p.generate(config.plant_rate_hz, config.plant.base.capacity_ah)?;
    let plant = PlantConfig {
        seed: config.plant.seed.wrapping_add(noise_seed).wrapping_add(config.seed.wrapping_mul(104_729)),
        ..config.plant.clone()
    };
    let raw = simulate_plant(&plant, &drive.current, &drive.temp_c, drive.soc0, 1.0 / config.plant_rate_hz)?;
    let ts = antialias_downsample(&raw, config.cutoff_hz, config.model_rate_hz)?;
    let am = simulate_am(
        &config.am,
        ts.require(channel::CURRENT)?,
        ts.require(channel::TEMPERATURE)?,
        drive.soc0,
        1.0 / config.model_rate_hz,
    )?;
    let ts = ts.with_channel(channel::SOC, am.soc)?;
    Ok(Cycle {
        name: profile.name.clone(),
        series: compute_error_channel(&ts, &am.voltage)?,
    })
}

pub fn prepare_dataset(config: &BatteryExperimentConfig, profiles: &[DriveProfile], noise_base: u64) -> Result<Dataset> {
    let cycles = profiles
        .iter()
        .enumerate()
        .map(|(k, p)| prepare_cycle(config, p, noise_base + k as u64))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(cycles)
}

/// Samples of a cycle projected on (current, temperature, soc).
pub fn projection(cycle: &Cycle) -> Result<Vec<Vec<f64>>> {
    let i = cycle.series.require(channel::CURRENT)?;
    let t = cycle.series.require(channel::TEMPERATURE)?;
    let s = cycle.series.require(channel::SOC)?;
    Ok((0..i.len()).map(|k| vec![i[k], t[k], s[k]]).collect())
}

/// Hull of every training sample projected on (current, temperature, soc).
pub fn projection_hull(train: &Dataset) -> Result<HullModel> {
    let mut pts = Vec::new();
    for c in train.cycles() {
        pts.extend(projection(c)?);
    }
    hull_3d(&pts)
}

/// Fraction of a cycle's samples inside the hull of the projection.
pub fn inside_fraction(cycle: &Cycle, hull: &HullModel) -> Result<f64> {
    let pts = projection(cycle)?;
    ensure(!pts.is_empty(), || format!("cycle `{}` is empty", cycle.name))?;
    let mut inside = 0usize;
    for p in &pts {
        inside += usize::from(hull_contains(hull, p)?);
    }
    Ok(inside as f64 / pts.len() as f64)
}

/// The `k` cycles with the smallest inside fraction, ascending; ties by name.
pub fn select_edge_cycles(dataset: &Dataset, hull: &HullModel, k: usize) -> Result<Vec<(String, f64)>> {
    ensure(!dataset.is_empty(), || "no cycles to rank".into())?;
    if hull.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: hull.dim(),
        });
    }
    let mut ranked = dataset
        .cycles()
        .iter()
        .map(|c| Ok((c.name.clone(), inside_fraction(c, hull)?)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(ranked)
}

#[derive(Debug, Clone)]
pub struct TrainedBattery {
    pub grid: GridSearchResult,
    pub narx: NarxModel,
    pub ocsvm: OcsvmModel,
    pub hull: HullModel,
    /// Gate used with the OCSVM, gamma rescaled when configured.
    pub gate: GateConfig,
}

impl TrainedBattery {
    pub fn hybrid(&self, am: &EquivCircuitParams, variant: &str, hull_gate: GateVariant) -> Result<HybridModel> {
        let envelope = match variant {
            "ecm" => None,
            "ecm_ocsvm" => Some(Envelope::Ocsvm {
                model: self.ocsvm.clone(),
            }),
            "ecm_hull" => Some(Envelope::Hull {
                hull: self.hull.clone(),
                dims: HULL_DIMS.to_vec(),
            }),
            other => return Err(Error::Precondition(format!("no hybrid model for variant `{other}`"))),
        };
        let gate = if variant == "ecm_hull" {
            GateConfig {
                variant: hull_gate,
                ..self.gate
            }
        } else {
            self.gate
        };
        Ok(HybridModel {
            am: am.clone(),
            narx: self.narx.clone(),
            envelope,
            gate,
        })
    }
}

/// Grid search over the hidden-layer size, then the full NARX fit.
pub fn train_error_model(
    config: &BatteryExperimentConfig,
    train: &Dataset,
    grid_validation: &Dataset,
) -> Result<(GridSearchResult, NarxModel)> {
    let spec = NarxSpec::default();
    let grid = grid_search_neurons(
        train,
        grid_validation,
        &spec,
        config.grid_subset,
        &config.hidden_candidates,
        &config.sp_train,
    )?;
    let (narx, _, _) = fit_narx(
        train,
        &spec,
        grid.best_hidden,
        config.sp_stride,
        &config.sp_train,
        &config.rtrl_train,
    )?;
    Ok((grid, narx))
}

/// OCSVM on a maximin subset of the training regressors.
pub fn train_envelope(config: &BatteryExperimentConfig, train: &Dataset) -> Result<OcsvmModel> {
    let spec = NarxSpec::default();
    let mut rows = Vec::new();
    for c in train.cycles() {
        rows.extend(narx_regressors(&spec, &c.series)?.0);
    }
    let idx = space_filling_subset(&rows, config.ocsvm_subset.min(rows.len()))?;
    let subset: Vec<Vec<f64>> = idx.iter().map(|&k| rows[k].clone()).collect();
    Ok(train_ocsvm(&subset, config.nu, config.sigma, config.ocsvm_tol)?
        .model
        .with_offset(config.bias_offset))
}

/// Gate used with `ocsvm`: the configured gate, with gamma multiplied by
/// `nu * l` when `gamma_on_nu_l_scale` is set.
pub fn ocsvm_gate(config: &BatteryExperimentConfig, ocsvm: &OcsvmModel) -> GateConfig {
    let mut gate = config.gate;
    if config.gamma_on_nu_l_scale {
        gate.gamma *= ocsvm.nu * ocsvm.n_train as f64;
    }
    gate
}

pub fn train_battery_models(
    config: &BatteryExperimentConfig,
    train: &Dataset,
    grid_validation: &Dataset,
) -> Result<TrainedBattery> {
    let (grid, narx) = train_error_model(config, train, grid_validation)?;
    let ocsvm = train_envelope(config, train)?;
    Ok(TrainedBattery {
        grid,
        narx,
        gate: ocsvm_gate(config, &ocsvm),
        ocsvm,
        hull: projection_hull(train)?,
    })
}

/// Per-cycle signals of every variant, for plots and trace files.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleTrace {
    pub name: String,
    pub dt: f64,
    pub current: Vec<f64>,
    pub measured: Vec<f64>,
    pub am: Vec<f64>,
    /// `(variant, e_dd, y_hat)` for the hybrid variants.
    pub hybrids: Vec<(String, Vec<f64>, Vec<f64>)>,
    /// Projected (current, temperature, soc) samples.
    pub projection: Vec<[f64; 3]>,
}

pub fn evaluate_cycle(
    config: &BatteryExperimentConfig,
    models: &TrainedBattery,
    cycle: &Cycle,
) -> Result<(Vec<CycleReport>, CycleTrace)> {
    let ts = &cycle.series;
    let i = ts.require(channel::CURRENT)?;
    let t = ts.require(channel::TEMPERATURE)?;
    let y = ts.require(channel::VOLTAGE)?;
    let soc0_profile = ts.require(channel::SOC)?[0] - i[0] * ts.dt() / (3600.0 * config.am.capacity_ah);
    let soc0 = soc0_profile.clamp(0.0, 1.0);
    let proj = projection(cycle)?;
    let inside = Some((&models.hull, proj.as_slice()));

    let mut rows = Vec::new();
    let mut hybrids = Vec::new();
    let mut am_v = Vec::new();
    for variant in BATTERY_VARIANTS {
        let run: HybridRun = if variant == "am" {
            let h = models.hybrid(&config.am, "ecm", config.hull_gate)?;
            let mut run = hybrid_simulate(&h, i, t, soc0, ts.dt())?;
            run.voltage.clone_from(&run.am_voltage);
            run
        } else {
            hybrid_simulate(&models.hybrid(&config.am, variant, config.hull_gate)?, i, t, soc0, ts.dt())?
        };
        rows.push(CycleReport {
            variant: variant.into(),
            cycle: cycle.name.clone(),
            metrics: evaluate(&run.voltage, y, inside)?,
        });
        if variant == "am" {
            am_v = run.am_voltage;
        } else {
            hybrids.push((variant.to_string(), run.error, run.voltage));
        }
    }
    let trace = CycleTrace {
        name: cycle.name.clone(),
        dt: ts.dt(),
        current: i.to_vec(),
        measured: y.to_vec(),
        am: am_v,
        hybrids,
        projection: proj.iter().map(|p| [p[0], p[1], p[2]]).collect(),
    };
    Ok((rows, trace))
}

#[derive(Debug, Clone)]
pub struct BatteryReport {
    pub rows: Vec<CycleReport>,
    pub validation: Vec<String>,
    /// Selected edge cycles with their inside fractions, ascending.
    pub edge: Vec<(String, f64)>,
    pub models: TrainedBattery,
    pub traces: Vec<CycleTrace>,
    /// Training samples projected on (current, temperature, soc).
    pub train_projection: Vec<[f64; 3]>,
}

/// Mean of a metric over the rows of `variant` restricted to `cycles`.
pub fn mean_metric(rows: &[CycleReport], variant: &str, cycles: &[String], metric: fn(&CycleReport) -> f64) -> f64 {
    let sel: Vec<f64> = rows
        .iter()
        .filter(|r| r.variant == variant && cycles.contains(&r.cycle))
        .map(metric)
        .collect();
    sel.iter().sum::<f64>() / sel.len().max(1) as f64
}

pub fn run_battery_experiment(config: &BatteryExperimentConfig) -> Result<BatteryReport> {
    config.validate()?;
    let train = prepare_dataset(config, &config.train, 0)?;
    let gridval = prepare_dataset(config, &config.grid_validation, 1000)?;
    let validation = prepare_dataset(config, &config.validation, 2000)?;
    let candidates = prepare_dataset(config, &config.edge_candidates, 3000)?;

    let models = train_battery_models(config, &train, &gridval)?;
    let edge = select_edge_cycles(&candidates, &models.hull, config.edge_count)?;

    let mut rows = Vec::new();
    let mut traces = Vec::new();
    let edge_cycles = edge
        .iter()
        .map(|(name, _)| candidates.cycles().iter().find(|c| &c.name == name).expect("ranked from candidates"));
    for cycle in validation.cycles().iter().chain(edge_cycles) {
        let (r, tr) = evaluate_cycle(config, &models, cycle)?;
        rows.extend(r);
        traces.push(tr);
    }
    let mut train_projection = Vec::new();
    for c in train.cycles() {
        train_projection.extend(projection(c)?.into_iter().map(|p| [p[0], p[1], p[2]]));
    }
    Ok(BatteryReport {
        rows,
        validation: validation.cycles().iter().map(|c| c.name.clone()).collect(),
        edge,
        models,
        traces,
        train_projection,
    })
}

/// Mean RMSE and mean normalized max error per variant for the
/// in-distribution and edge sets.
/// Variants absent from `rows` are skipped.
pub fn write_battery_summary<W: std::io::Write>(
    rows: &[CycleReport],
    validation: &[String],
    edge: &[(String, f64)],
    out: W,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let wrap = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["set", "variant", "mean_rmse", "mean_max_err", "mean_max_err_norm"])
        .map_err(wrap)?;
    let edge: Vec<String> = edge.iter().map(|e| e.0.clone()).collect();
    for (set, names) in [("validation", validation), ("edge", edge.as_slice())] {
        for v in BATTERY_VARIANTS {
            if !rows.iter().any(|r| r.variant == v) {
                continue;
            }
            let rmse = mean_metric(rows, v, names, |r| r.metrics.rmse);
            let max = mean_metric(rows, v, names, |r| r.metrics.max_abs_error);
            let norm = mean_metric(rows, v, names, |r| r.metrics.normalized_max_error.unwrap_or(f64::NAN));
            w.write_record([set, v, &rmse.to_string(), &max.to_string(), &norm.to_string()])
                .map_err(wrap)?;
        }
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// One CSV per cycle with time, current, measured voltage and every variant.
pub fn write_trace_csv<W: std::io::Write>(trace: &CycleTrace, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let wrap = |e: csv::Error| Error::Format(e.to_string());
    let mut header = vec![
        "t".to_string(),
        "i_a".into(),
        "temp_c".into(),
        "soc".into(),
        "v".into(),
        "v_am".into(),
    ];
    for (name, _, _) in &trace.hybrids {
        header.push(format!("e_dd_{name}"));
        header.push(format!("v_{name}"));
    }
    w.write_record(&header).map_err(wrap)?;
    for k in 0..trace.current.len() {
        let mut rec = vec![
            (k as f64 * trace.dt).to_string(),
            trace.current[k].to_string(),
            trace.projection[k][1].to_string(),
            trace.projection[k][2].to_string(),
            trace.measured[k].to_string(),
            trace.am[k].to_string(),
        ];
        for (_, e, v) in &trace.hybrids {
            rec.push(e[k].to_string());
            rec.push(v[k].to_string());
        }
        w.write_record(&rec).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Reads a trace file written by [`write_trace_csv`].
pub fn read_trace_csv<R: std::io::Read>(name: &str, input: R) -> Result<CycleTrace> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::Format(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let fixed = ["t", "i_a", "temp_c", "soc", "v", "v_am"];
    if header.len() < fixed.len() || header[..fixed.len()] != fixed {
        return Err(Error::Schema(format!("trace `{name}` must start with columns {fixed:?}")));
    }
    let variants: Vec<String> = header[fixed.len()..]
        .chunks(2)
        .map(|c| c[0].trim_start_matches("e_dd_").to_string())
        .collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        for (c, cell) in rec.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row: row + 2,
                column: header.get(c).cloned().unwrap_or_default(),
                message: format!("`{cell}` is not a number"),
            })?;
            cols[c].push(v);
        }
    }
    let dt = if cols[0].len() > 1 { cols[0][1] - cols[0][0] } else { 1.0 };
    let projection = (0..cols[1].len()).map(|k| [cols[1][k], cols[2][k], cols[3][k]]).collect();
    let hybrids = variants
        .into_iter()
        .enumerate()
        .map(|(j, v)| (v, cols[fixed.len() + 2 * j].clone(), cols[fixed.len() + 2 * j + 1].clone()))
        .collect();
    Ok(CycleTrace {
        name: name.to_string(),
        dt,
        current: cols[1].clone(),
        measured: cols[4].clone(),
        am: cols[5].clone(),
        hybrids,
        projection,
    })
}

pub fn write_edge_csv<W: std::io::Write>(edge: &[(String, f64)], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let wrap = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["cycle", "inside_frac"]).map_err(wrap)?;
    for (name, frac) in edge {
        w.write_record([name.as_str(), &frac.to_string()]).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Writes `report.csv`, `summary.csv`, `edge.csv` and `traces/<cycle>.csv`
/// into `dir`; returns the written paths.
pub fn write_evaluation(
    rows: &[CycleReport],
    validation: &[String],
    edge: &[(String, f64)],
    traces: &[CycleTrace],
    dir: &std::path::Path,
) -> Result<Vec<std::path::PathBuf>> {
    let trace_dir = dir.join("traces");
    std::fs::create_dir_all(&trace_dir).map_err(|e| Error::io(&trace_dir, e))?;
    let create = |p: &std::path::Path| std::fs::File::create(p).map_err(|e| Error::io(p, e));
    let mut out = Vec::new();

    let p = dir.join("report.csv");
    crate::compose::write_report_csv(rows, create(&p)?)?;
    out.push(p);
    let p = dir.join("summary.csv");
    write_battery_summary(rows, validation, edge, create(&p)?)?;
    out.push(p);
    let p = dir.join("edge.csv");
    write_edge_csv(edge, create(&p)?)?;
    out.push(p);
    for t in traces {
        let p = trace_dir.join(format!("{}.csv", t.name));
        write_trace_csv(t, create(&p)?)?;
        out.push(p);
    }
    Ok(out)
}

pub fn write_battery_report(report: &BatteryReport, dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    write_evaluation(&report.rows, &report.validation, &report.edge, &report.traces, dir)
}

