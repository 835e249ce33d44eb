use std::fs;
use std::path::{Path, PathBuf};

use errcomp::bench::{
    emit_plots, evaluate_cycle, ocsvm_gate, prepare_dataset, projection, projection_hull, read_trace_csv,
    run_battery_experiment, run_poly_experiment, select_edge_cycles, train_envelope, train_error_model,
    write_battery_report, write_edge_csv, write_evaluation, write_poly_csv, BatteryExperimentConfig, DriveProfile,
    PolyExperimentConfig, TrainedBattery,
};
use errcomp::compose::hybrid_simulate;
use errcomp::envelope::{GateVariant, HullModel, OcsvmModel};
use errcomp::netdyn::{GridSearchResult, NarxModel};
use errcomp::persist;
use errcomp::signal::{load_csv, write_csv, Cycle, CsvSchema, Dataset, TimeSeries};
use errcomp::{Error, Result};

use crate::Common;

/// Generated sets in the order their noise seeds are assigned.
const SETS: [(&str, u64); 4] = [
    ("train", 0),
    ("grid_validation", 1000),
    ("validation", 2000),
    ("edge_candidates", 3000),
];

fn read_config<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            toml::from_str(&text).map_err(|e| Error::Schema(format!("{}: {}", p.display(), e.message())))
        }
    }
}

fn parse_gate(name: &str) -> Result<GateVariant> {
    name.parse()
}

fn battery_config(c: &Common) -> Result<BatteryExperimentConfig> {
    let mut cfg: BatteryExperimentConfig = read_config(c.config.as_deref())?;
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(g) = &c.gate {
        cfg.gate.variant = parse_gate(g)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn poly_config(c: &Common) -> Result<PolyExperimentConfig> {
    let mut cfg: PolyExperimentConfig = read_config(c.config.as_deref())?;
    if let Some(seed) = c.seed {
        for s in &mut cfg.seeds {
            *s = s.wrapping_add(seed);
        }
    }
    if let Some(g) = &c.gate {
        cfg.gate.variant = parse_gate(g)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn mkdir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn profiles<'a>(cfg: &'a BatteryExperimentConfig, set: &str) -> &'a [DriveProfile] {
    match set {
        "train" => &cfg.train,
        "grid_validation" => &cfg.grid_validation,
        "validation" => &cfg.validation,
        _ => &cfg.edge_candidates,
    }
}

/// Reads `<data>/<set>/<profile>.csv` for every profile of the set, in
/// configuration order.
fn load_set(cfg: &BatteryExperimentConfig, data: &Path, set: &str) -> Result<Dataset> {
    let schema = CsvSchema::battery(cfg.model_rate_hz);
    let cycles = profiles(cfg, set)
        .iter()
        .map(|p| {
            let series = load_csv(data.join(set).join(format!("{}.csv", p.name)), &schema)?;
            Ok(Cycle {
                name: p.name.clone(),
                series,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(cycles)
}

pub fn gen_data(c: &Common) -> Result<()> {
    let cfg = battery_config(c)?;
    let mut written = Vec::new();
    for (set, noise) in SETS {
        let ds = prepare_dataset(&cfg, profiles(&cfg, set), noise)?;
        let dir = c.out.join(set);
        mkdir(&dir)?;
        for cycle in ds.cycles() {
            let p = dir.join(format!("{}.csv", cycle.name));
            write_csv(&cycle.series, create(&p)?)?;
            written.push(p);
        }
    }
    report(&written);
    Ok(())
}

fn write_grid_csv(grid: &GridSearchResult, path: &Path) -> Result<()> {
    let mut text = String::from("hidden,val_rmse,selected\n");
    for (h, score) in &grid.scores {
        let s = score.map(|v| v.to_string()).unwrap_or_default();
        text.push_str(&format!("{h},{s},{}\n", u8::from(*h == grid.best_hidden)));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn train_fnn(c: &Common, data: &Path) -> Result<()> {
    let cfg = battery_config(c)?;
    let train = load_set(&cfg, data, "train")?;
    let gridval = load_set(&cfg, data, "grid_validation")?;
    let (grid, narx) = train_error_model(&cfg, &train, &gridval)?;
    mkdir(&c.out)?;
    let model = c.out.join("narx.toml");
    persist::save(&narx, &model)?;
    let table = c.out.join("grid.csv");
    write_grid_csv(&grid, &table)?;
    report(&[model, table]);
    Ok(())
}

pub fn train_ocsvm(c: &Common, data: &Path) -> Result<()> {
    let cfg = battery_config(c)?;
    let train = load_set(&cfg, data, "train")?;
    let model = train_envelope(&cfg, &train)?;
    mkdir(&c.out)?;
    let path = c.out.join("ocsvm.toml");
    persist::save(&model, &path)?;
    report(&[path]);
    Ok(())
}

pub fn hull(c: &Common, data: &Path) -> Result<()> {
    let cfg = battery_config(c)?;
    let train = load_set(&cfg, data, "train")?;
    let candidates = load_set(&cfg, data, "edge_candidates")?;
    let hull = projection_hull(&train)?;
    let edge = select_edge_cycles(&candidates, &hull, cfg.edge_count)?;
    mkdir(&c.out)?;
    let model = c.out.join("hull.toml");
    persist::save(&hull, &model)?;
    let table = c.out.join("edge.csv");
    write_edge_csv(&edge, create(&table)?)?;
    report(&[model, table]);
    Ok(())
}

fn load_models(cfg: &BatteryExperimentConfig, dir: &Path) -> Result<TrainedBattery> {
    let narx: NarxModel = persist::load(dir.join("narx.toml"))?;
    let ocsvm: OcsvmModel = persist::load(dir.join("ocsvm.toml"))?;
    let hull: HullModel = persist::load(dir.join("hull.toml"))?;
    Ok(TrainedBattery {
        grid: GridSearchResult {
            best_hidden: narx.net.n_hidden,
            scores: Vec::new(),
        },
        gate: ocsvm_gate(cfg, &ocsvm),
        narx,
        ocsvm,
        hull,
    })
}

fn save_models(models: &TrainedBattery, dir: &Path) -> Result<Vec<PathBuf>> {
    mkdir(dir)?;
    let paths = ["narx.toml", "ocsvm.toml", "hull.toml"].map(|f| dir.join(f));
    persist::save(&models.narx, &paths[0])?;
    persist::save(&models.ocsvm, &paths[1])?;
    persist::save(&models.hull, &paths[2])?;
    Ok(paths.to_vec())
}

pub fn simulate(c: &Common, models: &Path, input: &Path, variant: &str) -> Result<()> {
    let cfg = battery_config(c)?;
    let trained = load_models(&cfg, models)?;
    let ts = load_csv(input, &CsvSchema::battery(cfg.model_rate_hz))?;
    let i = ts.require("i_a")?;
    let t = ts.require("temp_c")?;
    let soc0 = (ts.require("soc")?[0] - i[0] * ts.dt() / (3600.0 * cfg.am.capacity_ah)).clamp(0.0, 1.0);
    let h = trained.hybrid(&cfg.am, if variant == "am" { "ecm" } else { variant }, cfg.hull_gate)?;
    let run = hybrid_simulate(&h, i, t, soc0, ts.dt())?;
    let voltage = if variant == "am" {
        run.am_voltage.clone()
    } else {
        run.voltage.clone()
    };
    let mut channels = vec![
        ("v_hat", voltage),
        ("v_am", run.am_voltage.clone()),
        ("soc_am", run.am_soc.clone()),
    ];
    if variant != "am" {
        channels.push(("e_dd", run.error.clone()));
        channels.push(("e_raw", run.raw_error.clone()));
        if let Some(score) = &run.score {
            channels.push(("score", score.clone()));
        }
    }
    let out = TimeSeries::new(cfg.model_rate_hz, channels)?;
    mkdir(&c.out)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("cycle");
    let path = c.out.join(format!("simulate_{stem}_{variant}.csv"));
    write_csv(&out, create(&path)?)?;
    if run.diverged {
        eprintln!("warning: error model output clamped on {}", input.display());
    }
    report(&[path]);
    Ok(())
}

pub fn evaluate(c: &Common, models: &Path, data: &Path, variant: Option<&str>) -> Result<()> {
    let cfg = battery_config(c)?;
    let trained = load_models(&cfg, models)?;
    let validation = load_set(&cfg, data, "validation")?;
    let candidates = load_set(&cfg, data, "edge_candidates")?;
    let edge = select_edge_cycles(&candidates, &trained.hull, cfg.edge_count)?;
    let edge_cycles = edge
        .iter()
        .filter_map(|(name, _)| candidates.cycles().iter().find(|c| &c.name == name));

    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for cycle in validation.cycles().iter().chain(edge_cycles) {
        let (mut r, mut tr) = evaluate_cycle(&cfg, &trained, cycle)?;
        if let Some(v) = variant {
            r.retain(|row| row.variant == v);
            tr.hybrids.retain(|h| h.0 == v);
        }
        rows.extend(r);
        traces.push(tr);
    }
    let names: Vec<String> = validation.cycles().iter().map(|c| c.name.clone()).collect();
    report(&write_evaluation(&rows, &names, &edge, &traces, &c.out)?);
    Ok(())
}

pub fn poly_experiment(c: &Common) -> Result<()> {
    let cfg = poly_config(c)?;
    let rep = run_poly_experiment(&cfg)?;
    mkdir(&c.out)?;
    let path = c.out.join("poly.csv");
    write_poly_csv(&rep, create(&path)?)?;
    println!(
        "mean rmse: fnn={:.4} fnn_ocsvm={:.4} fnn_hull={:.4} ({} seeds, {} failed)",
        rep.mean[0],
        rep.mean[1],
        rep.mean[2],
        rep.seeds.len(),
        rep.failed.len()
    );
    report(&[path]);
    Ok(())
}

pub fn battery_experiment(c: &Common) -> Result<()> {
    let cfg = battery_config(c)?;
    let rep = run_battery_experiment(&cfg)?;
    let mut written = write_battery_report(&rep, &c.out)?;
    written.extend(save_models(&rep.models, &c.out.join("models"))?);
    let grid = c.out.join("grid.csv");
    write_grid_csv(&rep.models.grid, &grid)?;
    written.push(grid);
    written.extend(emit_plots(&rep.train_projection, &rep.traces, &c.out.join("plots"))?);
    report(&written);
    Ok(())
}

pub fn plot(c: &Common, traces: &Path, data: Option<&Path>) -> Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(traces)
        .map_err(|e| Error::io(traces, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    let loaded = files
        .iter()
        .map(|p| {
            let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
            read_trace_csv(name, fs::File::open(p).map_err(|e| Error::io(p, e))?)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut train = Vec::new();
    if let Some(dir) = data {
        let cfg = battery_config(c)?;
        for cycle in load_set(&cfg, dir, "train")?.cycles() {
            train.extend(projection(cycle)?.into_iter().map(|p| [p[0], p[1], p[2]]));
        }
    }
    report(&emit_plots(&train, &loaded, &c.out)?);
    Ok(())
}
