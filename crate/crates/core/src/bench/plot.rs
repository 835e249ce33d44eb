//! Minimal deterministic SVG output: a projected scatter of the training
//! data with the validation cycles, and stacked time traces per cycle.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::battery::CycleTrace;
use crate::error::{ensure, Error, Result};

const W: f64 = 800.0;
const PANEL_H: f64 = 220.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const MAX_POINTS: usize = 2000;

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn stride(n: usize) -> usize {
    n.div_ceil(MAX_POINTS).max(1)
}

struct Panel {
    top: f64,
    lo: f64,
    hi: f64,
    t_max: f64,
}

impl Panel {
    fn x(&self, t: f64) -> f64 {
        MARGIN + (W - 2.0 * MARGIN) * t / self.t_max
    }

    fn y(&self, v: f64) -> f64 {
        self.top + PANEL_H - 20.0 - (PANEL_H - 40.0) * (v - self.lo) / (self.hi - self.lo)
    }
}

fn open_svg(height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{height}\" viewBox=\"0 0 {W} {height}\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn polyline(svg: &mut String, p: &Panel, dt: f64, v: &[f64], color: &str) {
    let step = stride(v.len());
    let pts: Vec<String> = (0..v.len())
        .step_by(step)
        .map(|k| format!("{:.1},{:.1}", p.x(k as f64 * dt), p.y(v[k])))
        .collect();
    let _ = writeln!(
        svg,
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\"{}\"/>",
        pts.join(" ")
    );
}

fn panel_frame(svg: &mut String, p: &Panel, title: &str, legend: &[(&str, &str)]) {
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#999\"/>",
        p.top + 20.0,
        W - 2.0 * MARGIN,
        PANEL_H - 40.0
    );
    let _ = writeln!(svg, "<text x=\"{MARGIN}\" y=\"{:.1}\">{title}</text>", p.top + 14.0);
    let _ = writeln!(
        svg,
        "<text x=\"4\" y=\"{:.1}\">{:.4}</text>\n<text x=\"4\" y=\"{:.1}\">{:.4}</text>",
        p.top + 28.0,
        p.hi,
        p.top + PANEL_H - 20.0,
        p.lo
    );
    for (k, (name, color)) in legend.iter().enumerate() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{name}</text>",
            W - MARGIN - 110.0 * (legend.len() - k) as f64,
            p.top + 14.0
        );
    }
}

/// Current, compensation and voltage panels for one cycle.
pub fn trace_svg(trace: &CycleTrace) -> String {
    let t_max = (trace.current.len().max(2) - 1) as f64 * trace.dt;
    let mut svg = open_svg(3.0 * PANEL_H);

    let (lo, hi) = range(trace.current.iter().copied());
    let p = Panel { top: 0.0, lo, hi, t_max };
    panel_frame(&mut svg, &p, &format!("{}: current [A]", trace.name), &[]);
    polyline(&mut svg, &p, trace.dt, &trace.current, PALETTE[0]);

    let (lo, hi) = range(trace.hybrids.iter().flat_map(|h| h.1.iter().copied()));
    let p = Panel { top: PANEL_H, lo, hi, t_max };
    let legend: Vec<(&str, &str)> = trace
        .hybrids
        .iter()
        .enumerate()
        .map(|(k, h)| (h.0.as_str(), PALETTE[(k + 1) % PALETTE.len()]))
        .collect();
    panel_frame(&mut svg, &p, "error model output [V]", &legend);
    for (k, h) in trace.hybrids.iter().enumerate() {
        polyline(&mut svg, &p, trace.dt, &h.1, PALETTE[(k + 1) % PALETTE.len()]);
    }

    let (lo, hi) = range(
        trace
            .measured
            .iter()
            .chain(&trace.am)
            .chain(trace.hybrids.iter().flat_map(|h| h.2.iter()))
            .copied(),
    );
    let p = Panel { top: 2.0 * PANEL_H, lo, hi, t_max };
    let mut legend = vec![("measured", "#000000"), ("am", "#7f7f7f")];
    legend.extend(trace.hybrids.iter().enumerate().map(|(k, h)| (h.0.as_str(), PALETTE[(k + 1) % PALETTE.len()])));
    panel_frame(&mut svg, &p, "terminal voltage [V]", &legend);
    polyline(&mut svg, &p, trace.dt, &trace.measured, "#000000");
    polyline(&mut svg, &p, trace.dt, &trace.am, "#7f7f7f");
    for (k, h) in trace.hybrids.iter().enumerate() {
        polyline(&mut svg, &p, trace.dt, &h.2, PALETTE[(k + 1) % PALETTE.len()]);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Oblique view of (current, temperature, soc), each scaled to the
/// training range.
pub fn projection_svg(train: &[[f64; 3]], traces: &[CycleTrace]) -> String {
    let all = || train.iter().chain(traces.iter().flat_map(|t| t.projection.iter()));
    let ranges: Vec<(f64, f64)> = (0..3).map(|d| range(all().map(|p| p[d]))).collect();
    let size = 600.0;
    let project = |p: &[f64; 3]| {
        let u: Vec<f64> = (0..3).map(|d| (p[d] - ranges[d].0) / (ranges[d].1 - ranges[d].0)).collect();
        let x = 150.0 + 300.0 * u[0] + 150.0 * u[1];
        let y = size - 100.0 - 300.0 * u[2] - 120.0 * u[1];
        (x, y)
    };
    let mut svg = open_svg(size);
    let axes = [([1.0, 0.0, 0.0], "current"), ([0.0, 1.0, 0.0], "temperature"), ([0.0, 0.0, 1.0], "soc")];
    let origin = project(&[ranges[0].0, ranges[1].0, ranges[2].0]);
    for (dir, name) in axes {
        let end: [f64; 3] = std::array::from_fn(|d| ranges[d].0 + dir[d] * (ranges[d].1 - ranges[d].0));
        let (x, y) = project(&end);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{y:.1}\" stroke=\"#999\"/>\n<text x=\"{x:.1}\" y=\"{y:.1}\">{name}</text>",
            origin.0, origin.1
        );
    }
    let step = stride(train.len());
    for p in train.iter().step_by(step) {
        let (x, y) = project(p);
        let _ = writeln!(svg, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"1\" fill=\"#bbbbbb\"/>");
    }
    for (k, t) in traces.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let step = stride(t.projection.len());
        for p in t.projection.iter().step_by(step) {
            let (x, y) = project(p);
            let _ = writeln!(svg, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"1\" fill=\"{color}\"/>");
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{}</text>",
            W - 200.0,
            20.0 + 14.0 * k as f64,
            t.name
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `projection.svg` and one `trace_<cycle>.svg` per trace into `dir`.
pub fn emit_plots(train: &[[f64; 3]], traces: &[CycleTrace], dir: &Path) -> Result<Vec<PathBuf>> {
    ensure(!traces.is_empty(), || "no traces to plot".into())?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(traces.len() + 1);
    let path = dir.join("projection.svg");
    std::fs::write(&path, projection_svg(train, traces)).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    for t in traces {
        let path = dir.join(format!("trace_{}.svg", t.name));
        std::fs::write(&path, trace_svg(t)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
