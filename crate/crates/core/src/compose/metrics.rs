use std::io::Write;

use serde::Serialize;

use crate::envelope::{hull_contains, HullModel};
use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub rmse: f64,
    pub max_abs_error: f64,
    /// `max_abs_error` over the span of the reference signal; `None` when
    /// that span is zero.
    pub normalized_max_error: Option<f64>,
    /// Fraction of regressors inside the hull, when one was supplied.
    pub inside_frac: Option<f64>,
}

/// Error statistics of `y_hat` against `y`.
pub fn evaluate(
    y_hat: &[f64],
    y: &[f64],
    hull: Option<(&HullModel, &[Vec<f64>])>,
) -> Result<MetricsReport> {
    if y_hat.len() != y.len() {
        return Err(Error::Dimension {
            expected: y.len(),
            got: y_hat.len(),
        });
    }
    ensure(!y.is_empty(), || "cannot evaluate an empty sequence".into())?;
    let n = y.len() as f64;
    let sse: f64 = y_hat.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    let max_abs_error = y_hat.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let span = hi - lo;
    let inside_frac = match hull {
        Some((h, rows)) => {
            ensure(!rows.is_empty(), || "no regressors for the inside fraction".into())?;
            let mut inside = 0usize;
            for r in rows {
                inside += usize::from(hull_contains(h, r)?);
            }
            Some(inside as f64 / rows.len() as f64)
        }
        None => None,
    };
    Ok(MetricsReport {
        rmse: (sse / n).sqrt(),
        max_abs_error,
        normalized_max_error: (span > 0.0).then(|| max_abs_error / span),
        inside_frac,
    })
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub variant: String,
    pub cycle: String,
    pub metrics: MetricsReport,
}

/// CSV with columns `variant,cycle,rmse,max_err,max_err_norm,inside_frac`.
/// Missing values are left empty.
pub fn write_report_csv<W: Write>(rows: &[CycleReport], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let wrap = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["variant", "cycle", "rmse", "max_err", "max_err_norm", "inside_frac"])
        .map_err(wrap)?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([
            r.variant.clone(),
            r.cycle.clone(),
            m.rmse.to_string(),
            m.max_abs_error.to_string(),
            fmt(m.normalized_max_error),
            fmt(m.inside_frac),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}
