use serde::{Deserialize, Serialize};

/// Affine map of one column onto `[-1, 1]`: `scaled = (x - center) / half_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub center: f64,
    pub half_range: f64,
    /// Set when the column had zero spread; the map is then the identity.
    #[serde(default)]
    pub degenerate: bool,
}

impl ColumnScale {
    pub const IDENTITY: ColumnScale = ColumnScale {
        center: 0.0,
        half_range: 1.0,
        degenerate: false,
    };

    pub fn fit(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if hi > lo {
            ColumnScale {
                center: 0.5 * (hi + lo),
                half_range: 0.5 * (hi - lo),
                degenerate: false,
            }
        } else {
            ColumnScale {
                degenerate: true,
                ..Self::IDENTITY
            }
        }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        (x - self.center) / self.half_range
    }

    #[inline]
    pub fn invert(&self, y: f64) -> f64 {
        y * self.half_range + self.center
    }
}

/// Per-column min-max scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingInfo {
    pub columns: Vec<ColumnScale>,
}

impl ScalingInfo {
    pub fn identity(width: usize) -> Self {
        ScalingInfo {
            columns: vec![ColumnScale::IDENTITY; width],
        }
    }

    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let width = rows.first().map_or(0, Vec::len);
        ScalingInfo {
            columns: (0..width)
                .map(|j| ColumnScale::fit(rows.iter().map(|r| r[j])))
                .collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn has_degenerate(&self) -> bool {
        self.columns.iter().any(|c| c.degenerate)
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.columns).map(|(x, c)| c.apply(*x)).collect()
    }

    pub fn apply_into(&self, row: &[f64], out: &mut [f64]) {
        for ((o, x), c) in out.iter_mut().zip(row).zip(&self.columns) {
            *o = c.apply(*x);
        }
    }

    pub fn invert(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.columns).map(|(y, c)| c.invert(*y)).collect()
    }
}

/// Min-max scales every column to `[-1, 1]`. Constant columns are left
/// unchanged and flagged in the returned [`ScalingInfo`].
pub fn normalize(rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, ScalingInfo) {
    let info = ScalingInfo::fit(rows);
    (rows.iter().map(|r| info.apply(r)).collect(), info)
}

pub fn denormalize(rows: &[Vec<f64>], info: &ScalingInfo) -> Vec<Vec<f64>> {
    rows.iter().map(|r| info.invert(r)).collect()
}
