use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Kelvin offset for temperature conversion.
pub const ZERO_CELSIUS_K: f64 = 273.15;

/// `R = R_ref * exp(Ea/k * (1/T - 1/T_ref))`, temperatures in kelvin.
pub fn arrhenius_resistance(r_ref: f64, t_ref_k: f64, ea_over_k: f64, t_k: f64) -> Result<f64> {
    ensure(t_k > 0.0 && t_ref_k > 0.0, || {
        format!("temperatures must be positive kelvin (T = {t_k}, T_ref = {t_ref_k})")
    })?;
    Ok(r_ref * (ea_over_k * (1.0 / t_k - 1.0 / t_ref_k)).exp())
}

/// Rectilinear lookup table over (soc, temperature °C, current A),
/// interpolated trilinearly. Values are stored soc-major:
/// `values[(is * nt + it) * ni + ii]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub soc: Vec<f64>,
    pub temp_c: Vec<f64>,
    pub current: Vec<f64>,
    pub values: Vec<f64>,
}

/// Bracketing knot index and weight of the upper knot, clamped to the axis.
fn bracket(axis: &[f64], x: f64) -> (usize, f64, bool) {
    let n = axis.len();
    if n == 1 {
        return (0, 0.0, x != axis[0]);
    }
    if x <= axis[0] {
        return (0, 0.0, x < axis[0]);
    }
    if x >= axis[n - 1] {
        return (n - 2, 1.0, x > axis[n - 1]);
    }
    let hi = axis.partition_point(|&a| a <= x).min(n - 1);
    let lo = hi - 1;
    (lo, (x - axis[lo]) / (axis[hi] - axis[lo]), false)
}

impl Grid3 {
    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("soc", &self.soc), ("temp_c", &self.temp_c), ("current", &self.current)] {
            ensure(!axis.is_empty(), || format!("{name} axis is empty"))?;
            ensure(axis.windows(2).all(|w| w[0] < w[1]), || {
                format!("{name} axis must be strictly increasing")
            })?;
        }
        let expected = self.soc.len() * self.temp_c.len() * self.current.len();
        if self.values.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// Returns the interpolated value and whether any coordinate was clamped.
    pub fn eval(&self, soc: f64, temp_c: f64, current: f64) -> (f64, bool) {
        let (s0, ws, cs) = bracket(&self.soc, soc);
        let (t0, wt, ct) = bracket(&self.temp_c, temp_c);
        let (i0, wi, ci) = bracket(&self.current, current);
        let (nt, ni) = (self.temp_c.len(), self.current.len());
        let idx = |s: usize, t: usize, i: usize| {
            let s = s.min(self.soc.len() - 1);
            let t = t.min(nt - 1);
            let i = i.min(ni - 1);
            self.values[(s * nt + t) * ni + i]
        };
        let mut acc = 0.0;
        for (ds, fs) in [(0, 1.0 - ws), (1, ws)] {
            for (dt, ft) in [(0, 1.0 - wt), (1, wt)] {
                for (di, fi) in [(0, 1.0 - wi), (1, wi)] {
                    let w = fs * ft * fi;
                    if w != 0.0 {
                        acc += w * idx(s0 + ds, t0 + dt, i0 + di);
                    }
                }
            }
        }
        (acc, cs || ct || ci)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrhenius {
    pub r_ref: f64,
    pub t_ref_k: f64,
    pub ea_over_k: f64,
}

/// One circuit element as a function of the operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamMap {
    Constant { value: f64 },
    Table(Grid3),
    /// Arrhenius temperature law, optionally scaled by a table factor.
    Arrhenius {
        law: Arrhenius,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        factor: Option<Grid3>,
    },
}

impl ParamMap {
    pub fn constant(value: f64) -> Self {
        ParamMap::Constant { value }
    }

    pub fn eval(&self, soc: f64, temp_c: f64, current: f64) -> (f64, bool) {
        match self {
            ParamMap::Constant { value } => (*value, false),
            ParamMap::Table(g) => g.eval(soc, temp_c, current),
            ParamMap::Arrhenius { law, factor } => {
                let t_k = (temp_c + ZERO_CELSIUS_K).max(1.0);
                let r = law.r_ref * (law.ea_over_k * (1.0 / t_k - 1.0 / law.t_ref_k)).exp();
                match factor {
                    Some(g) => {
                        let (f, c) = g.eval(soc, temp_c, current);
                        (r * f, c)
                    }
                    None => (r, false),
                }
            }
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            ParamMap::Constant { value } => ensure(*value > 0.0 && value.is_finite(), || {
                format!("{name} must be positive, got {value}")
            }),
            ParamMap::Table(g) => {
                g.validate()?;
                ensure(g.values.iter().all(|v| *v > 0.0 && v.is_finite()), || {
                    format!("{name} table has non-positive entries")
                })
            }
            ParamMap::Arrhenius { law, factor } => {
                ensure(law.r_ref > 0.0 && law.t_ref_k > 0.0, || {
                    format!("{name}: Arrhenius reference values must be positive")
                })?;
                if let Some(g) = factor {
                    g.validate()?;
                    ensure(g.values.iter().all(|v| *v > 0.0), || {
                        format!("{name} factor table has non-positive entries")
                    })?;
                }
                Ok(())
            }
        }
    }
}

/// Piecewise-linear open-circuit voltage curve over soc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcvTable {
    pub soc: Vec<f64>,
    pub voltage: Vec<f64>,
}

impl OcvTable {
    pub fn validate(&self) -> Result<()> {
        ensure(!self.soc.is_empty() && self.soc.len() == self.voltage.len(), || {
            "ocv table needs matching, non-empty soc/voltage columns".into()
        })?;
        ensure(self.soc.windows(2).all(|w| w[0] < w[1]), || {
            "ocv soc keys must be strictly increasing".into()
        })?;
        ensure(self.soc.iter().all(|s| (0.0..=1.0).contains(s)), || {
            "ocv soc keys must lie in [0, 1]".into()
        })?;
        ensure(self.voltage.windows(2).all(|w| w[0] <= w[1]), || {
            "ocv voltages must be non-decreasing".into()
        })
    }

    /// Interpolated voltage, clamped to the end knots.
    pub fn eval(&self, soc: f64) -> f64 {
        let (k, w, _) = bracket(&self.soc, soc);
        if self.soc.len() == 1 {
            return self.voltage[0];
        }
        self.voltage[k] + w * (self.voltage[k + 1] - self.voltage[k])
    }
}

/// Parameters of the analytical model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivCircuitParams {
    pub r0: ParamMap,
    pub r1: ParamMap,
    pub c1: ParamMap,
    pub r2: ParamMap,
    pub c2: ParamMap,
    pub ocv: OcvTable,
    pub capacity_ah: f64,
}

impl EquivCircuitParams {
    /// Desk-scale 4 Ah cell: R0 = 20 mΩ, τ1 = 10 s, τ2 = 300 s.
    ///
    /// R0 and R1 follow an Arrhenius law around 25 °C; R0 also rises towards
    /// low soc through a table factor.
    pub fn desk_default() -> Self {
        let t_ref = 25.0 + ZERO_CELSIUS_K;
        let soc_factor = Grid3 {
            soc: vec![0.0, 0.2, 0.5, 1.0],
            temp_c: vec![25.0],
            current: vec![0.0],
            values: vec![1.3, 1.05, 1.0, 1.02],
        };
        EquivCircuitParams {
            r0: ParamMap::Arrhenius {
                law: Arrhenius { r_ref: 0.020, t_ref_k: t_ref, ea_over_k: 2500.0 },
                factor: Some(soc_factor),
            },
            r1: ParamMap::Arrhenius {
                law: Arrhenius { r_ref: 0.010, t_ref_k: t_ref, ea_over_k: 3000.0 },
                factor: None,
            },
            c1: ParamMap::constant(1000.0),
            r2: ParamMap::constant(0.015),
            c2: ParamMap::constant(20_000.0),
            ocv: OcvTable {
                soc: vec![0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
                voltage: vec![3.00, 3.30, 3.45, 3.55, 3.62, 3.67, 3.72, 3.79, 3.87, 3.96, 4.06, 4.20],
            },
            capacity_ah: 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("r0", &self.r0), ("r1", &self.r1), ("c1", &self.c1), ("r2", &self.r2), ("c2", &self.c2)] {
            m.validate(name)?;
        }
        self.ocv.validate()?;
        ensure(self.capacity_ah > 0.0, || "capacity must be positive".into())?;
        // time-constant ordering checked on a coarse operating-point sweep
        for soc in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for t in [-20.0, 0.0, 25.0, 45.0] {
                for i in [-8.0, 0.0, 8.0] {
                    let tau1 = self.r1.eval(soc, t, i).0 * self.c1.eval(soc, t, i).0;
                    let tau2 = self.r2.eval(soc, t, i).0 * self.c2.eval(soc, t, i).0;
                    ensure(tau1 < tau2, || {
                        format!("tau1 = {tau1} s must be below tau2 = {tau2} s at soc {soc}, {t} °C, {i} A")
                    })?;
                }
            }
        }
        Ok(())
    }

    pub fn ocv_lookup(&self, soc: f64) -> Result<f64> {
        ensure((0.0..=1.0).contains(&soc), || format!("soc {soc} outside [0, 1]"))?;
        Ok(self.ocv.eval(soc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrhenius_identities() {
        assert_eq!(arrhenius_resistance(0.7, 300.0, 1234.0, 300.0).unwrap(), 0.7);
        assert_eq!(arrhenius_resistance(0.7, 300.0, 0.0, 250.0).unwrap(), 0.7);
        let r = arrhenius_resistance(1.0, 298.15, 1000.0, 278.15).unwrap();
        let expected = (1000.0f64 * (1.0 / 278.15 - 1.0 / 298.15)).exp();
        assert!((r - expected).abs() < 1e-15);
        assert!(arrhenius_resistance(1.0, 298.15, 1000.0, 0.0).is_err());
    }

    #[test]
    fn ocv_knots_and_midpoints() {
        let p = EquivCircuitParams {
            ocv: OcvTable { soc: vec![0.0, 1.0], voltage: vec![3.0, 4.2] },
            ..EquivCircuitParams::desk_default()
        };
        assert_eq!(p.ocv_lookup(0.0).unwrap(), 3.0);
        assert_eq!(p.ocv_lookup(1.0).unwrap(), 4.2);
        assert!((p.ocv_lookup(0.5).unwrap() - 3.6).abs() < 1e-15);
        assert!(p.ocv_lookup(1.01).is_err());
        assert!(p.ocv_lookup(-0.01).is_err());
    }

    #[test]
    fn ocv_five_knot_interpolation() {
        let table = OcvTable {
            soc: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            voltage: vec![3.0, 3.5, 3.7, 3.9, 4.2],
        };
        // 0.37 lies between 0.25 and 0.5
        let expected = 3.5 + (0.37 - 0.25) / 0.25 * (3.7 - 3.5);
        assert!((table.eval(0.37) - expected).abs() < 1e-14);
        for (s, v) in table.soc.iter().zip(&table.voltage) {
            assert_eq!(table.eval(*s), *v);
        }
    }

    #[test]
    fn grid_trilinear_and_clamp() {
        let g = Grid3 {
            soc: vec![0.0, 1.0],
            temp_c: vec![0.0, 10.0],
            current: vec![-1.0, 1.0],
            // value = soc + temp/10 + current
            values: vec![-1.0, 1.0, 0.0, 2.0, 0.0, 2.0, 1.0, 3.0],
        };
        g.validate().unwrap();
        let (v, clamped) = g.eval(0.3, 4.0, 0.5);
        assert!((v - (0.3 + 0.4 + 0.5)).abs() < 1e-14);
        assert!(!clamped);
        let (v, clamped) = g.eval(2.0, 4.0, 0.5);
        assert!((v - (1.0 + 0.4 + 0.5)).abs() < 1e-14);
        assert!(clamped);
    }

    #[test]
    fn default_params_are_valid() {
        let p = EquivCircuitParams::desk_default();
        p.validate().unwrap();
        let (r1, _) = p.r1.eval(0.5, 25.0, 0.0);
        let (c1, _) = p.c1.eval(0.5, 25.0, 0.0);
        assert!((r1 * c1 - 10.0).abs() < 1e-9);
    }

    #[test]
    fn validation_catches_bad_tables() {
        let mut p = EquivCircuitParams::desk_default();
        p.ocv.voltage[3] = 2.0;
        assert!(p.validate().is_err());
        let mut p = EquivCircuitParams::desk_default();
        p.c2 = ParamMap::constant(100.0);
        assert!(p.validate().is_err());
        let mut p = EquivCircuitParams::desk_default();
        p.r2 = ParamMap::constant(0.0);
        assert!(p.validate().is_err());
    }
}
