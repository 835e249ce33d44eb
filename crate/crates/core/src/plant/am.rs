use super::params::EquivCircuitParams;
use crate::error::{ensure, Result};

/// State of charge by current integration (charging positive):
/// `soc(k) = clamp(soc0 + sum_{j<=k} i(j) * dt / (3600 * capacity), 0, 1)`.
pub fn coulomb_count(current: &[f64], dt: f64, capacity_ah: f64, soc0: f64) -> Result<Vec<f64>> {
    ensure(dt > 0.0, || format!("dt must be positive, got {dt}"))?;
    ensure(capacity_ah > 0.0, || format!("capacity must be positive, got {capacity_ah}"))?;
    let scale = dt / (3600.0 * capacity_ah);
    let mut charge = 0.0;
    Ok(current
        .iter()
        .map(|i| {
            charge += i;
            (soc0 + charge * scale).clamp(0.0, 1.0)
        })
        .collect())
}

/// Stepwise simulator of the analytical model.
///
/// RC states use the exact zero-order-hold update
/// `v_c <- v_c * exp(-dt/tau) + R * i_dis * (1 - exp(-dt/tau))`.
#[derive(Debug, Clone)]
pub struct AmState<'a> {
    params: &'a EquivCircuitParams,
    dt: f64,
    soc0: f64,
    charge: f64,
    soc: f64,
    v_c: [f64; 2],
    clamped: bool,
}

impl<'a> AmState<'a> {
    pub fn new(params: &'a EquivCircuitParams, soc0: f64, dt: f64) -> Result<Self> {
        ensure(dt > 0.0, || format!("dt must be positive, got {dt}"))?;
        ensure((0.0..=1.0).contains(&soc0), || format!("soc0 {soc0} outside [0, 1]"))?;
        ensure(params.capacity_ah > 0.0, || "capacity must be positive".into())?;
        Ok(AmState {
            params,
            dt,
            soc0,
            charge: 0.0,
            soc: soc0,
            v_c: [0.0; 2],
            clamped: false,
        })
    }

    /// Consumes one input sample and returns the terminal voltage for it.
    pub fn step(&mut self, current: f64, temp_c: f64) -> f64 {
        let p = self.params;
        self.charge += current;
        self.soc = (self.soc0 + self.charge * self.dt / (3600.0 * p.capacity_ah)).clamp(0.0, 1.0);
        let (soc, i) = (self.soc, current);

        let mut flag = false;
        let mut eval = |m: &super::ParamMap| {
            let (v, c) = m.eval(soc, temp_c, i);
            flag |= c;
            v
        };
        let r0 = eval(&p.r0);
        let rc = [(eval(&p.r1), eval(&p.c1)), (eval(&p.r2), eval(&p.c2))];
        self.clamped |= flag;

        let i_dis = -current;
        let v = p.ocv.eval(soc) - i_dis * r0 - self.v_c[0] - self.v_c[1];
        for (vc, (r, c)) in self.v_c.iter_mut().zip(rc) {
            let a = (-self.dt / (r * c)).exp();
            *vc = *vc * a + r * i_dis * (1.0 - a);
        }
        v
    }

    pub fn soc(&self) -> f64 {
        self.soc
    }

    pub fn rc_voltages(&self) -> [f64; 2] {
        self.v_c
    }

    /// Whether any operating point fell outside a parameter table so far.
    pub fn clamped(&self) -> bool {
        self.clamped
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmOutput {
    pub voltage: Vec<f64>,
    pub soc: Vec<f64>,
    /// Set when a parameter table was queried outside its grid.
    pub clamped: bool,
}

/// Runs the analytical model over a whole input record (RC states start at 0).
pub fn simulate_am(
    params: &EquivCircuitParams,
    current: &[f64],
    temp_c: &[f64],
    soc0: f64,
    dt: f64,
) -> Result<AmOutput> {
    ensure(current.len() == temp_c.len(), || {
        format!("current has {} samples, temperature {}", current.len(), temp_c.len())
    })?;
    let mut state = AmState::new(params, soc0, dt)?;
    let mut voltage = Vec::with_capacity(current.len());
    let mut soc = Vec::with_capacity(current.len());
    for (&i, &t) in current.iter().zip(temp_c) {
        voltage.push(state.step(i, t));
        soc.push(state.soc());
    }
    Ok(AmOutput {
        voltage,
        soc,
        clamped: state.clamped(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::{OcvTable, ParamMap};

    fn flat_params() -> EquivCircuitParams {
        EquivCircuitParams {
            r0: ParamMap::constant(0.02),
            r1: ParamMap::constant(0.01),
            c1: ParamMap::constant(1000.0),
            r2: ParamMap::constant(0.015),
            c2: ParamMap::constant(20_000.0),
            ocv: OcvTable { soc: vec![0.0, 1.0], voltage: vec![3.0, 4.2] },
            capacity_ah: 4.0,
        }
    }

    #[test]
    fn coulomb_count_cases() {
        assert_eq!(coulomb_count(&[0.0; 5], 1.0, 4.0, 0.3).unwrap(), vec![0.3; 5]);
        // +1C for one hour
        let soc = coulomb_count(&vec![4.0; 3600], 1.0, 4.0, 0.0).unwrap();
        assert!((soc[3599] - 1.0).abs() < 1e-12);
        let profile = [1.0, -2.0, 3.5, 0.0, -0.5, 4.0, 2.0, -1.0, 0.25, 8.0];
        let soc = coulomb_count(&profile, 0.5, 2.0, 0.5).unwrap();
        let mut cum = 0.0;
        for (k, i) in profile.iter().enumerate() {
            cum += i * 0.5;
            let oracle = (0.5 + cum / 7200.0).clamp(0.0, 1.0);
            assert!((soc[k] - oracle).abs() < 1e-12);
        }
        assert!(coulomb_count(&profile, 0.0, 2.0, 0.5).is_err());
        assert!(coulomb_count(&profile, 1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn no_load_holds_ocv() {
        let p = EquivCircuitParams::desk_default();
        let out = simulate_am(&p, &[0.0; 50], &[25.0; 50], 0.63, 0.05).unwrap();
        let ocv = p.ocv_lookup(0.63).unwrap();
        assert!(out.voltage.iter().all(|v| *v == ocv));
    }

    #[test]
    fn constant_discharge_soc_matches_integration() {
        let p = flat_params();
        let current = vec![-6.0; 100];
        let out = simulate_am(&p, &current, &[25.0; 100], 0.8, 1.0).unwrap();
        let oracle = coulomb_count(&current, 1.0, 4.0, 0.8).unwrap();
        assert_eq!(out.soc, oracle);
        assert!((out.soc[99] - (0.8 - 600.0 / 14_400.0)).abs() < 1e-12);
    }

    #[test]
    fn discharge_drops_voltage() {
        let p = flat_params();
        let out = simulate_am(&p, &[-4.0; 10], &[25.0; 10], 0.5, 1.0).unwrap();
        let ocv = p.ocv_lookup(out.soc[0]).unwrap();
        assert!(out.voltage[0] < ocv);
        assert!(out.voltage.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let p = flat_params();
        assert!(simulate_am(&p, &[0.0; 3], &[25.0; 2], 0.5, 1.0).is_err());
        assert!(simulate_am(&p, &[0.0; 3], &[25.0; 3], 0.5, 0.0).is_err());
    }

    #[test]
    fn out_of_grid_sets_flag() {
        let mut p = flat_params();
        p.r0 = ParamMap::Table(crate::plant::Grid3 {
            soc: vec![0.0, 1.0],
            temp_c: vec![0.0, 40.0],
            current: vec![-5.0, 5.0],
            values: vec![0.02; 8],
        });
        assert!(!simulate_am(&p, &[1.0; 3], &[25.0; 3], 0.5, 1.0).unwrap().clamped);
        assert!(simulate_am(&p, &[1.0; 3], &[-10.0; 3], 0.5, 1.0).unwrap().clamped);
    }
}
