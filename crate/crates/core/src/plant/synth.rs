use serde::{Deserialize, Serialize};

use super::am::simulate_am;
use super::params::EquivCircuitParams;
use crate::error::{ensure, Result};
use crate::signal::{add_awgn, channel, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcPair {
    pub r: f64,
    pub c: f64,
}

impl RcPair {
    pub fn tau(&self) -> f64 {
        self.r * self.c
    }
}

/// Sign-dependent voltage offset relaxing towards `+magnitude` while
/// charging and `-magnitude` while discharging:
/// `h <- target + (h - target) * exp(-rate * |i| * dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hysteresis {
    /// Asymptotic offset [V].
    pub magnitude: f64,
    /// Relaxation rate per ampere-second [1/(A·s)].
    pub rate: f64,
}

/// Synthetic ground truth: the analytical model plus effects it lacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantConfig {
    pub base: EquivCircuitParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_rc: Option<RcPair>,
    pub hysteresis: Hysteresis,
    /// Voltage sensor SNR in dB; `inf` disables noise.
    pub sensor_noise_snr_db: f64,
    pub seed: u64,
}

impl PlantConfig {
    /// Default parameters plus a τ3 = 1200 s RC pair and 15 mV hysteresis.
    pub fn desk_default() -> Self {
        PlantConfig {
            base: EquivCircuitParams::desk_default(),
            extra_rc: Some(RcPair { r: 0.012, c: 100_000.0 }),
            hysteresis: Hysteresis { magnitude: 0.015, rate: 0.005 },
            sensor_noise_snr_db: 40.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        ensure(self.hysteresis.magnitude >= 0.0 && self.hysteresis.rate >= 0.0, || {
            "hysteresis magnitude and rate must be non-negative".into()
        })?;
        if let Some(rc) = self.extra_rc {
            ensure(rc.r > 0.0 && rc.c > 0.0, || "extra RC pair must be positive".into())?;
        }
        Ok(())
    }
}

/// Simulates the plant and returns the measured channels
/// `i_a, temp_c, soc, v` at `1/dt` Hz.
pub fn simulate_plant(
    config: &PlantConfig,
    current: &[f64],
    temp_c: &[f64],
    soc0: f64,
    dt: f64,
) -> Result<TimeSeries> {
    config.validate()?;
    let am = simulate_am(&config.base, current, temp_c, soc0, dt)?;
    let mut voltage = am.voltage;

    if let Some(rc) = config.extra_rc {
        let a = (-dt / rc.tau()).exp();
        let mut v_c = 0.0;
        for (v, &i) in voltage.iter_mut().zip(current) {
            *v -= v_c;
            v_c = v_c * a + rc.r * (-i) * (1.0 - a);
        }
    }

    let hyst = config.hysteresis;
    if hyst.magnitude > 0.0 {
        let mut h = 0.0;
        for (v, &i) in voltage.iter_mut().zip(current) {
            *v += h;
            if i != 0.0 {
                let target = hyst.magnitude * i.signum();
                h = target + (h - target) * (-hyst.rate * i.abs() * dt).exp();
            }
        }
    }

    let ts = TimeSeries::new(
        1.0 / dt,
        vec![
            (channel::CURRENT, current.to_vec()),
            (channel::TEMPERATURE, temp_c.to_vec()),
            (channel::SOC, am.soc),
            (channel::VOLTAGE, voltage),
        ],
    )?;
    add_awgn(&ts, config.sensor_noise_snr_db, &[channel::VOLTAGE], config.seed)
}
