//! Seeded synthetic drive cycles: random current pulses smoothed by a
//! first-order low-pass, and a slowly drifting temperature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveProfile {
    pub name: String,
    pub duration_s: f64,
    /// Pulse amplitudes are uniform in `[-max_current_a, max_current_a]`,
    /// nudged towards `soc_target` by `soc_pull`.
    pub max_current_a: f64,
    /// Added to every pulse (positive charges).
    #[serde(default)]
    pub current_offset_a: f64,
    pub mean_pulse_s: f64,
    /// Time constant of the current smoothing.
    #[serde(default = "default_smoothing")]
    pub smoothing_s: f64,
    /// Temperature drifts linearly from the first to the second value.
    pub temp_c: [f64; 2],
    #[serde(default)]
    pub temp_ripple_c: f64,
    pub soc0: f64,
    #[serde(default = "default_soc_target")]
    pub soc_target: f64,
    #[serde(default)]
    pub soc_pull: f64,
    /// Amplitudes are drawn as `sign(u)|u|^concentration`; values above 1
    /// concentrate the pulses near rest with rarer large excursions.
    #[serde(default = "default_concentration")]
    pub concentration: f64,
    pub seed: u64,
}

fn default_smoothing() -> f64 {
    0.5
}

fn default_concentration() -> f64 {
    1.0
}

fn default_soc_target() -> f64 {
    0.6
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveCycle {
    pub current: Vec<f64>,
    pub temp_c: Vec<f64>,
    pub soc0: f64,
}

impl DriveProfile {
    pub fn validate(&self) -> Result<()> {
        ensure(self.duration_s > 0.0 && self.mean_pulse_s > 0.0 && self.smoothing_s >= 0.0, || {
            format!("profile `{}`: durations must be positive", self.name)
        })?;
        ensure(self.concentration > 0.0, || format!("profile `{}`: concentration must be positive", self.name))?;
        ensure(self.max_current_a >= 0.0, || format!("profile `{}`: negative current bound", self.name))?;
        ensure((0.0..=1.0).contains(&self.soc0), || format!("profile `{}`: soc0 outside [0, 1]", self.name))?;
        Ok(())
    }

    /// Samples the profile at `rate_hz`; `capacity_ah` drives the soc pull.
    pub fn generate(&self, rate_hz: f64, capacity_ah: f64) -> Result<DriveCycle> {
        self.validate()?;
        ensure(rate_hz > 0.0 && capacity_ah > 0.0, || "rate and capacity must be positive".into())?;
        let dt = 1.0 / rate_hz;
        let n = (self.duration_s * rate_hz).round() as usize;
        let pulse = Exp::new(1.0 / self.mean_pulse_s).map_err(|e| Error::Precondition(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let alpha = if self.smoothing_s > 0.0 { 1.0 - (-dt / self.smoothing_s).exp() } else { 1.0 };
        let ripple_phase = rng.random_range(0.0..std::f64::consts::TAU);

        let mut current = Vec::with_capacity(n);
        let mut temp_c = Vec::with_capacity(n);
        let (mut level, mut smooth, mut left, mut soc) = (0.0, 0.0, 0.0, self.soc0);
        for k in 0..n {
            if left <= 0.0 {
                left = pulse.sample(&mut rng).max(dt);
                let pull = self.soc_pull * (self.soc_target - soc) * self.max_current_a;
                let u: f64 = rng.random_range(-1.0..=1.0);
                let u = u.signum() * u.abs().powf(self.concentration);
                level = (u * self.max_current_a + pull)
                    .clamp(-self.max_current_a, self.max_current_a)
                    + self.current_offset_a;
            }
            left -= dt;
            smooth += alpha * (level - smooth);
            current.push(smooth);
            soc += smooth * dt / (3600.0 * capacity_ah);
            let frac = k as f64 / n.max(1) as f64;
            let drift = self.temp_c[0] + (self.temp_c[1] - self.temp_c[0]) * frac;
            let ripple = self.temp_ripple_c * (std::f64::consts::TAU * frac * 3.0 + ripple_phase).sin();
            temp_c.push(drift + ripple);
        }
        Ok(DriveCycle {
            current,
            temp_c,
            soc0: self.soc0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> DriveProfile {
        DriveProfile {
            name: "t".into(),
            duration_s: 100.0,
            max_current_a: 4.0,
            current_offset_a: 0.0,
            mean_pulse_s: 5.0,
            smoothing_s: 0.5,
            temp_c: [20.0, 30.0],
            temp_ripple_c: 0.0,
            soc0: 0.5,
            soc_target: 0.5,
            soc_pull: 1.0,
            concentration: 1.0,
            seed: 7,
        }
    }

    #[test]
    fn bounded_and_seeded() {
        let a = profile().generate(100.0, 4.0).unwrap();
        let b = profile().generate(100.0, 4.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.current.len(), 10_000);
        assert!(a.current.iter().all(|i| i.abs() <= 4.0 + 1e-12));
        assert_eq!(a.temp_c[0], 20.0);
        assert!((a.temp_c[9_999] - 30.0).abs() < 0.01);
    }
}
