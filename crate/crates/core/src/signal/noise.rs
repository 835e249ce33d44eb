use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::series::TimeSeries;
use crate::error::{Error, Result};

/// Mean-removed signal power.
pub fn signal_power(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// Adds white Gaussian noise to `x` at the requested SNR.
/// `snr_db = +inf` returns the input untouched.
pub fn awgn<R: Rng + ?Sized>(x: &[f64], snr_db: f64, rng: &mut R) -> Result<Vec<f64>> {
    if snr_db == f64::INFINITY {
        return Ok(x.to_vec());
    }
    let p = signal_power(x);
    if !(p > 0.0) {
        return Err(Error::Precondition(
            "signal has zero power; SNR is undefined".into(),
        ));
    }
    let sd = (p / 10f64.powf(snr_db / 10.0)).sqrt();
    let normal = Normal::new(0.0, sd).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(x.iter().map(|v| v + normal.sample(rng)).collect())
}

/// Per-channel AWGN on the named channels, deterministic for a given seed.
pub fn add_awgn(ts: &TimeSeries, snr_db: f64, channels: &[&str], seed: u64) -> Result<TimeSeries> {
    for c in channels {
        ts.require(c)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failed = None;
    let out = ts.map_channels(ts.sample_rate_hz(), |name, data| {
        if !channels.contains(&name) {
            return data.to_vec();
        }
        match awgn(data, snr_db, &mut rng) {
            Ok(v) => v,
            Err(e) => {
                failed.get_or_insert((name.to_string(), e));
                data.to_vec()
            }
        }
    })?;
    match failed {
        Some((name, e)) => Err(Error::Precondition(format!("channel `{name}`: {e}"))),
        None => Ok(out),
    }
}
