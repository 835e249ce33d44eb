use std::f64::consts::PI;

use super::series::{channel, TimeSeries};
use crate::error::{ensure, Error, Result};

/// Hamming-windowed sinc low-pass with unity DC gain.
///
/// The tap count is odd and scales as `6.6 * fs / cutoff`, which puts the
/// start of the Hamming stopband (about -53 dB) at `1.25 * cutoff`.
pub fn design_lowpass(cutoff_hz: f64, sample_rate_hz: f64) -> Vec<f64> {
    let mut n = (6.6 * sample_rate_hz / cutoff_hz).ceil() as usize;
    if n % 2 == 0 {
        n += 1;
    }
    let fc = cutoff_hz / sample_rate_hz;
    let mid = (n / 2) as f64;
    let mut taps: Vec<f64> = (0..n)
        .map(|k| {
            let m = k as f64 - mid;
            let sinc = if m == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * m).sin() / (PI * m)
            };
            let w = 0.54 - 0.46 * (2.0 * PI * k as f64 / (n - 1) as f64).cos();
            sinc * w
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Zero-phase application of an odd-length linear-phase FIR: the output is
/// aligned with the input (group delay removed). Edges are extended by
/// holding the first/last sample.
pub fn fir_filter_centered(x: &[f64], taps: &[f64]) -> Vec<f64> {
    debug_assert!(taps.len() % 2 == 1);
    let half = taps.len() / 2;
    let n = x.len() as isize;
    let at = |i: isize| x[i.clamp(0, n - 1) as usize];
    (0..n)
        .map(|k| {
            taps.iter()
                .enumerate()
                .map(|(j, &h)| h * at(k + half as isize - j as isize))
                .sum()
        })
        .collect()
}

/// Low-pass filters every channel at `cutoff_hz` and decimates to
/// `target_hz`. The input rate must be an integer multiple of the target.
pub fn antialias_downsample(ts: &TimeSeries, cutoff_hz: f64, target_hz: f64) -> Result<TimeSeries> {
    let fs = ts.sample_rate_hz();
    ensure(cutoff_hz > 0.0 && target_hz > 0.0, || {
        "cutoff and target rate must be positive".into()
    })?;
    ensure(fs >= 2.0 * target_hz, || {
        format!("input rate {fs} Hz is below twice the target rate {target_hz} Hz")
    })?;
    ensure(target_hz >= 2.0 * cutoff_hz, || {
        format!("target rate {target_hz} Hz is below twice the cutoff {cutoff_hz} Hz")
    })?;
    let ratio = fs / target_hz;
    let factor = ratio.round();
    if (ratio - factor).abs() > 1e-9 * ratio {
        return Err(Error::Precondition(format!(
            "decimation ratio {ratio} is not an integer"
        )));
    }
    let factor = factor as usize;
    let taps = design_lowpass(cutoff_hz, fs);
    ts.map_channels(target_hz, |name, data| {
        let filtered = fir_filter_centered(data, &taps);
        let mut out: Vec<f64> = filtered.into_iter().step_by(factor).collect();
        if name == channel::SOC {
            out.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        }
        out
    })
}
