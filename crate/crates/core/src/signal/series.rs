use std::collections::BTreeMap;

use crate::error::{ensure, Error, Result};

/// Canonical channel names. They double as CSV column headers.
pub mod channel {
    pub const CURRENT: &str = "i_a";
    pub const TEMPERATURE: &str = "temp_c";
    pub const SOC: &str = "soc";
    pub const VOLTAGE: &str = "v";
    pub const ERROR: &str = "e";
}

/// Uniformly sampled multichannel record.
///
/// All channels share one length (at least 1) and every sample is finite.
/// A channel named [`channel::SOC`] is additionally bounded to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    sample_rate_hz: f64,
    names: Vec<String>,
    data: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(sample_rate_hz: f64, channels: Vec<(S, Vec<f64>)>) -> Result<Self> {
        ensure(sample_rate_hz.is_finite() && sample_rate_hz > 0.0, || {
            format!("sample rate must be positive, got {sample_rate_hz}")
        })?;
        ensure(!channels.is_empty(), || "time series needs at least one channel".into())?;
        let mut ts = TimeSeries {
            sample_rate_hz,
            names: Vec::with_capacity(channels.len()),
            data: Vec::with_capacity(channels.len()),
        };
        for (name, values) in channels {
            ts.push_channel(name.into(), values)?;
        }
        Ok(ts)
    }

    fn push_channel(&mut self, name: String, values: Vec<f64>) -> Result<()> {
        ensure(!values.is_empty(), || format!("channel `{name}` is empty"))?;
        if let Some(first) = self.data.first() {
            if first.len() != values.len() {
                return Err(Error::Precondition(format!(
                    "channel `{name}` has {} samples, expected {}",
                    values.len(),
                    first.len()
                )));
            }
        }
        ensure(!self.names.contains(&name), || format!("duplicate channel `{name}`"))?;
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!(
                "channel `{name}` has a non-finite sample at index {k}"
            )));
        }
        if name == channel::SOC {
            if let Some(k) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Precondition(format!(
                    "soc sample {} at index {k} outside [0, 1]",
                    values[k]
                )));
            }
        }
        self.names.push(name);
        self.data.push(values);
        Ok(())
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.data[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn channels(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names
            .iter()
            .zip(&self.data)
            .map(|(n, d)| (n.as_str(), d.as_slice()))
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.data[k].as_slice())
    }

    /// Like [`channel`](Self::channel) but a missing channel is an error.
    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.channel(name)
            .ok_or_else(|| Error::Schema(format!("missing channel `{name}`")))
    }

    /// Returns a copy with `name` replaced, or appended if absent.
    pub fn with_channel(&self, name: &str, values: Vec<f64>) -> Result<Self> {
        let mut out = self.clone();
        if let Some(k) = out.names.iter().position(|n| n == name) {
            out.names.remove(k);
            out.data.remove(k);
            let mut tmp = TimeSeries {
                sample_rate_hz: out.sample_rate_hz,
                names: vec![],
                data: vec![],
            };
            tmp.push_channel(name.to_string(), values)?;
            if !out.data.is_empty() && out.data[0].len() != tmp.data[0].len() {
                return Err(Error::Dimension {
                    expected: out.data[0].len(),
                    got: tmp.data[0].len(),
                });
            }
            out.names.insert(k, tmp.names.pop().unwrap());
            out.data.insert(k, tmp.data.pop().unwrap());
        } else {
            out.push_channel(name.to_string(), values)?;
        }
        Ok(out)
    }

    /// Applies `f` to every channel, producing a series at a new sample rate.
    pub(crate) fn map_channels<F>(&self, sample_rate_hz: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(&str, &[f64]) -> Vec<f64>,
    {
        let channels = self
            .channels()
            .map(|(n, d)| (n.to_string(), f(n, d)))
            .collect();
        TimeSeries::new(sample_rate_hz, channels)
    }

    /// Contiguous slice `[start, end)` of every channel.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        ensure(start < end && end <= self.len(), || {
            format!("invalid slice {start}..{end} of length {}", self.len())
        })?;
        self.map_channels(self.sample_rate_hz, |_, d| d[start..end].to_vec())
    }
}

/// A named drive cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub name: String,
    pub series: TimeSeries,
}

/// Ordered collection of cycles sharing one channel schema and sample rate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    cycles: Vec<Cycle>,
    pub metadata: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(cycles: Vec<Cycle>) -> Result<Self> {
        let mut ds = Dataset::default();
        for c in cycles {
            ds.push(c)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, cycle: Cycle) -> Result<()> {
        if let Some(first) = self.cycles.first() {
            let a: Vec<&str> = first.series.channel_names().collect();
            let b: Vec<&str> = cycle.series.channel_names().collect();
            if a != b {
                return Err(Error::Schema(format!(
                    "cycle `{}` has channels {b:?}, dataset uses {a:?}",
                    cycle.name
                )));
            }
            if first.series.sample_rate_hz() != cycle.series.sample_rate_hz() {
                return Err(Error::Schema(format!(
                    "cycle `{}` sampled at {} Hz, dataset uses {} Hz",
                    cycle.name,
                    cycle.series.sample_rate_hz(),
                    first.series.sample_rate_hz()
                )));
            }
        }
        self.cycles.push(cycle);
        Ok(())
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_channels() {
        let err = TimeSeries::new(10.0, vec![("a", vec![1.0, 2.0]), ("b", vec![1.0])]);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_soc_out_of_range_and_nan() {
        assert!(TimeSeries::new(10.0, vec![(channel::SOC, vec![0.5, 1.2])]).is_err());
        assert!(TimeSeries::new(10.0, vec![("x", vec![f64::NAN])]).is_err());
        assert!(TimeSeries::new(0.0, vec![("x", vec![1.0])]).is_err());
    }

    #[test]
    fn with_channel_replaces_in_place() {
        let ts = TimeSeries::new(1.0, vec![("a", vec![1.0]), ("b", vec![2.0])]).unwrap();
        let ts = ts.with_channel("a", vec![5.0]).unwrap();
        assert_eq!(ts.channel_names().collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(ts.channel("a").unwrap(), &[5.0]);
        let ts = ts.with_channel("c", vec![7.0]).unwrap();
        assert_eq!(ts.channel("c").unwrap(), &[7.0]);
    }

    #[test]
    fn dataset_rejects_mixed_schema() {
        let a = TimeSeries::new(1.0, vec![("a", vec![1.0])]).unwrap();
        let b = TimeSeries::new(1.0, vec![("b", vec![1.0])]).unwrap();
        let res = Dataset::new(vec![
            Cycle { name: "x".into(), series: a },
            Cycle { name: "y".into(), series: b },
        ]);
        assert!(matches!(res, Err(Error::Schema(_))));
    }
}
