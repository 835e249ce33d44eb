//! Data ingestion and preprocessing: time series containers, CSV I/O,
//! anti-alias decimation, noise injection, scaling and subset selection.

mod csv_io;
mod filter;
mod noise;
mod scaling;
mod series;
mod subset;

pub use csv_io::{load_csv, read_csv, write_csv, CsvSchema};
pub use filter::{antialias_downsample, design_lowpass, fir_filter_centered};
pub use noise::{add_awgn, awgn, signal_power};
pub use scaling::{denormalize, normalize, ColumnScale, ScalingInfo};
pub use series::{channel, Cycle, Dataset, TimeSeries};
pub use subset::space_filling_subset;
