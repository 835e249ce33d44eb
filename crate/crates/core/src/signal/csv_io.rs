use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::series::{channel, TimeSeries};
use crate::error::{Error, Result};

/// Maps CSV headers onto channels.
///
/// The `t` column is informative only; the series is assumed uniformly
/// sampled at `sample_rate_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub sample_rate_hz: f64,
    /// `(channel name, column header)` pairs that must be present.
    pub required: Vec<(String, String)>,
    /// Pairs that are loaded when present.
    pub optional: Vec<(String, String)>,
}

impl CsvSchema {
    /// `t,i_a,temp_c,soc,v[,e]`.
    pub fn battery(sample_rate_hz: f64) -> Self {
        let pair = |c: &str| (c.to_string(), c.to_string());
        CsvSchema {
            sample_rate_hz,
            required: [channel::CURRENT, channel::TEMPERATURE, channel::SOC, channel::VOLTAGE]
                .into_iter()
                .map(pair)
                .collect(),
            optional: vec![pair(channel::ERROR)],
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

/// Parses CSV from any reader. Rows are numbered as file lines (header = 1).
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            column: String::new(),
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Parse {
            row: 1,
            column: String::new(),
            message: "empty file".into(),
        });
    }

    let mut columns: Vec<(String, String, usize)> = Vec::new();
    for (chan, col) in &schema.required {
        let idx = headers.iter().position(|h| h.trim() == col).ok_or_else(|| {
            Error::Schema(format!("row 1: missing required column `{col}` for channel `{chan}`"))
        })?;
        columns.push((chan.clone(), col.clone(), idx));
    }
    for (chan, col) in &schema.optional {
        if let Some(idx) = headers.iter().position(|h| h.trim() == col) {
            columns.push((chan.clone(), col.clone(), idx));
        }
    }

    let mut data: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    for (line, record) in rdr.records().enumerate() {
        let row = line + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        for ((_, col, idx), out) in columns.iter().zip(data.iter_mut()) {
            let cell = record.get(*idx).ok_or_else(|| Error::Parse {
                row,
                column: col.clone(),
                message: "missing cell".into(),
            })?;
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row,
                column: col.clone(),
                message: format!("not a number: `{cell}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: col.clone(),
                    message: format!("non-finite value `{cell}`"),
                });
            }
            out.push(value);
        }
    }
    if data.first().is_none_or(Vec::is_empty) {
        return Err(Error::Parse {
            row: 2,
            column: String::new(),
            message: "file has no data rows".into(),
        });
    }
    TimeSeries::new(
        schema.sample_rate_hz,
        columns.into_iter().map(|(c, _, _)| c).zip(data).collect(),
    )
}

/// Writes `t` followed by every channel in series order.
pub fn write_csv<W: Write>(ts: &TimeSeries, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    let to_err = |e: csv::Error| Error::Format(e.to_string());
    let mut header = vec!["t".to_string()];
    header.extend(ts.channel_names().map(str::to_string));
    w.write_record(&header).map_err(to_err)?;
    let cols: Vec<&[f64]> = ts.channels().map(|(_, d)| d).collect();
    let dt = ts.dt();
    for k in 0..ts.len() {
        let mut rec = Vec::with_capacity(cols.len() + 1);
        rec.push(format!("{}", k as f64 * dt));
        rec.extend(cols.iter().map(|c| format!("{}", c[k])));
        w.write_record(&rec).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "t,i_a,temp_c,soc,v\n0,1.0,25,0.5,3.7\n0.05,-2,25,0.5,3.68\n0.1,0,24.9,0.5,3.69\n";

    #[test]
    fn parses_three_rows() {
        let ts = read_csv(GOOD.as_bytes(), &CsvSchema::battery(20.0)).unwrap();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.require("i_a").unwrap(), &[1.0, -2.0, 0.0]);
        assert!(ts.channel("e").is_none());
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "t,i_a,temp_c,v\n0,1,25,3.7\n";
        let err = read_csv(text.as_bytes(), &CsvSchema::battery(20.0)).unwrap_err();
        assert!(matches!(err, Error::Schema(ref m) if m.contains("soc")), "{err}");
    }

    #[test]
    fn nan_cell_names_row() {
        let text = "t,i_a,temp_c,soc,v\n0,1,25,0.5,3.7\n0.05,NaN,25,0.5,3.7\n";
        match read_csv(text.as_bytes(), &CsvSchema::battery(20.0)).unwrap_err() {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "i_a");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn garbage_cell_and_empty_file() {
        let text = "t,i_a,temp_c,soc,v\n0,abc,25,0.5,3.7\n";
        assert!(matches!(
            read_csv(text.as_bytes(), &CsvSchema::battery(20.0)),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            read_csv("".as_bytes(), &CsvSchema::battery(20.0)),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            read_csv("t,i_a,temp_c,soc,v\n".as_bytes(), &CsvSchema::battery(20.0)),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn write_then_read_preserves_values() {
        let ts = read_csv(GOOD.as_bytes(), &CsvSchema::battery(20.0)).unwrap();
        let mut buf = Vec::new();
        write_csv(&ts, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), &CsvSchema::battery(20.0)).unwrap();
        assert_eq!(ts, back);
    }
}
