//! Calibration CSV ingestion and export.
//!
//! Schema: `t_s,pressure_kpa,displacement_mm,v1_mv,v2_mv,cycle,branch`.

use std::io::{Read, Write};

use crate::calibration::{Branch, CalibrationSample};
use crate::error::{Error, Result};

pub const CALIBRATION_HEADER: [&str; 7] = [
    "t_s",
    "pressure_kpa",
    "displacement_mm",
    "v1_mv",
    "v2_mv",
    "cycle",
    "branch",
];

pub fn load_samples<R: Read>(reader: R) -> Result<Vec<CalibrationSample>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = csv_reader
            .headers()
            .map_err(|e| parse_err(1, format!("cannot read header: {e}")))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != CALIBRATION_HEADER {
            return Err(parse_err(
                1,
                format!(
                    "bad header: expected '{}', got '{}'",
                    CALIBRATION_HEADER.join(","),
                    got.join(",")
                ),
            ));
        }
    }
    let mut out = Vec::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let row = idx + 2;
        let record = record.map_err(|e| parse_err(row, e.to_string()))?;
        if record.len() != CALIBRATION_HEADER.len() {
            return Err(parse_err(
                row,
                format!(
                    "expected {} columns, got {}",
                    CALIBRATION_HEADER.len(),
                    record.len()
                ),
            ));
        }
        let f = |i: usize, name: &str| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(row, format!("bad {name} value '{}'", &record[i])))
        };
        let cycle: u32 = record[5]
            .parse()
            .map_err(|_| parse_err(row, format!("bad cycle value '{}'", &record[5])))?;
        let branch: Branch = record[6].parse().map_err(|e: String| parse_err(row, e))?;
        out.push(CalibrationSample {
            t_s: f(0, "t_s")?,
            pressure_kpa: f(1, "pressure_kpa")?,
            displacement_mm: f(2, "displacement_mm")?,
            v1_mv: f(3, "v1_mv")?,
            v2_mv: f(4, "v2_mv")?,
            cycle,
            branch,
        });
    }
    if out.is_empty() {
        return Err(parse_err(2, "no calibration samples".into()));
    }
    Ok(out)
}

pub fn write_samples<W: Write>(samples: &[CalibrationSample], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CALIBRATION_HEADER)?;
    for s in samples {
        w.write_record(&[
            format!("{}", s.t_s),
            format!("{}", s.pressure_kpa),
            format!("{}", s.displacement_mm),
            format!("{}", s.v1_mv),
            format!("{}", s.v2_mv),
            format!("{}", s.cycle),
            s.branch.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_err(row: usize, message: String) -> Error {
    Error::Parse { row, message }
}
