//! Tracked-point CSV ingestion and export.
//!
//! Schema (UTF-8, `.` decimal separator, one row per tracked point):
//!
//! ```text
//! state_label,pressure_kpa,waveguide_id,point_index,x_mm,z_mm,tip_displacement_mm
//! ```

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::deformation::{DeformationState, StateLabel, StateLibrary, DEFAULT_SAMPLE_INTERVAL_MM};
use crate::error::{Error, Result};
use crate::geometry::Point2;

pub const TRACKED_POINT_HEADER: [&str; 7] = [
    "state_label",
    "pressure_kpa",
    "waveguide_id",
    "point_index",
    "x_mm",
    "z_mm",
    "tip_displacement_mm",
];

struct PendingState {
    label: StateLabel,
    pressure: f64,
    tip: f64,
    /// (point_index → (point, source row)) per waveguide.
    points: [BTreeMap<u64, (Point2, usize)>; 2],
    first_row: usize,
}

/// Parse a tracked-point CSV into an ordered state library.
pub fn load_states<R: Read>(reader: R) -> Result<StateLibrary> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    {
        let headers = csv_reader
            .headers()
            .map_err(|e| parse_err(1, format!("cannot read header: {e}")))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != TRACKED_POINT_HEADER {
            return Err(parse_err(
                1,
                format!(
                    "bad header: expected '{}', got '{}'",
                    TRACKED_POINT_HEADER.join(","),
                    got.join(",")
                ),
            ));
        }
    }

    let mut pending: BTreeMap<String, PendingState> = BTreeMap::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let row = idx + 2; // 1-based, after the header
        let record = record.map_err(|e| parse_err(row, e.to_string()))?;
        if record.len() != TRACKED_POINT_HEADER.len() {
            return Err(parse_err(
                row,
                format!(
                    "expected {} columns, got {}",
                    TRACKED_POINT_HEADER.len(),
                    record.len()
                ),
            ));
        }
        let label_str = record[0].to_string();
        let label: StateLabel = label_str.parse().map_err(|e: String| parse_err(row, e))?;
        let pressure = parse_f64(&record[1], row, "pressure_kpa")?;
        let waveguide_id: u8 = record[2]
            .parse()
            .map_err(|_| parse_err(row, format!("bad waveguide_id '{}'", &record[2])))?;
        if !(1..=2).contains(&waveguide_id) {
            return Err(parse_err(
                row,
                format!("waveguide_id must be 1 or 2, got {waveguide_id}"),
            ));
        }
        let point_index: u64 = record[3]
            .parse()
            .map_err(|_| parse_err(row, format!("bad point_index '{}'", &record[3])))?;
        let x = parse_f64(&record[4], row, "x_mm")?;
        let z = parse_f64(&record[5], row, "z_mm")?;
        let tip = parse_f64(&record[6], row, "tip_displacement_mm")?;

        let entry = pending.entry(label_str).or_insert_with(|| PendingState {
            label,
            pressure,
            tip,
            points: [BTreeMap::new(), BTreeMap::new()],
            first_row: row,
        });
        if (entry.pressure - pressure).abs() > 1e-9 || (entry.tip - tip).abs() > 1e-9 {
            return Err(parse_err(
                row,
                format!(
                    "state '{label}' has inconsistent pressure or tip displacement \
                     (first seen at row {})",
                    entry.first_row
                ),
            ));
        }
        let slot = &mut entry.points[(waveguide_id - 1) as usize];
        if slot.insert(point_index, (Point2::new(x, z), row)).is_some() {
            return Err(parse_err(
                row,
                format!(
                    "duplicate point: state '{label}' waveguide {waveguide_id} index {point_index}"
                ),
            ));
        }
    }

    let mut states = Vec::with_capacity(pending.len());
    for (_, p) in pending {
        let mut waveguides: [Vec<Point2>; 2] = [Vec::new(), Vec::new()];
        for (w, slot) in p.points.iter().enumerate() {
            let pts: Vec<(Point2, usize)> = slot.values().copied().collect();
            for pair in pts.windows(2) {
                if pair[1].0.x <= pair[0].0.x {
                    return Err(parse_err(
                        pair[1].1,
                        format!(
                            "state '{}' waveguide {}: x must strictly increase with point_index",
                            p.label,
                            w + 1
                        ),
                    ));
                }
            }
            waveguides[w] = pts.into_iter().map(|(pt, _)| pt).collect();
        }
        let state = DeformationState {
            label: p.label,
            pressure_kpa: p.pressure,
            waveguides,
            tip_displacement_mm: p.tip,
        };
        state
            .validate()
            .map_err(|e| parse_err(p.first_row, e.to_string()))?;
        states.push(state);
    }
    StateLibrary::new(states, DEFAULT_SAMPLE_INTERVAL_MM)
}

/// Write a library in the tracked-point schema. Floats use the shortest
/// round-trip form, so a written file reloads bit-identically.
pub fn write_states<W: Write>(library: &StateLibrary, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRACKED_POINT_HEADER)?;
    for state in library.states() {
        for (wg, points) in state.waveguides.iter().enumerate() {
            for (i, p) in points.iter().enumerate() {
                w.write_record(&[
                    state.label.to_string(),
                    format!("{}", state.pressure_kpa),
                    format!("{}", wg + 1),
                    format!("{i}"),
                    format!("{}", p.x),
                    format!("{}", p.z),
                    format!("{}", state.tip_displacement_mm),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(s: &str, row: usize, field: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| parse_err(row, format!("bad {field} value '{s}'")))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(row, format!("non-finite {field} value '{s}'")))
            }
        })
}

fn parse_err(row: usize, message: String) -> Error {
    Error::Parse { row, message }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::synth::{synthesize_states, SynthSpec};

    fn standard_protocol_csv() -> String {
        // 15 states × 2 waveguides × 7 points, tip spacing 0.5 mm.
        let mut out = TRACKED_POINT_HEADER.join(",") + "\n";
        for k in 0..15i32 {
            let label = match k - 7 {
                d if d < 0 => format!("compression_{}", -d),
                0 => "rest".to_string(),
                d => format!("elongation_{d}"),
            };
            let tip = 0.5 * (k - 7) as f64;
            let pressure = -50.0 + 100.0 * k as f64 / 14.0;
            for wg in 1..=2 {
                for i in 0..7 {
                    let x = 8.0 * i as f64;
                    let z = if wg == 1 { 2.0 + tip } else { -2.0 - tip };
                    out.push_str(&format!("{label},{pressure},{wg},{i},{x},{z},{tip}\n"));
                }
            }
        }
        out
    }

    #[test]
    fn standard_protocol_file_loads() {
        let lib = load_states(standard_protocol_csv().as_bytes()).unwrap();
        assert_eq!(lib.len(), 15);
        assert_eq!(lib.states()[0].label, StateLabel::Compression(7));
        assert_eq!(lib.states()[14].label, StateLabel::Elongation(7));
        for s in lib.states() {
            assert_eq!(s.waveguides[0].len(), 7);
            assert_eq!(s.waveguides[1].len(), 7);
        }
    }

    #[test]
    fn single_rest_state_loads() {
        let mut csv = TRACKED_POINT_HEADER.join(",") + "\n";
        for wg in 1..=2 {
            for i in 0..7 {
                csv.push_str(&format!("rest,0,{wg},{i},{},1.0,0\n", i as f64 * 2.0));
            }
        }
        let lib = load_states(csv.as_bytes()).unwrap();
        assert_eq!(lib.len(), 1);
        assert_eq!(lib.states()[0].tip_displacement_mm, 0.0);
    }

    #[test]
    fn shuffled_rows_load_identically() {
        let text = standard_protocol_csv();
        let mut lines: Vec<&str> = text.lines().collect();
        let header = lines.remove(0);
        // Deterministic shuffle: reverse, then interleave halves.
        lines.reverse();
        let mid = lines.len() / 2;
        let (a, b) = lines.split_at(mid);
        let mut shuffled = vec![header.to_string()];
        for i in 0..mid.max(lines.len() - mid) {
            if i < a.len() {
                shuffled.push(a[i].to_string());
            }
            if i < b.len() {
                shuffled.push(b[i].to_string());
            }
        }
        let lib_sorted = load_states(text.as_bytes()).unwrap();
        let lib_shuffled = load_states(shuffled.join("\n").as_bytes()).unwrap();
        assert_eq!(lib_sorted, lib_shuffled);
    }

    #[test]
    fn wrong_column_count_reports_row() {
        let csv = format!("{}\nrest,0,1,0,1.0,2.0\n", TRACKED_POINT_HEADER.join(","));
        let err = load_states(csv.as_bytes()).unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn non_monotone_x_reports_row() {
        let mut csv = TRACKED_POINT_HEADER.join(",") + "\n";
        for wg in 1..=2 {
            for i in 0..7 {
                // Waveguide 2 doubles back at point 3.
                let x = if wg == 2 && i == 3 {
                    1.0
                } else {
                    i as f64 * 2.0
                };
                csv.push_str(&format!("rest,0,{wg},{i},{x},0.5,0\n"));
            }
        }
        let err = load_states(csv.as_bytes()).unwrap_err();
        match err {
            Error::Parse { row, message } => {
                assert_eq!(row, 12, "{message}");
                assert!(message.contains("strictly increase"));
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn duplicate_point_reports_row() {
        let mut csv = TRACKED_POINT_HEADER.join(",") + "\n";
        for i in 0..7 {
            csv.push_str(&format!("rest,0,1,{i},{},0.5,0\n", i as f64));
        }
        csv.push_str("rest,0,1,3,9.0,0.5,0\n");
        let err = load_states(csv.as_bytes()).unwrap_err();
        match err {
            Error::Parse { row, message } => {
                assert_eq!(row, 9);
                assert!(message.contains("duplicate point"));
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn synthetic_library_round_trips_through_csv() {
        let lib = synthesize_states(&SynthSpec::default()).unwrap();
        let mut buf = Vec::new();
        write_states(&lib, &mut buf).unwrap();
        let reloaded = load_states(buf.as_slice()).unwrap();
        assert_eq!(lib.len(), reloaded.len());
        for (a, b) in lib.states().iter().zip(reloaded.states()) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.tip_displacement_mm, b.tip_displacement_mm);
            assert_eq!(a.waveguides, b.waveguides);
        }
    }
}
