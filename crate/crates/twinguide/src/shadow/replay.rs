//! Stream ingestion and deterministic replay.
//!
//! Streams arrive as CSV (`t_s,v1_active_mv,v1_ambient_mv,v2_active_mv,
//! v2_ambient_mv,pressure_kpa`, pressure optionally empty) or as
//! line-delimited JSON with the same fields for socket feeds.

use std::io::{BufRead, Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shadow::engine::{ShadowEngine, ShadowState};
use crate::shadow::{Alarm, SensorFrame};

pub const STREAM_HEADER: [&str; 6] = [
    "t_s",
    "v1_active_mv",
    "v1_ambient_mv",
    "v2_active_mv",
    "v2_ambient_mv",
    "pressure_kpa",
];

pub fn load_stream_csv<R: Read>(reader: R) -> Result<Vec<SensorFrame>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = csv_reader
            .headers()
            .map_err(|e| parse_err(1, format!("cannot read header: {e}")))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != STREAM_HEADER {
            return Err(parse_err(
                1,
                format!(
                    "bad header: expected '{}', got '{}'",
                    STREAM_HEADER.join(","),
                    got.join(",")
                ),
            ));
        }
    }
    let mut out = Vec::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let row = idx + 2;
        let record = record.map_err(|e| parse_err(row, e.to_string()))?;
        if record.len() != STREAM_HEADER.len() {
            return Err(parse_err(
                row,
                format!(
                    "expected {} columns, got {}",
                    STREAM_HEADER.len(),
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
        let pressure = if record[5].is_empty() {
            None
        } else {
            Some(f(5, "pressure_kpa")?)
        };
        out.push(SensorFrame {
            t_s: f(0, "t_s")?,
            v1_active_mv: f(1, "v1_active_mv")?,
            v1_ambient_mv: f(2, "v1_ambient_mv")?,
            v2_active_mv: f(3, "v2_active_mv")?,
            v2_ambient_mv: f(4, "v2_ambient_mv")?,
            pressure_kpa: pressure,
        });
    }
    Ok(out)
}

/// Line-delimited JSON frames, one object per line; blank lines are skipped.
pub fn load_stream_ndjson<R: BufRead>(reader: R) -> Result<Vec<SensorFrame>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let row = idx + 1;
        let line = line.map_err(Error::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let frame: SensorFrame = serde_json::from_str(&line)
            .map_err(|e| parse_err(row, format!("bad frame JSON: {e}")))?;
        out.push(frame);
    }
    Ok(out)
}

pub fn write_stream_csv<W: Write>(frames: &[SensorFrame], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(STREAM_HEADER)?;
    for f in frames {
        w.write_record(&[
            format!("{}", f.t_s),
            format!("{}", f.v1_active_mv),
            format!("{}", f.v1_ambient_mv),
            format!("{}", f.v2_active_mv),
            format!("{}", f.v2_ambient_mv),
            f.pressure_kpa.map(|p| format!("{p}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Replay tuning.
#[derive(Debug, Clone, Copy)]
pub struct ReplayOptions {
    /// Emit one state every `decimate` frames (every frame still advances
    /// the engine). 1 emits everything.
    pub decimate: usize,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self { decimate: 1 }
    }
}

/// One contiguous run of a non-`None` alarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlarmEpisode {
    pub alarm: Alarm,
    pub start_t_s: f64,
    pub end_t_s: f64,
    /// Frame index (into the accepted stream) where the episode started.
    pub start_frame: usize,
}

/// Replay statistics and diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplaySummary {
    pub frames_in: usize,
    pub frames_dropped_regression: usize,
    pub states_emitted: usize,
    pub episodes: Vec<AlarmEpisode>,
    pub max_abs_deviation_mm: f64,
    /// Frames processed per wall-clock second.
    pub throughput_fps: f64,
    /// Stream duration over wall time; >1 means faster than real time.
    pub speedup_vs_real_time: f64,
}

fn parse_err(row: usize, message: String) -> Error {
    Error::Parse { row, message }
}

/// Drive the engine over a frame sequence, emitting decimated states and a
/// summary. Frames whose timestamp does not advance are dropped and counted.
pub fn replay(
    engine: &mut ShadowEngine,
    frames: &[SensorFrame],
    options: &ReplayOptions,
) -> Result<(Vec<ShadowState>, ReplaySummary)> {
    if options.decimate == 0 {
        return Err(Error::InvalidInput("decimate must be at least 1".into()));
    }
    let started = Instant::now();
    let mut states = Vec::new();
    let mut dropped = 0usize;
    let mut accepted = 0usize;
    let mut last_t = f64::NEG_INFINITY;
    let mut max_dev = 0.0f64;
    let mut episodes: Vec<AlarmEpisode> = Vec::new();
    let mut open: Option<AlarmEpisode> = None;
    let mut first_t = None;

    for frame in frames {
        if frame.t_s <= last_t {
            dropped += 1;
            continue;
        }
        last_t = frame.t_s;
        first_t.get_or_insert(frame.t_s);
        let state = engine.step(frame);
        if let Some(dev) = state.deviation_mm {
            max_dev = max_dev.max(dev.abs());
        }
        match (&mut open, state.alarm) {
            (None, Alarm::None) => {}
            (None, alarm) => {
                open = Some(AlarmEpisode {
                    alarm,
                    start_t_s: state.t_s,
                    end_t_s: state.t_s,
                    start_frame: accepted,
                });
            }
            (Some(ep), alarm) if alarm == ep.alarm => ep.end_t_s = state.t_s,
            (Some(ep), alarm) => {
                episodes.push(*ep);
                open = (alarm != Alarm::None).then_some(AlarmEpisode {
                    alarm,
                    start_t_s: state.t_s,
                    end_t_s: state.t_s,
                    start_frame: accepted,
                });
            }
        }
        if accepted.is_multiple_of(options.decimate) {
            states.push(state);
        }
        accepted += 1;
    }
    if let Some(ep) = open {
        episodes.push(ep);
    }

    let wall = started.elapsed().as_secs_f64().max(1e-9);
    let duration = match (first_t, last_t.is_finite()) {
        (Some(t0), true) => (last_t - t0).max(0.0),
        _ => 0.0,
    };
    let summary = ReplaySummary {
        frames_in: frames.len(),
        frames_dropped_regression: dropped,
        states_emitted: states.len(),
        max_abs_deviation_mm: max_dev,
        throughput_fps: accepted as f64 / wall,
        speedup_vs_real_time: duration / wall,
        episodes,
    };
    Ok((states, summary))
}
