//! Buoy displacement records.
//!
//! The file format is a metadata line followed by a CSV table:
//!
//! ```text
//! # delta=0.78125 depth=inf station=example
//! time,z,x,y
//! 2020-01-01T00:00:00Z,0.12,-0.03,0.40
//! ```
//!
//! `time` is ISO-8601 (a missing offset means UTC) or epoch seconds;
//! displacements are in metres. Other `key=value` pairs in the metadata
//! line are kept but not interpreted.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use buoyspec::WaterDepth;
use chrono::{DateTime, NaiveDateTime};

use crate::error::{PipelineError, Result};

/// Largest tolerated deviation of a time step from a multiple of Δ, seconds.
pub const SPACING_TOL: f64 = 1e-6;

/// Missing samples between two consecutive rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    /// Data row (1-based) after which samples are missing.
    pub after_row: usize,
    pub missing: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordFile {
    pub delta: f64,
    pub depth: WaterDepth,
    pub station: String,
    pub metadata: Vec<(String, String)>,
    /// Seconds since the Unix epoch (or since an arbitrary origin for
    /// numeric time columns).
    pub times: Vec<f64>,
    /// Time column as written in the file.
    pub time_labels: Vec<String>,
    /// (z, x, y) per row.
    pub rows: Vec<[f64; 3]>,
    pub gaps: Vec<Gap>,
}

impl RecordFile {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Sample slot of each row: round((t − t₀)/Δ).
    pub fn slots(&self) -> Vec<usize> {
        let t0 = self.times.first().copied().unwrap_or(0.0);
        self.times
            .iter()
            .map(|t| ((t - t0) / self.delta).round() as usize)
            .collect()
    }
}

fn parse_time(s: &str) -> Option<f64> {
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp() as f64 + t.timestamp_subsec_nanos() as f64 * 1e-9);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            let t = t.and_utc();
            return Some(t.timestamp() as f64 + t.timestamp_subsec_nanos() as f64 * 1e-9);
        }
    }
    None
}

fn parse_metadata(
    line: &str,
    path: &str,
) -> Result<(f64, WaterDepth, String, Vec<(String, String)>)> {
    let bad = |message: String| PipelineError::Parse {
        path: path.to_string(),
        row: 0,
        line: 1,
        message,
    };
    let body = line.trim().strip_prefix('#').ok_or_else(|| {
        bad("expected a metadata line `# delta=<s> depth=<m|inf> station=<id>`".into())
    })?;
    let mut pairs = Vec::new();
    for token in body.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| bad(format!("metadata token `{token}` is not key=value")))?;
        pairs.push((k.to_string(), v.to_string()));
    }
    let find = |key: &str| {
        pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };
    let delta: f64 = find("delta")
        .ok_or_else(|| bad("metadata lacks delta".into()))?
        .parse()
        .map_err(|_| bad("delta is not a number".into()))?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(bad(format!("delta must be positive, got {delta}")));
    }
    let depth = match find("depth") {
        None | Some("inf") | Some("infinite") => WaterDepth::Infinite,
        Some(v) => {
            let h: f64 = v
                .parse()
                .map_err(|_| bad(format!("depth `{v}` is not a number or `inf`")))?;
            if !(h > 0.0) {
                return Err(bad(format!("depth must be positive, got {h}")));
            }
            if h.is_infinite() {
                WaterDepth::Infinite
            } else {
                WaterDepth::Finite(h)
            }
        }
    };
    let station = find("station").unwrap_or("unknown").to_string();
    Ok((delta, depth, station, pairs))
}

/// Reads a record from any reader; `name` labels error messages.
pub fn parse_record<R: Read>(reader: R, name: &str) -> Result<RecordFile> {
    let mut reader = BufReader::new(reader);
    let mut first = String::new();
    reader
        .read_line(&mut first)
        .map_err(|e| PipelineError::io(name, e))?;
    let (delta, depth, station, metadata) = parse_metadata(&first, name)?;

    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = csv
        .headers()
        .map_err(|e| PipelineError::Data(format!("{name}: {e}")))?
        .clone();
    let names: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    if names != ["time", "z", "x", "y"] {
        return Err(PipelineError::Parse {
            path: name.to_string(),
            row: 0,
            line: 2,
            message: format!("expected columns time,z,x,y, found {}", names.join(",")),
        });
    }

    let mut times = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    let mut nan_run: Option<(usize, usize)> = None;
    for (i, rec) in csv.records().enumerate() {
        let row = i + 1;
        let line = row + 2;
        let fail = |message: String| PipelineError::Parse {
            path: name.to_string(),
            row,
            line,
            message,
        };
        let rec = rec.map_err(|e| fail(e.to_string()))?;
        if rec.len() != 4 {
            return Err(fail(format!("expected 4 fields, found {}", rec.len())));
        }
        let t =
            parse_time(&rec[0]).ok_or_else(|| fail(format!("cannot read time `{}`", &rec[0])))?;
        let mut v = [0.0; 3];
        for c in 0..3 {
            v[c] = rec[c + 1].parse::<f64>().map_err(|_| {
                fail(format!(
                    "column {} value `{}` is not a number",
                    ["z", "x", "y"][c],
                    &rec[c + 1]
                ))
            })?;
        }
        if v.iter().any(|x| !x.is_finite()) {
            nan_run = Some(nan_run.map_or((row, row), |(s, _)| (s, row)));
        } else if let Some((s, e)) = nan_run {
            return Err(PipelineError::Data(format!(
                "{name}: non-finite displacements in rows {s}..={e}"
            )));
        }
        if let Some(&prev) = times.last() {
            let step: f64 = t - prev;
            if !(step > 0.0) {
                return Err(fail(format!(
                    "time {t} does not increase (previous {prev})"
                )));
            }
            let k = (step / delta).round();
            if k < 1.0 || (step - k * delta).abs() > SPACING_TOL {
                return Err(fail(format!(
                    "time step {step} s is not a multiple of delta = {delta} s"
                )));
            }
            if k > 1.0 {
                log::warn!(
                    "{name}: {} samples missing after row {}",
                    k as usize - 1,
                    row - 1
                );
                gaps.push(Gap {
                    after_row: row - 1,
                    missing: k as usize - 1,
                });
            }
        }
        times.push(t);
        labels.push(rec[0].to_string());
        rows.push(v);
    }
    if let Some((s, e)) = nan_run {
        return Err(PipelineError::Data(format!(
            "{name}: non-finite displacements in rows {s}..={e}"
        )));
    }
    Ok(RecordFile {
        delta,
        depth,
        station,
        metadata,
        times,
        time_labels: labels,
        rows,
        gaps,
    })
}

pub fn ingest(path: &Path) -> Result<RecordFile> {
    let file = std::fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let record = parse_record(file, &path.display().to_string())?;
    log::info!(
        "{}: {} rows, delta = {} s, {} gap(s)",
        path.display(),
        record.len(),
        record.delta,
        record.gaps.len()
    );
    Ok(record)
}

/// Writes a record in the format [`parse_record`] reads. Times are written
/// as epoch seconds.
pub fn write_record(record: &RecordFile, out: &mut impl std::io::Write) -> std::io::Result<()> {
    let depth = match record.depth {
        WaterDepth::Infinite => "inf".to_string(),
        WaterDepth::Finite(h) => format!("{h}"),
    };
    writeln!(
        out,
        "# delta={} depth={depth} station={}",
        record.delta, record.station
    )?;
    writeln!(out, "time,z,x,y")?;
    for (t, r) in record.time_labels.iter().zip(&record.rows) {
        writeln!(
            out,
            "{t},{},{},{}",
            crate::format::float(r[0]),
            crate::format::float(r[1]),
            crate::format::float(r[2])
        )?;
    }
    Ok(())
}
