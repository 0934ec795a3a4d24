//! Per-sea-state diagnostic tables in long format.

use std::path::{Path, PathBuf};

use buoyspec::classical::{cross_spectra, error_function, mean_direction};
use buoyspec::FrequencySelection;
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::{PipelineError, Result};
use crate::format::float;
use crate::partition::partition_sea_states;
use crate::record::RecordFile;

/// Diagnostics of one sea state on the selected band.
#[derive(Debug, Clone, PartialEq)]
pub struct SeaStateDiagnostics {
    pub sea_state: usize,
    pub start_time: String,
    pub hs: f64,
    pub omegas: Vec<f64>,
    /// Auto-spectra (f_zz, f_xx, f_yy).
    pub auto_spectra: Vec<[f64; 3]>,
    pub error_fn: Vec<f64>,
    pub mean_direction: Vec<f64>,
}

pub fn diagnose(record: &RecordFile, config: &PipelineConfig) -> Result<Vec<SeaStateDiagnostics>> {
    let n = config.validate_for(record.delta)?;
    let (low, high) = (config.low_cut, config.high_cut_for(record.delta));
    // Fails on an empty band before any spectra are computed.
    FrequencySelection::band(n, record.delta, low, high)?;
    let ctx = config.context(record.depth)?;
    let states = partition_sea_states(record, config)?;
    config.with_pool(|| {
        states
            .par_iter()
            .map(|s| {
                let est = cross_spectra(&s.sample, config.spectral_method)?;
                let keep: Vec<usize> = (1..est.omegas.len())
                    .filter(|&k| est.omegas[k] >= low && est.omegas[k] <= high)
                    .collect();
                let omegas: Vec<f64> = keep.iter().map(|&k| est.omegas[k]).collect();
                let values: Vec<_> = keep.iter().map(|&k| est.values[k]).collect();
                log::info!("diagnostics for sea state {} ({})", s.index, s.start_time);
                Ok(SeaStateDiagnostics {
                    sea_state: s.index,
                    start_time: s.start_time.clone(),
                    hs: s.sample.significant_wave_height(),
                    auto_spectra: values
                        .iter()
                        .map(|m| [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re])
                        .collect(),
                    error_fn: error_function(&omegas, &values, &ctx)?,
                    mean_direction: mean_direction(&omegas, &values, &ctx)?,
                    omegas,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path)
        .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))
}

/// Writes `hs.csv`, `spectrogram.csv`, `error_function.csv` and
/// `mean_direction.csv`; returns their paths.
pub fn write_diagnostics(diags: &[SeaStateDiagnostics], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let err = |e: csv::Error| PipelineError::Data(e.to_string());
    let paths: Vec<PathBuf> = [
        "hs.csv",
        "spectrogram.csv",
        "error_function.csv",
        "mean_direction.csv",
    ]
    .iter()
    .map(|f| dir.join(f))
    .collect();
    let mut hs = csv_writer(&paths[0])?;
    let mut spec = csv_writer(&paths[1])?;
    let mut rfn = csv_writer(&paths[2])?;
    let mut dirn = csv_writer(&paths[3])?;
    hs.write_record(["sea_state", "start_time", "hs"])
        .map_err(err)?;
    spec.write_record(["sea_state", "start_time", "omega", "f_zz", "f_xx", "f_yy"])
        .map_err(err)?;
    rfn.write_record(["sea_state", "start_time", "omega", "r"])
        .map_err(err)?;
    dirn.write_record(["sea_state", "start_time", "omega", "direction"])
        .map_err(err)?;
    for d in diags {
        let id = d.sea_state.to_string();
        hs.write_record([id.clone(), d.start_time.clone(), float(d.hs)])
            .map_err(err)?;
        for (k, &w) in d.omegas.iter().enumerate() {
            let a = d.auto_spectra[k];
            spec.write_record([
                id.clone(),
                d.start_time.clone(),
                float(w),
                float(a[0]),
                float(a[1]),
                float(a[2]),
            ])
            .map_err(err)?;
            rfn.write_record([
                id.clone(),
                d.start_time.clone(),
                float(w),
                float(d.error_fn[k]),
            ])
            .map_err(err)?;
            dirn.write_record([
                id.clone(),
                d.start_time.clone(),
                float(w),
                float(d.mean_direction[k]),
            ])
            .map_err(err)?;
        }
    }
    for (w, p) in [
        (hs, &paths[0]),
        (spec, &paths[1]),
        (rfn, &paths[2]),
        (dirn, &paths[3]),
    ] {
        let mut w = w;
        w.flush().map_err(|e| PipelineError::io(p, e))?;
    }
    Ok(paths)
}
