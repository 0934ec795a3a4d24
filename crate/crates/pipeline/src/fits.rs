use std::io::Write;

use buoyspec::inference::{fit, FitResult};
use buoyspec::{Param, N_PARAMS};
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::format::float;
use crate::partition::{partition_sea_states, SeaState};
use crate::record::RecordFile;

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub sea_state: usize,
    pub start_time: String,
    pub n: usize,
    pub hs: f64,
    pub result: FitResult,
}

fn fit_one(state: &SeaState, config: &PipelineConfig, ctx: buoyspec::PhysicalContext) -> FitRow {
    let cfg = config.fit_config(ctx, state.sample.delta());
    let result = match fit(&state.sample, &cfg) {
        Ok(r) => r,
        Err(e) => {
            log::warn!("sea state {}: {e}", state.index);
            failed_result(e.to_string())
        }
    };
    log::info!(
        "sea state {} ({}): converged={} iterations={}",
        state.index,
        state.start_time,
        result.converged,
        result.iterations
    );
    FitRow {
        sea_state: state.index,
        start_time: state.start_time.clone(),
        n: state.sample.len(),
        hs: state.sample.significant_wave_height(),
        result,
    }
}

fn failed_result(message: String) -> FitResult {
    let nan = [f64::NAN; N_PARAMS];
    FitResult {
        theta_hat: buoyspec::Parameters::from_array(nan),
        covariance: [nan; N_PARAMS],
        std_errors: nan,
        ci95: [[f64::NAN; 2]; N_PARAMS],
        objective: f64::NAN,
        converged: false,
        iterations: 0,
        gradient_norm: f64::NAN,
        boundary_flags: [false; N_PARAMS],
        fisher_condition: f64::NAN,
        message,
    }
}

/// Fits every complete sea state of the record independently, in parallel,
/// returning rows in sea-state order.
pub fn run_fits(record: &RecordFile, config: &PipelineConfig) -> Result<Vec<FitRow>> {
    let ctx = config.context(record.depth)?;
    let states = partition_sea_states(record, config)?;
    log::info!("fitting {} sea states", states.len());
    config.with_pool(|| states.par_iter().map(|s| fit_one(s, config, ctx)).collect())
}

pub fn fit_table_header() -> Vec<String> {
    let mut cols: Vec<String> = [
        "sea_state",
        "start_time",
        "n",
        "hs",
        "converged",
        "iterations",
        "objective",
        "gradient_norm",
        "fisher_condition",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for p in Param::ALL {
        let name = p.name();
        cols.extend([
            name.to_string(),
            format!("{name}_se"),
            format!("{name}_ci_lo"),
            format!("{name}_ci_hi"),
            format!("{name}_at_bound"),
        ]);
    }
    cols.push("message".into());
    cols
}

pub fn write_fit_table(rows: &[FitRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| crate::error::PipelineError::Data(format!("writing fit table: {e}"));
    w.write_record(fit_table_header()).map_err(io)?;
    for row in rows {
        let r = &row.result;
        let mut rec = vec![
            row.sea_state.to_string(),
            row.start_time.clone(),
            row.n.to_string(),
            float(row.hs),
            r.converged.to_string(),
            r.iterations.to_string(),
            float(r.objective),
            float(r.gradient_norm),
            float(r.fisher_condition),
        ];
        let theta = r.theta_hat.to_array();
        for i in 0..N_PARAMS {
            rec.extend([
                float(theta[i]),
                float(r.std_errors[i]),
                float(r.ci95[i][0]),
                float(r.ci95[i][1]),
                r.boundary_flags[i].to_string(),
            ]);
        }
        rec.push(r.message.clone());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()
        .map_err(|e| crate::error::PipelineError::Data(format!("writing fit table: {e}")))?;
    Ok(())
}
