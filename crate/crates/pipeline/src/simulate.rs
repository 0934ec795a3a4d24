//! Synthetic records: consecutive, independently simulated sea states.

use buoyspec::simulation::Simulator;
use buoyspec::{Param, SamplingScheme};

use crate::config::{PipelineConfig, ScenarioSpec};
use crate::error::{PipelineError, Result};
use crate::record::RecordFile;

/// Builds a record of `simulate.sea_states` sea states of
/// `sea_state_duration` seconds each. Sea state k uses stream k of the seed;
/// with `omega_p_end` set, ω_p moves linearly across the sea states.
pub fn simulate_record(config: &PipelineConfig) -> Result<RecordFile> {
    let sim = &config.simulate;
    let base = match sim.theta {
        Some(t) => t,
        None => {
            ScenarioSpec::by_name(&sim.scenario)
                .ok_or_else(|| {
                    PipelineError::Usage(format!("unknown scenario `{}`", sim.scenario))
                })?
                .theta
        }
    };
    base.validate()?;
    if sim.sea_states == 0 {
        return Err(PipelineError::Usage(
            "simulate.sea_states must be at least 1".into(),
        ));
    }
    let n = config.validate_for(sim.delta)?;
    let ctx = config.context(buoyspec::WaterDepth::Infinite)?;
    let scheme = SamplingScheme::new(sim.delta, n);
    let mut rows = Vec::with_capacity(n * sim.sea_states);
    for k in 0..sim.sea_states {
        let theta = match sim.omega_p_end {
            Some(end) => {
                let frac = if sim.sea_states > 1 {
                    k as f64 / (sim.sea_states - 1) as f64
                } else {
                    0.0
                };
                base.with(Param::OmegaP, base.omega_p + frac * (end - base.omega_p))
            }
            None => base,
        };
        let simulator = Simulator::new(&theta, &ctx, &scheme, sim.method, sim.padding)?;
        let sample = simulator.sample(config.seed, k as u64)?;
        rows.extend_from_slice(sample.rows());
        log::info!("simulated sea state {k} (omega_p = {})", theta.omega_p);
    }
    let times: Vec<f64> = (0..rows.len())
        .map(|i| sim.start_epoch + i as f64 * sim.delta)
        .collect();
    Ok(RecordFile {
        delta: sim.delta,
        depth: ctx.water_depth,
        station: sim.station.clone(),
        metadata: Vec::new(),
        time_labels: times.iter().map(|t| format!("{t:.6}")).collect(),
        times,
        rows,
        gaps: Vec::new(),
    })
}
