//! JSON configuration shared by all subcommands. Every field has a default,
//! so `{}` is a valid configuration; command-line flags override the file.

use std::path::{Path, PathBuf};

use buoyspec::classical::{CompetitorSettings, SpectralMethod};
use buoyspec::discrete_sampling::ChannelSet;
use buoyspec::inference::{FitConfig, Objective, OptimizerSettings};
use buoyspec::simulation::{SimulationMethod, DEFAULT_PADDING};
use buoyspec::{Parameters, PhysicalContext, WaterDepth};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::study::Estimator;

/// Water depth as written in the config: a number of metres or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DepthSetting {
    Metres(f64),
    Named(NamedDepth),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedDepth {
    Inf,
}

impl DepthSetting {
    pub fn to_depth(self) -> Result<WaterDepth> {
        match self {
            DepthSetting::Named(NamedDepth::Inf) => Ok(WaterDepth::Infinite),
            DepthSetting::Metres(h) if h.is_infinite() && h > 0.0 => Ok(WaterDepth::Infinite),
            DepthSetting::Metres(h) if h > 0.0 => Ok(WaterDepth::Finite(h)),
            DepthSetting::Metres(h) => Err(PipelineError::Usage(format!(
                "depth must be positive, got {h}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub theta: Parameters,
    /// Defaults to `StudySettings::low_cut_factor · ω_p`.
    #[serde(default)]
    pub low_cut: Option<f64>,
    #[serde(default)]
    pub high_cut: Option<f64>,
}

impl ScenarioSpec {
    pub fn standard() -> Vec<ScenarioSpec> {
        [
            ("scenario1", Parameters::scenario1()),
            ("scenario2", Parameters::scenario2()),
            ("scenario3", Parameters::scenario3()),
        ]
        .into_iter()
        .map(|(name, theta)| ScenarioSpec {
            name: name.into(),
            theta,
            low_cut: None,
            high_cut: None,
        })
        .collect()
    }

    pub fn by_name(name: &str) -> Option<ScenarioSpec> {
        Self::standard().into_iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudySettings {
    pub replications: usize,
    pub n: usize,
    pub delta: f64,
    pub scenarios: Vec<ScenarioSpec>,
    pub estimators: Vec<Estimator>,
    pub low_cut_factor: f64,
    pub simulation_method: SimulationMethod,
    pub padding: usize,
    pub competitors: CompetitorSettings,
    /// Reuse replications already present in the output directory.
    pub resume: bool,
    /// Replications computed between two appends to the estimates file.
    pub chunk: usize,
}

impl Default for StudySettings {
    fn default() -> Self {
        Self {
            replications: 200,
            n: 2304,
            delta: 0.78125,
            scenarios: ScenarioSpec::standard(),
            estimators: Estimator::ALL.to_vec(),
            low_cut_factor: 0.625,
            simulation_method: SimulationMethod::SpectralApproximation,
            padding: DEFAULT_PADDING,
            competitors: CompetitorSettings::default(),
            resume: true,
            chunk: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSettings {
    pub scenario: String,
    /// Overrides the named scenario when present.
    pub theta: Option<Parameters>,
    pub sea_states: usize,
    pub delta: f64,
    /// ω_p of the last sea state; ω_p moves linearly from the scenario value.
    pub omega_p_end: Option<f64>,
    pub start_epoch: f64,
    pub station: String,
    pub method: SimulationMethod,
    pub padding: usize,
    pub output: String,
}

impl Default for SimulateSettings {
    fn default() -> Self {
        Self {
            scenario: "scenario1".into(),
            theta: None,
            sea_states: 4,
            delta: 0.78125,
            omega_p_end: None,
            start_epoch: 1_577_836_800.0,
            station: "synthetic".into(),
            method: SimulationMethod::SpectralApproximation,
            padding: DEFAULT_PADDING,
            output: "record.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Worker threads; 0 uses all available cores.
    pub threads: usize,
    /// Sea-state length in seconds.
    pub sea_state_duration: f64,
    pub low_cut: f64,
    /// Defaults to the Nyquist frequency.
    pub high_cut: Option<f64>,
    pub objective: Objective,
    pub channels: ChannelSet,
    /// Overrides the depth in the record header when present.
    pub depth: Option<DepthSetting>,
    pub gravity: f64,
    pub alias_folds: usize,
    pub optimizer: OptimizerSettings,
    pub spectral_method: SpectralMethod,
    pub simulate: SimulateSettings,
    pub study: StudySettings,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: None,
            out_dir: PathBuf::from("out"),
            seed: 0,
            threads: 0,
            sea_state_duration: 1800.0,
            low_cut: 0.3,
            high_cut: None,
            objective: Objective::Debiased,
            channels: ChannelSet::Full,
            depth: None,
            gravity: 9.81,
            alias_folds: 0,
            optimizer: OptimizerSettings::default(),
            spectral_method: SpectralMethod::default(),
            simulate: SimulateSettings::default(),
            study: StudySettings::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Usage(format!("{}: {e}", path.display())))
    }

    /// Physical context for a record whose header gives `header_depth`.
    pub fn context(&self, header_depth: WaterDepth) -> Result<PhysicalContext> {
        let water_depth = match self.depth {
            Some(d) => d.to_depth()?,
            None => header_depth,
        };
        let ctx = PhysicalContext {
            gravity: self.gravity,
            water_depth,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn high_cut_for(&self, delta: f64) -> f64 {
        self.high_cut.unwrap_or(std::f64::consts::PI / delta)
    }

    /// Checks the band and sea-state length against a sampling interval.
    pub fn validate_for(&self, delta: f64) -> Result<usize> {
        let n = (self.sea_state_duration / delta).floor() as usize;
        if n < 256 {
            return Err(PipelineError::Usage(format!(
                "sea_state_duration {} s at delta {delta} s gives n = {n} < 256",
                self.sea_state_duration
            )));
        }
        let high = self.high_cut_for(delta);
        if !(self.low_cut < high)
            || high > std::f64::consts::PI / delta * (1.0 + 1e-12)
            || self.low_cut < 0.0
        {
            return Err(PipelineError::Usage(format!(
                "band [{}, {high}] must satisfy 0 <= low_cut < high_cut <= pi/delta = {}",
                self.low_cut,
                std::f64::consts::PI / delta
            )));
        }
        Ok(n)
    }

    pub fn fit_config(&self, ctx: PhysicalContext, delta: f64) -> FitConfig {
        FitConfig {
            objective: self.objective,
            channels: self.channels,
            ctx,
            alias_folds: self.alias_folds,
            low_cut: self.low_cut,
            high_cut: self.high_cut_for(delta),
            init: None,
            optimizer: self.optimizer,
            ..FitConfig::default()
        }
    }

    /// Runs `f` on a pool with the configured number of threads.
    pub fn with_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| {
                PipelineError::Usage(format!("cannot start {} worker threads: {e}", self.threads))
            })?;
        Ok(pool.install(f))
    }
}
