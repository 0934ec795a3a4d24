//! Batch processing around `buoyspec`: record ingestion, sea-state
//! partitioning, per-sea-state fits, diagnostics and simulation studies.

pub mod config;
pub mod diagnose;
pub mod error;
pub mod fits;
pub mod format;
pub mod partition;
pub mod record;
pub mod simulate;
pub mod study;

pub use config::{DepthSetting, PipelineConfig, ScenarioSpec, SimulateSettings, StudySettings};
pub use diagnose::{diagnose, write_diagnostics, SeaStateDiagnostics};
pub use error::{PipelineError, Result};
pub use fits::{run_fits, write_fit_table, FitRow};
pub use partition::{partition_sea_states, SeaState};
pub use record::{ingest, parse_record, write_record, Gap, RecordFile};
pub use simulate::simulate_record;
pub use study::{run_sim_study, EstimateRow, Estimator, ScenarioSummary, StudyReport};
