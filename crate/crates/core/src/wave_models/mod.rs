//! Continuous-frequency parametric models: JONSWAP marginal spectrum,
//! bimodal wrapped Gaussian spreading, the frequency-direction spectrum and
//! the spectral density matrix of buoy displacements.
//!
//! Heave-pitch-roll and other instruments would plug in here with a
//! different transfer function; only displacement buoys are modelled.

mod dispersion;
mod jonswap;
mod params;
mod spreading;
mod transfer;

pub use dispersion::{depth_attenuation, dispersion_wavenumber};
pub use jonswap::{jonswap_sdf, PEAK_WIDTH_ABOVE, PEAK_WIDTH_BELOW};
pub use params::{Param, Parameters, PhysicalContext, WaterDepth, N_PARAMS};
pub use spreading::{freq_dir_spectrum, spreading_density, spreading_shape, SpreadingShape};
pub use transfer::{sdf_matrix, sdf_matrix_gradient};

pub(crate) use spreading::{shape_at, wrapped_normal};
pub(crate) use transfer::{model_pattern, model_pattern_with_gradient, EntryPattern};
