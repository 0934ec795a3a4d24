//! Parametric estimation of directional ocean wave spectra from the
//! displacement records of a GPS-tracked buoy.
//!
//! The model and sampling layers are generic over the floating-point type
//! ([`Real`], implemented for `f32` and `f64`). The aliases at the crate root
//! fix the scalar to `f64`, which is what the estimation code uses.

pub mod classical;
pub mod discrete_sampling;
pub mod error;
pub mod frequencies;
pub mod inference;
pub mod scalar;
pub mod simulation;
pub mod spectral_matrix;
pub mod wave_models;

pub use error::{Error, Result};
pub use frequencies::{fourier_index_range, fourier_omega, FrequencySelection};
pub use scalar::Real;
pub use spectral_matrix::Channel;
pub use wave_models::{Param, N_PARAMS};

pub type Parameters = wave_models::Parameters<f64>;
pub type PhysicalContext = wave_models::PhysicalContext<f64>;
pub type WaterDepth = wave_models::WaterDepth<f64>;
pub type SpectralMatrix = spectral_matrix::SpectralMatrix<f64>;
pub type SamplingScheme = discrete_sampling::SamplingScheme<f64>;
pub type CovarianceSequence = discrete_sampling::CovarianceSequence<f64>;
pub type ExpectedPeriodogram = discrete_sampling::ExpectedPeriodogram<f64>;
pub type ExpectedPeriodogramPlan = discrete_sampling::ExpectedPeriodogramPlan<f64>;

pub type Parameters32 = wave_models::Parameters<f32>;
pub type SpectralMatrix32 = spectral_matrix::SpectralMatrix<f32>;
pub type SamplingScheme32 = discrete_sampling::SamplingScheme<f32>;
