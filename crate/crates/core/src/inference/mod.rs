//! Periodograms, Whittle and debiased Whittle likelihoods with analytic
//! gradients, interior-point Fisher scoring and expected-information
//! standard errors.

mod fit;
mod init;
pub mod likelihood;
pub mod optimizer;
mod periodogram;
mod sample;

pub use fit::{fit, fit_with_selection, FitConfig, FitResult};
pub use init::{initial_parameters, smoothing_half_width};
pub use likelihood::{
    debiased_whittle_loglik, debiased_whittle_loglik_with_gradient, expected_fisher,
    fisher_information, whittle_loglik, whittle_loglik_with_gradient, FisherInformation,
    LikelihoodEvaluation, Objective, SpectralModel, WhittleLikelihood,
};
pub use optimizer::{OptimizerSettings, ParameterBounds, Transform};
pub use periodogram::{dft, periodogram, Periodogram};
pub use sample::SeaStateSample;
