//! Nonparametric cross-spectral estimation, the least-squares and
//! moments-matching competitors, and record diagnostics.

mod bounded;
mod coefficients;
mod competitors;
mod diagnostics;
mod directional;
mod ls;
mod moments;
mod spectra;

pub use bounded::{minimize_bounded, BoundedOutcome, BoundedSettings};
pub use coefficients::{
    coefficients_from_matrices, fourier_coefficients, FourierCoefficients, HEAVE_FLOOR,
};
pub use competitors::{fit_competitors, Competitor, CompetitorFit, CompetitorSettings};
pub use diagnostics::{diagnostics, error_function, mean_direction, DiagnosticSeries};
pub use directional::{
    direction_grid, mem_spreading, mlm_from_matrices, mlm_spreading, DirectionalDistribution,
};
pub use ls::{
    ls_marginal_fit, ls_spreading_fit, MarginalFit, ResidualScale, SpreadingFit, LS_GAMMA_MAX,
    LS_NU_MAX, LS_R_MAX, LS_SIGMA_MAX,
};
pub use moments::{
    fit_stage_one, moments_matching_fit, moments_matching_from_coefficients, MomentsFit,
    StageOneEstimate,
};
pub use spectra::{cross_spectra, sine_tapers, CrossSpectralEstimate, SpectralMethod};
