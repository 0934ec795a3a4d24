use serde::Serialize;

use crate::discrete_sampling::ChannelSet;
use crate::error::{Error, Result};
use crate::frequencies::FrequencySelection;
use crate::inference::likelihood::{
    fisher_information, Objective, SpectralModel, WhittleLikelihood,
};
use crate::inference::optimizer::{maximize, OptimizerSettings, ParameterBounds};
use crate::inference::{initial_parameters, periodogram, SeaStateSample};
use crate::{Param, Parameters, PhysicalContext, SamplingScheme, N_PARAMS};

/// Everything `fit` needs besides the sample.
#[derive(Debug, Clone)]
pub struct FitConfig {
    pub objective: Objective,
    /// `VerticalOnly` fits the marginal parameters to the heave record
    /// alone; the spreading parameters are then held fixed.
    pub channels: ChannelSet,
    pub ctx: PhysicalContext,
    pub alias_folds: usize,
    pub low_cut: f64,
    pub high_cut: f64,
    /// Starting point; taken from the data when absent.
    pub init: Option<Parameters>,
    pub bounds: ParameterBounds,
    pub fixed: [bool; N_PARAMS],
    pub optimizer: OptimizerSettings,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            objective: Objective::Debiased,
            channels: ChannelSet::Full,
            ctx: PhysicalContext::deep_water(),
            alias_folds: 0,
            low_cut: 0.0,
            high_cut: f64::INFINITY,
            init: None,
            bounds: ParameterBounds::default(),
            fixed: [false; N_PARAMS],
            optimizer: OptimizerSettings::default(),
        }
    }
}

impl FitConfig {
    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_band(mut self, low_cut: f64, high_cut: f64) -> Self {
        self.low_cut = low_cut;
        self.high_cut = high_cut;
        self
    }

    pub fn selection_for(&self, n: usize, delta: f64) -> Result<FrequencySelection> {
        FrequencySelection::band(n, delta, self.low_cut, self.high_cut)
    }
}

/// Estimates with expected-information uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub theta_hat: Parameters,
    /// Inverse expected information; rows and columns of fixed parameters are NaN.
    pub covariance: [[f64; N_PARAMS]; N_PARAMS],
    pub std_errors: [f64; N_PARAMS],
    pub ci95: [[f64; 2]; N_PARAMS],
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub boundary_flags: [bool; N_PARAMS],
    pub fisher_condition: f64,
    pub message: String,
}

impl FitResult {
    fn failed(theta: Parameters, message: String) -> Self {
        Self {
            theta_hat: theta,
            covariance: [[f64::NAN; N_PARAMS]; N_PARAMS],
            std_errors: [f64::NAN; N_PARAMS],
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
}

/// 97.5% standard normal quantile.
const Z_975: f64 = 1.959963984540054;

/// Maximises the configured Whittle-type likelihood for one sea state.
pub fn fit(sample: &SeaStateSample, config: &FitConfig) -> Result<FitResult> {
    let selection = config.selection_for(sample.len(), sample.delta())?;
    fit_with_selection(sample, config, &selection)
}

pub fn fit_with_selection(
    sample: &SeaStateSample,
    config: &FitConfig,
    selection: &FrequencySelection,
) -> Result<FitResult> {
    let sample = sample.demeaned();
    let pgram = periodogram(&sample);
    let scheme =
        SamplingScheme::new(sample.delta(), sample.len()).with_alias_folds(config.alias_folds);
    let model = SpectralModel::new(
        config.objective,
        config.channels,
        config.ctx,
        scheme,
        selection.clone(),
    )?;
    let lik = WhittleLikelihood::new(&pgram, model)?;

    let mut fixed = config.fixed;
    if config.channels == ChannelSet::VerticalOnly {
        for p in Param::SPREADING {
            fixed[p as usize] = true;
        }
    }
    let start = match config.init {
        Some(t) => t,
        None => initial_parameters(&pgram, selection)?,
    };
    let start = config.bounds.interior(&start, 1e-3);
    let outcome = match maximize(
        |th, full| lik.evaluate(th, full, full),
        &start,
        &config.bounds,
        &fixed,
        &config.optimizer,
    ) {
        Ok(o) => o,
        Err(Error::NumericalConsistency(msg)) => {
            log::warn!("fit failed: {msg}");
            return Ok(FitResult::failed(start, msg));
        }
        Err(e) => return Err(e),
    };
    let theta_hat = outcome.theta.wrapped();

    let free: Vec<usize> = (0..N_PARAMS).filter(|&i| !fixed[i]).collect();
    let (covariance, condition) = match fisher_information(lik.model(), &outcome.theta) {
        Ok(info) => {
            let m = free.len();
            let sub = nalgebra::DMatrix::from_fn(m, m, |a, b| info.matrix[free[a]][free[b]]);
            let sub_cond = crate::inference::likelihood::condition_number_dyn(&sub);
            let inv = invert_symmetric(&sub);
            let mut cov = [[f64::NAN; N_PARAMS]; N_PARAMS];
            for (a, &i) in free.iter().enumerate() {
                for (b, &k) in free.iter().enumerate() {
                    cov[i][k] = inv[(a, b)];
                }
            }
            (cov, sub_cond)
        }
        Err(e) => {
            log::warn!("expected information unavailable: {e}");
            ([[f64::NAN; N_PARAMS]; N_PARAMS], f64::NAN)
        }
    };
    let std_errors: [f64; N_PARAMS] = std::array::from_fn(|i| {
        if covariance[i][i].is_nan() {
            f64::NAN
        } else {
            covariance[i][i].max(0.0).sqrt()
        }
    });
    let values = theta_hat.to_array();
    let ci95 = std::array::from_fn(|i| {
        [
            values[i] - Z_975 * std_errors[i],
            values[i] + Z_975 * std_errors[i],
        ]
    });
    let mut boundary_flags = config
        .bounds
        .boundary_flags(&outcome.theta, config.optimizer.boundary_tol);
    for i in 0..N_PARAMS {
        if fixed[i] {
            boundary_flags[i] = false;
        } else if boundary_flags[i] {
            log::warn!(
                "{} is at a bound; its interval is reported but unreliable",
                Param::ALL[i].name()
            );
        }
    }
    if !outcome.converged {
        log::warn!("optimiser stopped without converging: {}", outcome.message);
    }
    Ok(FitResult {
        theta_hat,
        covariance,
        std_errors,
        ci95,
        objective: outcome.value,
        converged: outcome.converged,
        iterations: outcome.iterations,
        gradient_norm: outcome.gradient_norm,
        boundary_flags,
        fisher_condition: condition,
        message: outcome.message,
    })
}

/// Inverse of a symmetric non-negative definite matrix, falling back to the
/// pseudo-inverse when it is numerically singular.
fn invert_symmetric(m: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    if let Some(ch) = m.clone().cholesky() {
        return ch.inverse();
    }
    let svd = m.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max();
    svd.pseudo_inverse(eps)
        .unwrap_or_else(|_| nalgebra::DMatrix::from_element(m.nrows(), m.ncols(), f64::NAN))
}
