//! The composite competitor estimators: a least-squares marginal fit on the
//! multitaper heave spectrum followed by a spreading fit from MLM, MEM or
//! moments matching.

use serde::{Deserialize, Serialize};

use crate::classical::ls::{
    ls_marginal_fit, ls_spreading_fit, MarginalFit, ResidualScale, SpreadingFit,
};
use crate::classical::{
    cross_spectra, fourier_coefficients, mem_spreading, mlm_spreading, moments_matching_fit,
    SpectralMethod,
};
use crate::error::{Error, Result};
use crate::frequencies::FrequencySelection;
use crate::inference::{initial_parameters, periodogram, SeaStateSample};
use crate::{Parameters, PhysicalContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Competitor {
    LsMlm,
    LsMem,
    MomentsMatching,
}

impl Competitor {
    pub const ALL: [Competitor; 3] = [
        Competitor::LsMlm,
        Competitor::LsMem,
        Competitor::MomentsMatching,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Competitor::LsMlm => "ls_mlm",
            Competitor::LsMem => "ls_mem",
            Competitor::MomentsMatching => "moments_matching",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompetitorSettings {
    pub spectral_method: SpectralMethod,
    pub marginal_scale: ResidualScale,
    pub low_cut: f64,
    pub high_cut: f64,
    /// Spreading fits use at most this many evenly spaced band frequencies.
    pub max_spreading_frequencies: usize,
    pub direction_count: usize,
}

impl Default for CompetitorSettings {
    fn default() -> Self {
        Self {
            spectral_method: SpectralMethod::default(),
            marginal_scale: ResidualScale::Linear,
            low_cut: 0.0,
            high_cut: f64::INFINITY,
            max_spreading_frequencies: 64,
            direction_count: 72,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompetitorFit {
    pub competitor: Competitor,
    pub theta_hat: Parameters,
    pub marginal: MarginalFit,
    pub spreading: SpreadingFit,
    pub converged: bool,
}

fn thin(indices: &[usize], max: usize) -> Vec<usize> {
    if indices.len() <= max || max == 0 {
        return indices.to_vec();
    }
    let mut out: Vec<usize> = (0..max)
        .map(|i| {
            indices
                [(i as f64 * (indices.len() - 1) as f64 / (max - 1).max(1) as f64).round() as usize]
        })
        .collect();
    out.dedup();
    out
}

/// Runs each requested competitor on one sample. The cross-spectrum and
/// the marginal fit are shared between them.
pub fn fit_competitors(
    sample: &SeaStateSample,
    ctx: &PhysicalContext,
    which: &[Competitor],
    settings: &CompetitorSettings,
) -> Result<Vec<CompetitorFit>> {
    let sample = sample.demeaned();
    let est = cross_spectra(&sample, settings.spectral_method)?;
    let band: Vec<usize> = (1..est.omegas.len())
        .filter(|&k| est.omegas[k] >= settings.low_cut && est.omegas[k] <= settings.high_cut)
        .collect();
    if band.len() < 8 {
        return Err(Error::InvalidSelection(format!(
            "only {} estimate frequencies in [{}, {}]",
            band.len(),
            settings.low_cut,
            settings.high_cut
        )));
    }
    let selection = FrequencySelection::band(
        sample.len(),
        sample.delta(),
        settings.low_cut,
        settings.high_cut,
    )?;
    let init = initial_parameters(&periodogram(&sample), &selection)?;

    let omegas: Vec<f64> = band.iter().map(|&k| est.omegas[k]).collect();
    let zz: Vec<f64> = band.iter().map(|&k| est.values[k][(0, 0)].re).collect();
    let marginal = ls_marginal_fit(&zz, &omegas, &init, settings.marginal_scale)?;
    let theta_m = Parameters {
        alpha: marginal.alpha,
        omega_p: marginal.omega_p,
        gamma: marginal.gamma,
        r: marginal.r,
        ..init
    };
    let sub = thin(&band, settings.max_spreading_frequencies);
    let sub_omegas: Vec<f64> = sub.iter().map(|&k| est.omegas[k]).collect();

    let mut out = Vec::with_capacity(which.len());
    for &c in which {
        let attempt = match c {
            Competitor::LsMlm => mlm_spreading(&est, ctx, settings.direction_count)
                .and_then(|d| ls_spreading_fit(&d.subset(&sub), &theta_m)),
            Competitor::LsMem => fourier_coefficients(&est, ctx).and_then(|co| {
                ls_spreading_fit(
                    &mem_spreading(&co, settings.direction_count).subset(&sub),
                    &theta_m,
                )
            }),
            Competitor::MomentsMatching => {
                moments_matching_fit(&est, ctx, &sub_omegas, &theta_m).map(|m| m.spreading)
            }
        };
        let spreading = attempt.unwrap_or_else(|e| {
            log::warn!("{} spreading fit failed: {e}", c.name());
            SpreadingFit {
                phi_m: f64::NAN,
                beta: f64::NAN,
                nu: f64::NAN,
                sigma_l: f64::NAN,
                sigma_r: f64::NAN,
                objective: f64::NAN,
                converged: false,
                iterations: 0,
            }
        });
        out.push(CompetitorFit {
            competitor: c,
            theta_hat: spreading.apply(&theta_m),
            marginal,
            spreading,
            converged: marginal.converged && spreading.converged,
        });
    }
    Ok(out)
}
