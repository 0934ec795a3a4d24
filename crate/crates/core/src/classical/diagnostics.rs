//! Record-level diagnostics: significant wave height, mean direction per
//! frequency and the error function
//!
//! ```text
//! R(ω) = ln(f̂_xx + f̂_yy) + 2 ln tanh(k h) − ln f̂_zz,
//! ```
//!
//! which vanishes for any spectral matrix of the linear wave model because
//! the horizontal displacements carry the vertical energy scaled by 1/tanh².
//! Positive values point at horizontal energy the model cannot explain.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::classical::{coefficients_from_matrices, cross_spectra, SpectralMethod};
use crate::error::Result;
use crate::inference::SeaStateSample;
use crate::wave_models::depth_attenuation;
use crate::{PhysicalContext, SpectralMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticSeries {
    pub hs: f64,
    pub omegas: Vec<f64>,
    /// atan2(b1, a1) in [0, 2π); NaN where the coefficients are undefined.
    pub mean_direction: Vec<f64>,
    /// NaN where any of the three auto-spectra is not positive.
    pub error_fn: Vec<f64>,
}

/// R(ω) for each matrix; frequencies must be positive.
pub fn error_function(
    omegas: &[f64],
    values: &[SpectralMatrix],
    ctx: &PhysicalContext,
) -> Result<Vec<f64>> {
    omegas
        .iter()
        .zip(values)
        .map(|(&w, m)| {
            let zz = m[(0, 0)].re;
            let horiz = m[(1, 1)].re + m[(2, 2)].re;
            if !(zz > 0.0 && horiz > 0.0 && w > 0.0) {
                return Ok(f64::NAN);
            }
            let t = depth_attenuation(w, ctx)?;
            Ok(horiz.ln() + 2.0 * t.ln() - zz.ln())
        })
        .collect()
}

/// Mean direction atan2(b1, a1) wrapped to [0, 2π).
pub fn mean_direction(
    omegas: &[f64],
    values: &[SpectralMatrix],
    ctx: &PhysicalContext,
) -> Result<Vec<f64>> {
    let c = coefficients_from_matrices(omegas, values, ctx)?;
    Ok((0..c.len())
        .map(|k| {
            if c.is_defined(k) {
                c.b1[k].atan2(c.a1[k]).rem_euclid(TAU)
            } else {
                f64::NAN
            }
        })
        .collect())
}

/// Diagnostics for one record from its nonparametric cross-spectrum.
/// The zero frequency is dropped.
pub fn diagnostics(
    sample: &SeaStateSample,
    method: SpectralMethod,
    ctx: &PhysicalContext,
) -> Result<DiagnosticSeries> {
    let est = cross_spectra(sample, method)?;
    let omegas = est.omegas[1..].to_vec();
    let values = &est.values[1..];
    Ok(DiagnosticSeries {
        hs: sample.significant_wave_height(),
        mean_direction: mean_direction(&omegas, values, ctx)?,
        error_fn: error_function(&omegas, values, ctx)?,
        omegas,
    })
}
