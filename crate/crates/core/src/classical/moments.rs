//! Two-stage moments matching for the spreading parameters.
//!
//! Stage one fits a bimodal wrapped Gaussian to the first two complex
//! Fourier coefficients at each frequency separately. Written with a centre
//! direction φ_c and separation φ_s,
//!
//! ```text
//! c_n = e^{i n φ_c} cos(n φ_s / 2) e^{−n² σ² / 2},
//! ```
//!
//! which is unchanged under (φ_c, φ_s) → (φ_c + π, 2π − φ_s). Stage one
//! therefore works on φ_s ∈ [0, π] and stage two picks the branch whose
//! centre lies closest to an energy-weighted mean direction before fitting
//! the parametric shape functions through the per-frequency values.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::classical::bounded::{minimize_bounded, BoundedSettings};
use crate::classical::ls::{SpreadingFit, LS_NU_MAX, LS_SIGMA_MAX};
use crate::classical::{fourier_coefficients, CrossSpectralEstimate, FourierCoefficients};
use crate::error::{Error, Result};
use crate::wave_models::shape_at;
use crate::{Parameters, PhysicalContext};

/// Per-frequency stage-one estimate on the canonical branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageOneEstimate {
    pub omega: f64,
    pub centre: f64,
    pub separation: f64,
    pub sigma: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentsFit {
    pub spreading: SpreadingFit,
    /// `None` where the coefficients were undefined or stage one failed.
    pub stage_one: Vec<Option<StageOneEstimate>>,
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(TAU) - PI
}

fn model_c(n: f64, centre: f64, sep: f64, sigma: f64) -> Complex64 {
    Complex64::from_polar(
        (0.5 * n * sep).cos() * (-0.5 * n * n * sigma * sigma).exp(),
        n * centre,
    )
}

/// Stage one at a single frequency, multi-started over separation and width.
pub fn fit_stage_one(omega: f64, c1: Complex64, c2: Complex64) -> Option<StageOneEstimate> {
    let objective = |x: &[f64]| {
        (model_c(1.0, x[0], x[1], x[2]) - c1).norm_sqr()
            + (model_c(2.0, x[0], x[1], x[2]) - c2).norm_sqr()
    };
    let lo = [f64::NEG_INFINITY, 0.0, 0.0];
    let hi = [f64::INFINITY, PI, LS_SIGMA_MAX];
    let centre0 = c1.im.atan2(c1.re);
    let settings = BoundedSettings {
        gradient_tol: 1e-10,
        ..BoundedSettings::default()
    };
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for &sep0 in &[0.3, 1.5, 2.8] {
        for &sig0 in &[0.2, 0.8] {
            let out = minimize_bounded(&objective, &[centre0, sep0, sig0], &lo, &hi, &settings);
            if out.value.is_finite() && best.as_ref().map_or(true, |b| out.value < b.0) {
                best = Some((out.value, out.x, out.converged));
            }
        }
    }
    let (residual, x, converged) = best?;
    if !converged {
        log::debug!("moments matching stage one did not converge at omega = {omega}");
        return None;
    }
    Some(StageOneEstimate {
        omega,
        centre: x[0].rem_euclid(TAU),
        separation: x[1],
        sigma: x[2],
        residual,
    })
}

/// Runs both stages on coefficients at the positions `keep`, weighting the
/// reference direction by `energy` (typically f̂_zz).
pub fn moments_matching_from_coefficients(
    coeffs: &FourierCoefficients,
    energy: &[f64],
    keep: &[usize],
    theta: &Parameters,
) -> Result<MomentsFit> {
    let mut stage_one = Vec::with_capacity(keep.len());
    let mut reference = Complex64::new(0.0, 0.0);
    for &k in keep {
        if !coeffs.is_defined(k) {
            stage_one.push(None);
            continue;
        }
        let c1 = Complex64::new(coeffs.a1[k], coeffs.b1[k]);
        let c2 = Complex64::new(coeffs.a2[k], coeffs.b2[k]);
        reference += energy[k] * c1;
        stage_one.push(fit_stage_one(coeffs.omegas[k], c1, c2));
    }
    let points: Vec<StageOneEstimate> = stage_one.iter().flatten().copied().collect();
    if points.len() < 4 {
        return Err(Error::InvalidSelection(format!(
            "moments matching needs at least 4 usable frequencies, got {}",
            points.len()
        )));
    }
    let phi_ref = reference.im.atan2(reference.re);
    // Branch alignment against the reference direction.
    let aligned: Vec<(f64, f64, f64, f64)> = points
        .iter()
        .map(|p| {
            if wrap(p.centre - phi_ref).abs() > PI / 2.0 {
                (
                    p.omega,
                    (p.centre + PI).rem_euclid(TAU),
                    TAU - p.separation,
                    p.sigma,
                )
            } else {
                (p.omega, p.centre, p.separation, p.sigma)
            }
        })
        .collect();

    let settings = BoundedSettings::default();
    let dir_obj = |x: &[f64]| {
        aligned
            .iter()
            .map(|a| wrap(a.1 - x[0]).powi(2))
            .sum::<f64>()
    };
    let dir = minimize_bounded(
        &dir_obj,
        &[phi_ref],
        &[f64::NEG_INFINITY],
        &[f64::INFINITY],
        &settings,
    );

    let sep_obj = |x: &[f64]| {
        let th = Parameters {
            beta: x[0],
            nu: x[1],
            ..*theta
        };
        aligned
            .iter()
            .map(|a| (shape_at(a.0, &th).phi_s - a.2).powi(2))
            .sum::<f64>()
    };
    let sep = minimize_bounded(
        &sep_obj,
        &[theta.beta, theta.nu],
        &[0.0, 0.0],
        &[TAU, LS_NU_MAX],
        &settings,
    );

    let width_obj = |x: &[f64]| {
        let th = Parameters {
            sigma_l: x[0],
            sigma_r: x[1],
            ..*theta
        };
        aligned
            .iter()
            .map(|a| (shape_at(a.0, &th).sigma_w - a.3).powi(2))
            .sum::<f64>()
    };
    let width = minimize_bounded(
        &width_obj,
        &[theta.sigma_l, theta.sigma_r],
        &[0.0, 0.0],
        &[LS_SIGMA_MAX, LS_SIGMA_MAX],
        &settings,
    );

    Ok(MomentsFit {
        spreading: SpreadingFit {
            phi_m: dir.x[0].rem_euclid(TAU),
            beta: sep.x[0],
            nu: sep.x[1],
            sigma_l: width.x[0],
            sigma_r: width.x[1],
            objective: dir.value + sep.value + width.value,
            converged: dir.converged && sep.converged && width.converged,
            iterations: dir.iterations + sep.iterations + width.iterations,
        },
        stage_one,
    })
}

/// Moments matching using the estimate frequencies nearest to `omega_grid`.
/// `theta` supplies ω_p and the starting shape parameters.
pub fn moments_matching_fit(
    est: &CrossSpectralEstimate,
    ctx: &PhysicalContext,
    omega_grid: &[f64],
    theta: &Parameters,
) -> Result<MomentsFit> {
    let coeffs = fourier_coefficients(est, ctx)?;
    let mut keep: Vec<usize> = omega_grid.iter().map(|&w| est.nearest(w)).collect();
    keep.dedup();
    let energy: Vec<f64> = est.values.iter().map(|m| m[(0, 0)].re).collect();
    moments_matching_from_coefficients(&coeffs, &energy, &keep, theta)
}
