//! Least-squares fits of the parametric model to nonparametric estimates.

use serde::{Deserialize, Serialize};

use crate::classical::bounded::{minimize_bounded, BoundedSettings};
use crate::classical::DirectionalDistribution;
use crate::error::{Error, Result};
use crate::wave_models::{jonswap_sdf, shape_at, wrapped_normal};
use crate::{Param, Parameters};

/// Scale on which marginal residuals are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResidualScale {
    #[default]
    Linear,
    Log,
}

/// Upper limits used only to keep the least-squares searches finite.
pub const LS_GAMMA_MAX: f64 = 100.0;
pub const LS_R_MAX: f64 = 50.0;
pub const LS_NU_MAX: f64 = 50.0;
pub const LS_SIGMA_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalFit {
    pub alpha: f64,
    pub omega_p: f64,
    pub gamma: f64,
    pub r: f64,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Fits (α, ω_p, γ, r) to f̂_zz on the given frequencies from `init`.
pub fn ls_marginal_fit(
    est_zz: &[f64],
    omegas: &[f64],
    init: &Parameters,
    scale: ResidualScale,
) -> Result<MarginalFit> {
    if est_zz.len() != omegas.len() || omegas.is_empty() {
        return Err(Error::InvalidSettings(format!(
            "need matching non-empty inputs, got {} estimates and {} frequencies",
            est_zz.len(),
            omegas.len()
        )));
    }
    let top = est_zz.iter().fold(0.0f64, |a, &v| a.max(v));
    if !(top > 0.0) {
        return Err(Error::InvalidSample(
            "heave spectrum estimate is not positive".into(),
        ));
    }
    let floor = 1e-12 * top;
    let objective = |x: &[f64]| -> f64 {
        let th = init
            .with(Param::Alpha, x[0])
            .with(Param::OmegaP, x[1])
            .with(Param::Gamma, x[2])
            .with(Param::R, x[3]);
        let mut acc = 0.0;
        for (&w, &f) in omegas.iter().zip(est_zz) {
            let m = match jonswap_sdf(w, &th) {
                Ok(v) => v,
                Err(_) => return f64::NAN,
            };
            let r = match scale {
                ResidualScale::Linear => (m - f) / top,
                ResidualScale::Log => (m.max(floor)).ln() - f.max(floor).ln(),
            };
            acc += r * r;
        }
        acc
    };
    let lo = [1e-12, 1e-6, 1.0, 1.0 + 1e-9];
    let hi = [f64::INFINITY, f64::INFINITY, LS_GAMMA_MAX, LS_R_MAX];
    let x0 = [init.alpha, init.omega_p, init.gamma, init.r];
    let out = minimize_bounded(&objective, &x0, &lo, &hi, &BoundedSettings::default());
    Ok(MarginalFit {
        alpha: out.x[0],
        omega_p: out.x[1],
        gamma: out.x[2],
        r: out.x[3],
        objective: out.value,
        converged: out.converged,
        iterations: out.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadingFit {
    pub phi_m: f64,
    pub beta: f64,
    pub nu: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SpreadingFit {
    /// Combines with marginal parameters into a full parameter vector.
    pub fn apply(&self, theta: &Parameters) -> Parameters {
        Parameters {
            phi_m: self.phi_m.rem_euclid(2.0 * std::f64::consts::PI),
            beta: self.beta,
            nu: self.nu,
            sigma_l: self.sigma_l,
            sigma_r: self.sigma_r,
            ..*theta
        }
    }
}

/// Bimodal wrapped Gaussian on a direction grid; `None` when the width is
/// not positive.
pub(crate) fn model_spreading_on_grid(
    omega: f64,
    theta: &Parameters,
    directions: &[f64],
) -> Option<Vec<f64>> {
    let s = shape_at(omega.abs(), theta);
    if !(s.sigma_w > 0.0) {
        return None;
    }
    Some(
        directions
            .iter()
            .map(|&phi| {
                0.5 * (wrapped_normal(phi, s.phi_m1, s.sigma_w)
                    + wrapped_normal(phi, s.phi_m2, s.sigma_w))
            })
            .collect(),
    )
}

/// Fits (φ_m, β, ν, σ_l, σ_r) minimising Σ_ω Σ_φ (D(ω, φ; θ) − D̂(ω, φ))²
/// with the marginal parameters (ω_p in particular) held at `theta`.
/// Frequencies where D̂ is undefined are skipped.
pub fn ls_spreading_fit(
    dhat: &DirectionalDistribution,
    theta: &Parameters,
) -> Result<SpreadingFit> {
    let used: Vec<usize> = (0..dhat.omegas.len())
        .filter(|&k| dhat.density[k].is_some() && dhat.omegas[k] > 0.0)
        .collect();
    if used.is_empty() {
        return Err(Error::InvalidSelection(
            "no frequency with a defined spreading estimate".into(),
        ));
    }
    let objective = |x: &[f64]| -> f64 {
        let th = Parameters {
            phi_m: x[0],
            beta: x[1],
            nu: x[2],
            sigma_l: x[3],
            sigma_r: x[4],
            ..*theta
        };
        let mut acc = 0.0;
        for &k in &used {
            let Some(model) = model_spreading_on_grid(dhat.omegas[k], &th, &dhat.directions) else {
                return f64::NAN;
            };
            let est = dhat.density[k].as_ref().expect("filtered");
            acc += model
                .iter()
                .zip(est)
                .map(|(m, e)| (m - e) * (m - e))
                .sum::<f64>();
        }
        acc * dhat.step()
    };
    // Start from the circular mean direction of the estimate and the
    // default shape parameters.
    let mut cs = 0.0;
    let mut sn = 0.0;
    for &k in &used {
        for (d, &phi) in dhat.density[k]
            .as_ref()
            .expect("filtered")
            .iter()
            .zip(&dhat.directions)
        {
            cs += d * phi.cos();
            sn += d * phi.sin();
        }
    }
    let phi0 = sn.atan2(cs).rem_euclid(2.0 * std::f64::consts::PI);
    let x0 = [
        phi0,
        theta.beta,
        theta.nu,
        theta.sigma_l.max(theta.sigma_r + 0.05),
        theta.sigma_r,
    ];
    let lo = [f64::NEG_INFINITY, 0.0, 0.0, 0.0, 0.0];
    let hi = [
        f64::INFINITY,
        2.0 * std::f64::consts::PI,
        LS_NU_MAX,
        LS_SIGMA_MAX,
        LS_SIGMA_MAX,
    ];
    let out = minimize_bounded(&objective, &x0, &lo, &hi, &BoundedSettings::default());
    Ok(SpreadingFit {
        phi_m: out.x[0].rem_euclid(2.0 * std::f64::consts::PI),
        beta: out.x[1],
        nu: out.x[2],
        sigma_l: out.x[3],
        sigma_r: out.x[4],
        objective: out.value,
        converged: out.converged && out.value.is_finite(),
        iterations: out.iterations,
    })
}
