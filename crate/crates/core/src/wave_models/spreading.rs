//! Bimodal wrapped Gaussian spreading function.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::jonswap::jonswap_sdf;
use super::params::{Parameters, N_PARAMS};

/// Arm means, separation and angular width at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadingShape<T> {
    pub phi_m1: T,
    pub phi_m2: T,
    pub phi_s: T,
    pub sigma_w: T,
}

/// Above this width the wrapped Gaussian is summed through its Fourier series.
const FOURIER_SERIES_WIDTH: f64 = 2.0;

pub fn spreading_shape<T: Real>(omega: T, theta: &Parameters<T>) -> Result<SpreadingShape<T>> {
    if !omega.is_finite() || omega == T::zero() {
        return Err(Error::Domain(format!(
            "spreading shape needs a finite non-zero frequency, got {omega}"
        )));
    }
    Ok(shape_at(omega.abs(), theta))
}

#[inline]
pub(crate) fn shape_at<T: Real>(a: T, theta: &Parameters<T>) -> SpreadingShape<T> {
    let u = theta.omega_p / a;
    let phi_s = theta.beta * (-theta.nu * u.min(T::one())).exp();
    let u2 = u * u;
    let u8 = u2 * u2 * u2 * u2;
    let sigma_w = theta.sigma_l - theta.sigma_r / T::of(3.0) * (T::of(4.0) * u2 - u8);
    let half = phi_s / T::of(2.0);
    SpreadingShape {
        phi_m1: theta.phi_m + half,
        phi_m2: theta.phi_m - half,
        phi_s,
        sigma_w,
    }
}

/// Partial derivatives of φ_s and σ with respect to the packed parameters.
pub(crate) struct ShapeGradient<T> {
    pub d_phi_s: [T; N_PARAMS],
    pub d_sigma: [T; N_PARAMS],
}

#[inline]
pub(crate) fn shape_gradient<T: Real>(
    a: T,
    theta: &Parameters<T>,
    shape: &SpreadingShape<T>,
) -> ShapeGradient<T> {
    let mut d_phi_s = [T::zero(); N_PARAMS];
    let mut d_sigma = [T::zero(); N_PARAMS];
    let u = theta.omega_p / a;
    let m = u.min(T::one());
    let e = (-theta.nu * m).exp();
    d_phi_s[5] = e;
    d_phi_s[6] = -m * shape.phi_s;
    if u < T::one() {
        d_phi_s[1] = -theta.nu * shape.phi_s / a;
    }
    let u2 = u * u;
    let u7 = u2 * u2 * u2 * u;
    let u8 = u7 * u;
    d_sigma[7] = T::one();
    d_sigma[8] = -(T::of(4.0) * u2 - u8) / T::of(3.0);
    d_sigma[1] = -theta.sigma_r / T::of(3.0) * (T::of(8.0) * u - T::of(8.0) * u7) / a;
    ShapeGradient { d_phi_s, d_sigma }
}

/// Wrapped normal density with mean `mu` and width `sigma` at `phi`.
pub(crate) fn wrapped_normal<T: Real>(phi: T, mu: T, sigma: T) -> T {
    let two_pi = T::PI() + T::PI();
    if sigma > T::of(FOURIER_SERIES_WIDTH) {
        // Terms decay like exp(-k² σ² / 2); stop once below 1e-17.
        let kmax = ((T::of(2.0 * 39.0)).sqrt() / sigma)
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .max(1);
        let mut acc = T::one();
        for k in 1..=kmax {
            let kf = T::of(k as f64);
            acc = acc
                + T::of(2.0)
                    * (-(kf * kf) * sigma * sigma / T::of(2.0)).exp()
                    * (kf * (phi - mu)).cos();
        }
        return acc / two_pi;
    }
    // Offset reduced to [-π, π) so that ±k_max images cover 8σ either side.
    let mut d = (phi - mu + T::PI()) % two_pi;
    if d < T::zero() {
        d = d + two_pi;
    }
    let d = d - T::PI();
    let k_max = (T::of(8.0) * sigma / two_pi).ceil().to_i64().unwrap_or(0) + 1;
    let norm = T::one() / (sigma * (two_pi).sqrt());
    let mut acc = T::zero();
    for k in -k_max..=k_max {
        let z = (d - two_pi * T::of(k as f64)) / sigma;
        acc = acc + (-(z * z) / T::of(2.0)).exp();
    }
    acc * norm
}

/// D(ω, φ; θ), the bimodal wrapped Gaussian spreading density in 1/rad.
pub fn spreading_density<T: Real>(omega: T, phi: T, theta: &Parameters<T>) -> Result<T> {
    let shape = spreading_shape(omega, theta)?;
    if !(shape.sigma_w > T::zero()) {
        return Err(Error::NonPositiveWidth {
            omega: omega.to_f64_lossy(),
            sigma: shape.sigma_w.to_f64_lossy(),
        });
    }
    if !phi.is_finite() {
        return Err(Error::Domain(format!(
            "direction must be finite, got {phi}"
        )));
    }
    let half = T::of(0.5);
    Ok(half
        * (wrapped_normal(phi, shape.phi_m1, shape.sigma_w)
            + wrapped_normal(phi, shape.phi_m2, shape.sigma_w)))
}

/// S(ω, φ; θ) = f(ω; θ) D(ω, φ; θ). Zero at ω = 0.
pub fn freq_dir_spectrum<T: Real>(omega: T, phi: T, theta: &Parameters<T>) -> Result<T> {
    let f = jonswap_sdf(omega, theta)?;
    if omega == T::zero() {
        return Ok(T::zero());
    }
    Ok(f * spreading_density(omega, phi, theta)?)
}
