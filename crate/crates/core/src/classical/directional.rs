//! Nonparametric spreading estimates on a direction grid.
//!
//! Maximum likelihood method: D(φ) ∝ 1 / (G(φ)^H f̂⁻¹ G(φ)) with the buoy
//! transfer vector G(φ) = [1, i cos φ / t, i sin φ / t].
//!
//! Maximum entropy method from c₁ = a₁ + i b₁ and c₂ = a₂ + i b₂:
//!
//! ```text
//! φ₁ = (c₁ − c₂ c₁*) / (1 − |c₁|²),   φ₂ = c₂ − c₁ φ₁
//! D(θ) = (1 − φ₁ c₁* − φ₂ c₂*) / (2π |1 − φ₁ e^{−iθ} − φ₂ e^{−2iθ}|²)
//! ```
//!
//! Both are renormalised so the rectangle rule over the periodic grid
//! integrates to one.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::classical::{CrossSpectralEstimate, FourierCoefficients, HEAVE_FLOOR};
use crate::error::Result;
use crate::wave_models::depth_attenuation;
use crate::{PhysicalContext, SpectralMatrix};

/// D̂(ω, φ) on a uniform direction grid; `None` where undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalDistribution {
    pub omegas: Vec<f64>,
    pub directions: Vec<f64>,
    pub density: Vec<Option<Vec<f64>>>,
}

impl DirectionalDistribution {
    pub fn step(&self) -> f64 {
        2.0 * PI / self.directions.len() as f64
    }

    /// Keeps only the frequencies at positions `keep`.
    pub fn subset(&self, keep: &[usize]) -> Self {
        Self {
            omegas: keep.iter().map(|&k| self.omegas[k]).collect(),
            directions: self.directions.clone(),
            density: keep.iter().map(|&k| self.density[k].clone()).collect(),
        }
    }
}

/// φ_k = 2πk/count, k = 0..count.
pub fn direction_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 2.0 * PI * k as f64 / count as f64)
        .collect()
}

fn normalise(mut d: Vec<f64>) -> Option<Vec<f64>> {
    let h = 2.0 * PI / d.len() as f64;
    let total: f64 = d.iter().sum::<f64>() * h;
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    for v in d.iter_mut() {
        *v /= total;
    }
    Some(d)
}

pub fn mlm_from_matrices(
    omegas: &[f64],
    values: &[SpectralMatrix],
    ctx: &PhysicalContext,
    count: usize,
) -> Result<DirectionalDistribution> {
    let directions = direction_grid(count);
    let top = values.iter().map(|m| m[(0, 0)].re).fold(0.0f64, f64::max);
    let mut density = Vec::with_capacity(omegas.len());
    for (&w, m) in omegas.iter().zip(values) {
        let zz = m[(0, 0)].re;
        if w <= 0.0 || !(zz > HEAVE_FLOOR * top) {
            density.push(None);
            continue;
        }
        let t = depth_attenuation(w, ctx)?;
        // Work with f̂/f̂_zz and a small diagonal load so rank-deficient
        // inputs stay invertible.
        let mut a = m.scale(1.0 / zz);
        let load = 1e-9 * a.trace().re;
        for i in 0..3 {
            a[(i, i)] += Complex64::new(load, 0.0);
        }
        let Some(inv) = a.inverse() else {
            density.push(None);
            continue;
        };
        let d: Vec<f64> = directions
            .iter()
            .map(|&phi| {
                let g = [
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, phi.cos() / t),
                    Complex64::new(0.0, phi.sin() / t),
                ];
                let mut q = Complex64::new(0.0, 0.0);
                for i in 0..3 {
                    for j in 0..3 {
                        q += g[i].conj() * inv[(i, j)] * g[j];
                    }
                }
                1.0 / q.re.max(f64::MIN_POSITIVE)
            })
            .collect();
        density.push(normalise(d));
    }
    Ok(DirectionalDistribution {
        omegas: omegas.to_vec(),
        directions,
        density,
    })
}

pub fn mlm_spreading(
    est: &CrossSpectralEstimate,
    ctx: &PhysicalContext,
    count: usize,
) -> Result<DirectionalDistribution> {
    mlm_from_matrices(&est.omegas, &est.values, ctx, count)
}

pub fn mem_spreading(coeffs: &FourierCoefficients, count: usize) -> DirectionalDistribution {
    let directions = direction_grid(count);
    let density = (0..coeffs.len())
        .map(|k| {
            if !coeffs.is_defined(k) {
                return None;
            }
            let mut c1 = Complex64::new(coeffs.a1[k], coeffs.b1[k]);
            let c2 = Complex64::new(coeffs.a2[k], coeffs.b2[k]);
            // Keep |c₁| < 1 so the recursion is defined.
            let r = c1.norm();
            if r >= 1.0 - 1e-9 {
                c1 *= (1.0 - 1e-9) / r;
            }
            let p1 = (c1 - c2 * c1.conj()) / (1.0 - c1.norm_sqr());
            let p2 = c2 - c1 * p1;
            let num = (Complex64::new(1.0, 0.0) - p1 * c1.conj() - p2 * c2.conj()).re;
            let d: Vec<f64> = directions
                .iter()
                .map(|&th| {
                    let e1 = Complex64::from_polar(1.0, -th);
                    let den = (Complex64::new(1.0, 0.0) - p1 * e1 - p2 * e1 * e1).norm_sqr();
                    (num / (2.0 * PI * den)).max(0.0)
                })
                .collect();
            normalise(d)
        })
        .collect();
    DirectionalDistribution {
        omegas: coeffs.omegas.clone(),
        directions,
        density,
    }
}
