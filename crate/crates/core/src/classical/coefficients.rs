use crate::classical::CrossSpectralEstimate;
use crate::error::Result;
use crate::wave_models::depth_attenuation;
use crate::{PhysicalContext, SpectralMatrix};

/// Relative floor on f̂_zz below which the coefficients are undefined.
pub const HEAVE_FLOOR: f64 = 1e-12;

/// First- and second-order directional Fourier coefficients per frequency.
/// Undefined entries are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    pub omegas: Vec<f64>,
    pub a1: Vec<f64>,
    pub b1: Vec<f64>,
    pub a2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl FourierCoefficients {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn is_defined(&self, k: usize) -> bool {
        self.a1[k].is_finite()
    }

    /// Indices where the first circular moment exceeds one by more than `tol`.
    pub fn unit_violations(&self, tol: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.is_defined(k) && self.a1[k].hypot(self.b1[k]) > 1.0 + tol)
            .collect()
    }
}

/// a1 = t Im f_xz / f_zz, b1 = t Im f_yz / f_zz, a2 = t² (f_xx − f_yy) / f_zz,
/// b2 = 2 t² Re f_xy / f_zz, with t = tanh(k h) (1 in deep water).
pub fn coefficients_from_matrices(
    omegas: &[f64],
    values: &[SpectralMatrix],
    ctx: &PhysicalContext,
) -> Result<FourierCoefficients> {
    let top = values.iter().map(|m| m[(0, 0)].re).fold(0.0f64, f64::max);
    let floor = HEAVE_FLOOR * top;
    let len = omegas.len();
    let mut out = FourierCoefficients {
        omegas: omegas.to_vec(),
        a1: vec![f64::NAN; len],
        b1: vec![f64::NAN; len],
        a2: vec![f64::NAN; len],
        b2: vec![f64::NAN; len],
    };
    for (k, (&w, m)) in omegas.iter().zip(values).enumerate() {
        let zz = m[(0, 0)].re;
        if w <= 0.0 || !(zz > floor) {
            continue;
        }
        let t = depth_attenuation(w, ctx)?;
        out.a1[k] = t * m[(1, 0)].im / zz;
        out.b1[k] = t * m[(2, 0)].im / zz;
        out.a2[k] = t * t * (m[(1, 1)].re - m[(2, 2)].re) / zz;
        out.b2[k] = 2.0 * t * t * m[(1, 2)].re / zz;
    }
    Ok(out)
}

pub fn fourier_coefficients(
    est: &CrossSpectralEstimate,
    ctx: &PhysicalContext,
) -> Result<FourierCoefficients> {
    coefficients_from_matrices(&est.omegas, &est.values, ctx)
}
