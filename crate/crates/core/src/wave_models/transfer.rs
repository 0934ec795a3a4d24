//! Closed-form spectral density matrix of buoy displacements.
//!
//! With transfer function G(ω, φ) = [1, i cos φ / t, i sin φ / t]ᵀ, where
//! t = tanh(k h) (t = 1 in deep water), the matrix
//! f(ω) = ∫ G Gᴴ S(ω, φ) dφ has entries that depend on the spreading
//! function only through its first two circular moments. For ω > 0:
//!
//! ```text
//! f_zz = f
//! f_xz = i f cos φ_m c₁ / t          c₁ = cos(φ_s/2) exp(-σ²/2)
//! f_yz = i f sin φ_m c₁ / t          c₂ = cos(φ_s)   exp(-2σ²)
//! f_xx = f (1 + cos 2φ_m c₂) / (2t²)
//! f_yy = f (1 - cos 2φ_m c₂) / (2t²)
//! f_xy = f sin 2φ_m c₂ / (2t²)
//! ```
//!
//! Negative frequencies take the complex conjugate, which keeps the
//! corresponding autocovariance real.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral_matrix::SpectralMatrix;

use super::dispersion::depth_attenuation;
use super::jonswap::{jonswap_value, jonswap_with_gradient};
use super::params::{Parameters, PhysicalContext, N_PARAMS};
use super::spreading::{shape_at, shape_gradient};

/// The six distinct entries of a model matrix at a positive frequency.
///
/// `xz` and `yz` hold imaginary parts; every other entry is real.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct EntryPattern<T> {
    pub zz: T,
    pub xz: T,
    pub yz: T,
    pub xx: T,
    pub yy: T,
    pub xy: T,
}

impl<T: Real> EntryPattern<T> {
    pub fn zero() -> Self {
        Self {
            zz: T::zero(),
            xz: T::zero(),
            yz: T::zero(),
            xx: T::zero(),
            yy: T::zero(),
            xy: T::zero(),
        }
    }

    #[inline]
    pub fn axpy(&mut self, s: T, other: &Self) {
        self.zz = self.zz + s * other.zz;
        self.xz = self.xz + s * other.xz;
        self.yz = self.yz + s * other.yz;
        self.xx = self.xx + s * other.xx;
        self.yy = self.yy + s * other.yy;
        self.xy = self.xy + s * other.xy;
    }

    #[inline]
    pub fn scaled(&self, s: T) -> Self {
        let mut out = Self::zero();
        out.axpy(s, self);
        out
    }

    /// Matrix at +|ω| (`negative == false`) or at -|ω|.
    pub fn to_matrix(&self, negative: bool) -> SpectralMatrix<T> {
        let z = T::zero();
        let sgn = if negative { -T::one() } else { T::one() };
        let xz = Complex::new(z, sgn * self.xz);
        let yz = Complex::new(z, sgn * self.yz);
        SpectralMatrix::from_entries([
            [Complex::new(self.zz, z), xz.conj(), yz.conj()],
            [xz, Complex::new(self.xx, z), Complex::new(self.xy, z)],
            [yz, Complex::new(self.xy, z), Complex::new(self.yy, z)],
        ])
    }

    pub fn as_array(&self) -> [T; 6] {
        [self.zz, self.xz, self.yz, self.xx, self.yy, self.xy]
    }
}

struct Trig<T> {
    cos_m: T,
    sin_m: T,
    cos_2m: T,
    sin_2m: T,
}

#[inline]
fn unit_pattern<T: Real>(trig: &Trig<T>, c1: T, c2: T, t: T) -> EntryPattern<T> {
    let half = T::of(0.5);
    let t2 = t * t;
    EntryPattern {
        zz: T::one(),
        xz: trig.cos_m * c1 / t,
        yz: trig.sin_m * c1 / t,
        xx: half * (T::one() + trig.cos_2m * c2) / t2,
        yy: half * (T::one() - trig.cos_2m * c2) / t2,
        xy: half * trig.sin_2m * c2 / t2,
    }
}

/// Model entries (including the marginal density) at `a = |ω| > 0`.
#[inline]
pub(crate) fn model_pattern<T: Real>(a: T, theta: &Parameters<T>, t: T) -> EntryPattern<T> {
    if a == T::zero() {
        return EntryPattern::zero();
    }
    let f = jonswap_value(a, theta);
    let shape = shape_at(a, theta);
    let s2 = shape.sigma_w * shape.sigma_w;
    let c1 = (shape.phi_s / T::of(2.0)).cos() * (-s2 / T::of(2.0)).exp();
    let c2 = shape.phi_s.cos() * (-T::of(2.0) * s2).exp();
    let trig = Trig {
        cos_m: theta.phi_m.cos(),
        sin_m: theta.phi_m.sin(),
        cos_2m: (T::of(2.0) * theta.phi_m).cos(),
        sin_2m: (T::of(2.0) * theta.phi_m).sin(),
    };
    unit_pattern(&trig, c1, c2, t).scaled(f)
}

/// Model entries and their partial derivatives with respect to the nine
/// packed parameters, at `a = |ω| > 0`.
pub(crate) fn model_pattern_with_gradient<T: Real>(
    a: T,
    theta: &Parameters<T>,
    t: T,
) -> (EntryPattern<T>, [EntryPattern<T>; N_PARAMS]) {
    let mut grads = [EntryPattern::zero(); N_PARAMS];
    if a == T::zero() {
        return (EntryPattern::zero(), grads);
    }
    let (f, df) = jonswap_with_gradient(a, theta);
    let shape = shape_at(a, theta);
    let sg = shape_gradient(a, theta, &shape);
    let s = shape.sigma_w;
    let e1 = (-s * s / T::of(2.0)).exp();
    let e2 = (-T::of(2.0) * s * s).exp();
    let half_s = shape.phi_s / T::of(2.0);
    let c1 = half_s.cos() * e1;
    let c2 = shape.phi_s.cos() * e2;
    let dc1_dphis = -T::of(0.5) * half_s.sin() * e1;
    let dc1_dsigma = -s * c1;
    let dc2_dphis = -shape.phi_s.sin() * e2;
    let dc2_dsigma = -T::of(4.0) * s * c2;

    let trig = Trig {
        cos_m: theta.phi_m.cos(),
        sin_m: theta.phi_m.sin(),
        cos_2m: (T::of(2.0) * theta.phi_m).cos(),
        sin_2m: (T::of(2.0) * theta.phi_m).sin(),
    };
    let w = unit_pattern(&trig, c1, c2, t);
    let half = T::of(0.5);
    let t2 = t * t;
    let z = T::zero();
    let dw_dphim = EntryPattern {
        zz: z,
        xz: -trig.sin_m * c1 / t,
        yz: trig.cos_m * c1 / t,
        xx: -trig.sin_2m * c2 / t2,
        yy: trig.sin_2m * c2 / t2,
        xy: trig.cos_2m * c2 / t2,
    };
    let dw_dc1 = EntryPattern {
        zz: z,
        xz: trig.cos_m / t,
        yz: trig.sin_m / t,
        xx: z,
        yy: z,
        xy: z,
    };
    let dw_dc2 = EntryPattern {
        zz: z,
        xz: z,
        yz: z,
        xx: half * trig.cos_2m / t2,
        yy: -half * trig.cos_2m / t2,
        xy: half * trig.sin_2m / t2,
    };

    for (p, grad) in grads.iter_mut().enumerate() {
        let mut g = EntryPattern::zero();
        if p < 4 {
            g.axpy(df[p], &w);
        }
        let mut local = EntryPattern::zero();
        if p == 4 {
            local.axpy(T::one(), &dw_dphim);
        }
        let dphis = sg.d_phi_s[p];
        let dsigma = sg.d_sigma[p];
        if dphis != z || dsigma != z {
            local.axpy(dphis * dc1_dphis + dsigma * dc1_dsigma, &dw_dc1);
            local.axpy(dphis * dc2_dphis + dsigma * dc2_dsigma, &dw_dc2);
        }
        g.axpy(f, &local);
        *grad = g;
    }
    (w.scaled(f), grads)
}

/// Spectral density matrix f(ω; θ) of the (z, x, y) displacements.
pub fn sdf_matrix<T: Real>(
    omega: T,
    theta: &Parameters<T>,
    ctx: &PhysicalContext<T>,
) -> Result<SpectralMatrix<T>> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite, got {omega}")));
    }
    if omega == T::zero() {
        return Ok(SpectralMatrix::zero());
    }
    let a = omega.abs();
    let t = depth_attenuation(a, ctx)?;
    Ok(model_pattern(a, theta, t).to_matrix(omega < T::zero()))
}

/// Analytic partial derivatives ∂f(ω; θ)/∂θ_j for the nine parameters, in
/// the order of [`super::Param::ALL`].
///
/// At the kinks of the model (ω = ω_p for the separation, the boundaries
/// γ = 1, σ_r = 0, β = 0) these are one-sided derivatives.
pub fn sdf_matrix_gradient<T: Real>(
    omega: T,
    theta: &Parameters<T>,
    ctx: &PhysicalContext<T>,
) -> Result<[SpectralMatrix<T>; N_PARAMS]> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite, got {omega}")));
    }
    if omega == T::zero() {
        return Ok([SpectralMatrix::zero(); N_PARAMS]);
    }
    let a = omega.abs();
    let t = depth_attenuation(a, ctx)?;
    let (_, grads) = model_pattern_with_gradient(a, theta, t);
    let negative = omega < T::zero();
    Ok(grads.map(|g| g.to_matrix(negative)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_matrix::Channel;
    use crate::wave_models::{jonswap_sdf, Param};
    use std::f64::consts::PI;

    #[test]
    fn deep_water_trace_identity() {
        let th = Parameters::scenario1();
        let ctx = PhysicalContext::deep_water();
        for &w in &[0.4, 0.8, 1.3, 3.3] {
            let m = sdf_matrix(w, &th, &ctx).unwrap();
            let zz = m.get(Channel::Z, Channel::Z).re;
            let xx = m.get(Channel::X, Channel::X).re;
            let yy = m.get(Channel::Y, Channel::Y).re;
            assert!((zz - (xx + yy)).abs() <= 4.0 * f64::EPSILON * zz);
        }
    }

    #[test]
    fn finite_depth_trace_identity() {
        let th = Parameters::scenario1();
        let ctx = PhysicalContext::finite_depth(40.0);
        for &w in &[0.3, 0.8, 1.3] {
            let m = sdf_matrix(w, &th, &ctx).unwrap();
            let t = depth_attenuation(w, &ctx).unwrap();
            let zz = m.get(Channel::Z, Channel::Z).re;
            let horiz = m.get(Channel::X, Channel::X).re + m.get(Channel::Y, Channel::Y).re;
            assert!((zz - horiz * t * t).abs() < 1e-14 * zz);
        }
    }

    #[test]
    fn zero_frequency_zero_matrix() {
        let m = sdf_matrix(
            0.0,
            &Parameters::scenario1(),
            &PhysicalContext::deep_water(),
        )
        .unwrap();
        assert_eq!(m, SpectralMatrix::zero());
    }

    #[test]
    fn negative_frequency_is_conjugate() {
        let th = Parameters::scenario1().with(Param::PhiM, 1.0);
        let ctx = PhysicalContext::deep_water();
        let p = sdf_matrix(1.1, &th, &ctx).unwrap();
        let n = sdf_matrix(-1.1, &th, &ctx).unwrap();
        assert_eq!(p.conj(), n);
        assert_eq!(p.hermitian_defect(), 0.0);
    }

    #[test]
    fn unidirectional_degenerate_sea() {
        let th = Parameters::<f64>::new(0.7, 0.8, 3.3, 5.0, 0.0, 0.0, 2.7, 0.0, 0.0);
        let ctx = PhysicalContext::deep_water();
        let w = 1.0;
        let m = sdf_matrix(w, &th, &ctx).unwrap();
        let f = jonswap_sdf(w, &th).unwrap();
        // Waves from North: all horizontal motion is along x, a quarter period
        // ahead of the heave.
        assert!((m.get(Channel::X, Channel::Z).im - f).abs() < 1e-15);
        assert!((m.get(Channel::X, Channel::X).re - f).abs() < 1e-15);
        for c in Channel::ALL {
            if c != Channel::Y {
                assert!(m.get(Channel::Y, c).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn alpha_gradient_is_linear_scaling() {
        let th = Parameters::scenario1();
        let ctx = PhysicalContext::deep_water();
        let m = sdf_matrix(0.9, &th, &ctx).unwrap();
        let g = sdf_matrix_gradient(0.9, &th, &ctx).unwrap();
        assert!((g[Param::Alpha as usize] - m.scale(1.0 / th.alpha)).max_abs() < 1e-14);
    }

    #[test]
    fn phi_m_gradient_of_xx_at_quarter_pi() {
        let th = Parameters::scenario1().with(Param::PhiM, PI / 4.0);
        let ctx = PhysicalContext::deep_water();
        let w = 1.2;
        let g = sdf_matrix_gradient(w, &th, &ctx).unwrap()[Param::PhiM as usize];
        let h = 1e-6;
        let fp = sdf_matrix(w, &th.with(Param::PhiM, PI / 4.0 + h), &ctx).unwrap();
        let fm = sdf_matrix(w, &th.with(Param::PhiM, PI / 4.0 - h), &ctx).unwrap();
        let fd = (fp - fm).scale(0.5 / h);
        let a = g.get(Channel::X, Channel::X).re;
        let b = fd.get(Channel::X, Channel::X).re;
        assert!(a.abs() > 0.0);
        assert!((a - b).abs() / a.abs() < 1e-5);
    }

    #[test]
    fn gradient_is_zero_for_heave_wrt_spreading() {
        let th = Parameters::scenario1();
        let g = sdf_matrix_gradient(1.3, &th, &PhysicalContext::deep_water()).unwrap();
        for p in Param::SPREADING {
            assert_eq!(g[p as usize].get(Channel::Z, Channel::Z).norm(), 0.0);
        }
    }
}
