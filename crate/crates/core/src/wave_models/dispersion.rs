//! Linear dispersion relation ω² = g k tanh(k h).

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::params::{PhysicalContext, WaterDepth};

/// Non-negative wavenumber k (rad/m) solving ω² = g k tanh(k h).
///
/// Infinite depth reduces to k = ω²/g. For finite depth a Newton iteration
/// is run inside the bracket [ω²/g, ω²/(g tanh(h ω²/g))], falling back to
/// bisection whenever Newton leaves the bracket.
pub fn dispersion_wavenumber<T: Real>(omega: T, ctx: &PhysicalContext<T>) -> Result<T> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite, got {omega}")));
    }
    let w2 = omega * omega;
    let g = ctx.gravity;
    let deep = w2 / g;
    let h = match ctx.water_depth {
        WaterDepth::Infinite => return Ok(deep),
        WaterDepth::Finite(h) => h,
    };
    if w2 == T::zero() {
        return Ok(T::zero());
    }
    let mut lo = deep;
    let mut hi = deep / (deep * h).tanh();
    let residual = |k: T| g * k * (k * h).tanh() - w2;
    let tol = T::epsilon() * T::of(16.0) * w2;
    let mut k = deep / (deep * h).tanh().sqrt();
    for _ in 0..200 {
        let r = residual(k);
        if r.abs() <= tol {
            return Ok(k);
        }
        if r > T::zero() {
            hi = k;
        } else {
            lo = k;
        }
        let th = (k * h).tanh();
        let deriv = g * th + g * k * h * (T::one() - th * th);
        let mut next = k - r / deriv;
        if !(next > lo && next < hi) {
            next = (lo + hi) / T::of(2.0);
        }
        if next == k {
            break;
        }
        k = next;
    }
    let r = residual(k);
    if r.abs() <= tol * T::of(64.0) {
        return Ok(k);
    }
    Err(Error::DispersionNotConverged {
        omega: omega.to_f64_lossy(),
        residual: r.to_f64_lossy(),
    })
}

/// tanh(k h) for the given frequency; 1 in deep water.
pub fn depth_attenuation<T: Real>(omega: T, ctx: &PhysicalContext<T>) -> Result<T> {
    match ctx.water_depth {
        WaterDepth::Infinite => Ok(T::one()),
        WaterDepth::Finite(h) => {
            let k = dispersion_wavenumber(omega.abs(), ctx)?;
            Ok((k * h).tanh())
        }
    }
}
