//! JONSWAP marginal spectral density.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::params::Parameters;

/// Peak width below the peak frequency.
pub const PEAK_WIDTH_BELOW: f64 = 0.07;
/// Peak width above the peak frequency.
pub const PEAK_WIDTH_ABOVE: f64 = 0.09;

/// Two-sided JONSWAP density f(ω; θ) in m² s/rad. Even in ω, zero at ω = 0.
pub fn jonswap_sdf<T: Real>(omega: T, theta: &Parameters<T>) -> Result<T> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite, got {omega}")));
    }
    Ok(jonswap_value(omega.abs(), theta))
}

#[inline]
pub(crate) fn jonswap_value<T: Real>(a: T, theta: &Parameters<T>) -> T {
    if a == T::zero() {
        return T::zero();
    }
    let x = a / theta.omega_p;
    let x2 = x * x;
    let width = if a <= theta.omega_p {
        T::of(PEAK_WIDTH_BELOW)
    } else {
        T::of(PEAK_WIDTH_ABOVE)
    };
    let dx = x - T::one();
    let delta = (-(dx * dx) / (T::of(2.0) * width * width)).exp();
    let log_f = theta.alpha.ln() - theta.r * a.ln() - theta.r / T::of(4.0) / (x2 * x2)
        + delta * theta.gamma.ln();
    log_f.exp()
}

/// Value and partial derivatives with respect to (α, ω_p, γ, r) at `a = |ω| > 0`.
#[inline]
pub(crate) fn jonswap_with_gradient<T: Real>(a: T, theta: &Parameters<T>) -> (T, [T; 4]) {
    if a == T::zero() {
        return (T::zero(), [T::zero(); 4]);
    }
    let wp = theta.omega_p;
    let x = a / wp;
    let inv_x4 = T::one() / (x * x * x * x);
    let width = if a <= wp {
        T::of(PEAK_WIDTH_BELOW)
    } else {
        T::of(PEAK_WIDTH_ABOVE)
    };
    let dx = x - T::one();
    let w2 = width * width;
    let delta = (-(dx * dx) / (T::of(2.0) * w2)).exp();
    let log_gamma = theta.gamma.ln();
    let log_f =
        theta.alpha.ln() - theta.r * a.ln() - theta.r / T::of(4.0) * inv_x4 + delta * log_gamma;
    let f = log_f.exp();

    let d_alpha = T::one() / theta.alpha;
    // d/dω_p of -(r/4) ω_p⁴/a⁴ is -r ω_p³/a⁴ = -r inv_x4 / ω_p.
    let d_delta_dwp = delta * dx / w2 * (a / (wp * wp));
    let d_wp = -theta.r * inv_x4 / wp + log_gamma * d_delta_dwp;
    let d_gamma = delta / theta.gamma;
    let d_r = -a.ln() - inv_x4 / T::of(4.0);
    (f, [f * d_alpha, f * d_wp, f * d_gamma, f * d_r])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frequency_gives_zero() {
        let th = Parameters::scenario1();
        assert_eq!(jonswap_sdf(0.0, &th).unwrap(), 0.0);
    }

    #[test]
    fn even_in_omega() {
        let th = Parameters::scenario1();
        for &w in &[0.3, 0.8, 1.7, 3.9] {
            assert_eq!(jonswap_sdf(w, &th).unwrap(), jonswap_sdf(-w, &th).unwrap());
        }
    }

    #[test]
    fn peak_value_scenario1() {
        let th = Parameters::scenario1();
        let expected = 0.7 * 0.8f64.powf(-5.0) * (-1.25f64).exp() * 3.3;
        let v = jonswap_sdf(0.8, &th).unwrap();
        assert!((v - expected).abs() < 1e-12 * expected);
        assert!((v - 2.0197).abs() < 1e-4);
    }

    #[test]
    fn non_finite_omega_is_domain_error() {
        let th = Parameters::scenario1();
        assert!(matches!(jonswap_sdf(f64::NAN, &th), Err(Error::Domain(_))));
        assert!(jonswap_sdf(f64::INFINITY, &th).is_err());
    }

    #[test]
    fn single_precision_agrees() {
        let th = Parameters::scenario1();
        let v64 = jonswap_sdf(1.1, &th).unwrap();
        let v32 = jonswap_sdf(1.1f32, &th.cast::<f32>()).unwrap();
        assert!(((v32 as f64) - v64).abs() < 1e-5 * v64);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let th = Parameters::scenario1();
        for &a in &[0.5, 0.79, 0.85, 1.2, 2.5] {
            let (_, g) = jonswap_with_gradient(a, &th);
            for (k, p) in super::super::Param::MARGINAL.iter().enumerate() {
                let h = 1e-6 * th.get(*p).abs().max(1.0);
                let fp = jonswap_value(a, &th.with(*p, th.get(*p) + h));
                let fm = jonswap_value(a, &th.with(*p, th.get(*p) - h));
                let fd = (fp - fm) / (2.0 * h);
                // Differences of f are only good to about 1e-16 f / h.
                let f = jonswap_value(a, &th);
                let tol = 1e-6 * g[k].abs().max(fd.abs()) + 1e-14 * f / h;
                assert!((g[k] - fd).abs() <= tol, "a={a} p={p:?} {} vs {fd}", g[k]);
            }
        }
    }
}
