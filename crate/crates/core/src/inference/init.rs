use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::frequencies::FrequencySelection;
use crate::inference::Periodogram;
use crate::Parameters;

/// Values used for the parameters that are not read off the data.
pub const DEFAULT_GAMMA: f64 = 3.3;
pub const DEFAULT_R: f64 = 5.0;
pub const DEFAULT_BETA: f64 = 4.0;
pub const DEFAULT_NU: f64 = 2.7;
pub const DEFAULT_SIGMA_L: f64 = 0.55;
pub const DEFAULT_SIGMA_R: f64 = 0.26;

/// Half-width (in Fourier bins) of the running mean used to locate the peak.
pub fn smoothing_half_width(n: usize) -> usize {
    (n / 512).max(1)
}

/// Starting point for the optimisers.
///
/// ω_p is the frequency of the largest smoothed heave periodogram ordinate
/// in the selection, φ_m the mean direction of the smoothed first-order
/// cross spectra there, and α is set so the model peak matches the smoothed
/// peak. The other parameters take fixed default values.
pub fn initial_parameters(
    pgram: &Periodogram,
    selection: &FrequencySelection,
) -> Result<Parameters> {
    if selection.is_empty() {
        return Err(Error::InvalidSelection("empty frequency selection".into()));
    }
    let idx = selection.indices();
    let k = smoothing_half_width(pgram.n());
    let smooth = |pos: usize, f: &dyn Fn(isize) -> f64| -> f64 {
        let lo = pos.saturating_sub(k);
        let hi = (pos + k).min(idx.len() - 1);
        (lo..=hi).map(|p| f(idx[p])).sum::<f64>() / (hi - lo + 1) as f64
    };
    let zz = |j: isize| pgram.at(j)[(0, 0)].re;
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for pos in 0..idx.len() {
        let v = smooth(pos, &zz);
        if v > best_val {
            best_val = v;
            best = pos;
        }
    }
    let j_peak = idx[best];
    let omega_p = selection
        .omega(j_peak)
        .abs()
        .clamp(selection.low_cut().max(1e-6), selection.high_cut());
    // Cross spectra flip sign with the frequency; work on |j|.
    let sign = |j: isize| if j < 0 { -1.0 } else { 1.0 };
    let a1 = smooth(best, &|j| sign(j) * pgram.at(j)[(1, 0)].im);
    let b1 = smooth(best, &|j| sign(j) * pgram.at(j)[(2, 0)].im);
    let phi_m = if a1 == 0.0 && b1 == 0.0 {
        0.0
    } else {
        b1.atan2(a1).rem_euclid(2.0 * PI)
    };

    let gamma = DEFAULT_GAMMA;
    let r = DEFAULT_R;
    let peak = best_val.max(f64::MIN_POSITIVE);
    let alpha = peak * omega_p.powf(r) * (r / 4.0).exp() / gamma;
    Ok(Parameters::new(
        alpha,
        omega_p,
        gamma,
        r,
        phi_m,
        DEFAULT_BETA,
        DEFAULT_NU,
        DEFAULT_SIGMA_L,
        DEFAULT_SIGMA_R,
    ))
}
