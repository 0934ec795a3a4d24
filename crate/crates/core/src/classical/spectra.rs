use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::SeaStateSample;
use crate::SpectralMatrix;

/// Nonparametric cross-spectral estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SpectralMethod {
    /// Average of `tapers` eigenspectra with sine tapers.
    Multitaper { tapers: usize },
    /// Single rectangular taper: the raw periodogram.
    Rectangular,
    /// Hann-windowed segments of `segment_len` samples with 50% overlap.
    Welch { segment_len: usize },
}

impl Default for SpectralMethod {
    fn default() -> Self {
        SpectralMethod::Multitaper { tapers: 8 }
    }
}

/// Hermitian spectral matrix estimates at ω_k = 2πk/(LΔ), k = 0..=L/2,
/// where L is n (tapered estimates) or the Welch segment length.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSpectralEstimate {
    pub omegas: Vec<f64>,
    pub values: Vec<SpectralMatrix>,
    pub method: SpectralMethod,
    /// Length of the transform behind each ordinate.
    pub transform_len: usize,
    pub delta: f64,
    /// Half-width of the spectral window in rad/s.
    pub bandwidth: f64,
}

impl CrossSpectralEstimate {
    /// Frequency resolution 2π/(LΔ).
    pub fn resolution(&self) -> f64 {
        2.0 * PI / (self.transform_len as f64 * self.delta)
    }

    /// Position of the ordinate nearest to `omega`.
    pub fn nearest(&self, omega: f64) -> usize {
        let k = (omega / self.resolution()).round().max(0.0) as usize;
        k.min(self.omegas.len() - 1)
    }

    /// Σ_k f̂(ω_k)·2π/(LΔ) over the full circle, using conjugate symmetry.
    pub fn integrated(&self) -> [[f64; 3]; 3] {
        let l = self.transform_len;
        let dw = self.resolution();
        let mut acc = [[0.0; 3]; 3];
        for (k, m) in self.values.iter().enumerate() {
            let w = if k == 0 || 2 * k == l { 1.0 } else { 2.0 };
            for i in 0..3 {
                for j in 0..3 {
                    acc[i][j] += w * m[(i, j)].re * dw;
                }
            }
        }
        acc
    }
}

/// Orthonormal sine tapers h_k(t) = sqrt(2/(n+1)) sin(πk(t+1)/(n+1)).
pub fn sine_tapers(n: usize, count: usize) -> Vec<Vec<f64>> {
    let s = (2.0 / (n as f64 + 1.0)).sqrt();
    (1..=count)
        .map(|k| {
            (0..n)
                .map(|t| s * (PI * k as f64 * (t as f64 + 1.0) / (n as f64 + 1.0)).sin())
                .collect()
        })
        .collect()
}

/// Average of the tapered rank-one estimates, each taper of unit energy.
fn tapered(rows: &[[f64; 3]], delta: f64, tapers: &[Vec<f64>]) -> Vec<SpectralMatrix> {
    let n = rows.len();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let half = n / 2;
    let scale = (delta / (2.0 * PI)).sqrt();
    let mut out = vec![SpectralMatrix::zero(); half + 1];
    let mut bufs = vec![vec![Complex64::new(0.0, 0.0); n]; 3];
    for h in tapers {
        for c in 0..3 {
            for t in 0..n {
                bufs[c][t] = Complex64::new(h[t] * rows[t][c] * scale, 0.0);
            }
            fft.process(&mut bufs[c]);
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o += SpectralMatrix::outer(&[bufs[0][k], bufs[1][k], bufs[2][k]]);
        }
    }
    let inv = 1.0 / tapers.len() as f64;
    out.iter().map(|m| m.scale(inv).hermitian_part()).collect()
}

/// Cross-spectral matrix estimate of the sample as given (remove the mean
/// beforehand). Integrates to the sample covariance at lag zero up to the
/// taper bias.
pub fn cross_spectra(
    sample: &SeaStateSample,
    method: SpectralMethod,
) -> Result<CrossSpectralEstimate> {
    let n = sample.len();
    let delta = sample.delta();
    let rows = sample.rows();
    match method {
        SpectralMethod::Multitaper { tapers } => {
            if tapers == 0 || tapers >= n / 2 {
                return Err(Error::InvalidSettings(format!(
                    "{tapers} tapers is not valid for n={n}"
                )));
            }
            let values = tapered(rows, delta, &sine_tapers(n, tapers));
            Ok(CrossSpectralEstimate {
                omegas: (0..values.len())
                    .map(|k| 2.0 * PI * k as f64 / (n as f64 * delta))
                    .collect(),
                values,
                method,
                transform_len: n,
                delta,
                bandwidth: (tapers as f64 + 1.0) * PI / ((n as f64 + 1.0) * delta),
            })
        }
        SpectralMethod::Rectangular => {
            let h = vec![vec![1.0 / (n as f64).sqrt(); n]];
            let values = tapered(rows, delta, &h);
            Ok(CrossSpectralEstimate {
                omegas: (0..values.len())
                    .map(|k| 2.0 * PI * k as f64 / (n as f64 * delta))
                    .collect(),
                values,
                method,
                transform_len: n,
                delta,
                bandwidth: PI / (n as f64 * delta),
            })
        }
        SpectralMethod::Welch { segment_len } => {
            if segment_len < 4 || segment_len > n {
                return Err(Error::InvalidSettings(format!(
                    "Welch segment {segment_len} is not valid for n={n}"
                )));
            }
            let step = segment_len / 2;
            let raw: Vec<f64> = (0..segment_len)
                .map(|t| 0.5 - 0.5 * (2.0 * PI * t as f64 / segment_len as f64).cos())
                .collect();
            let energy: f64 = raw.iter().map(|v| v * v).sum();
            let window: Vec<f64> = raw.iter().map(|v| v / energy.sqrt()).collect();
            let mut acc: Vec<SpectralMatrix> = vec![SpectralMatrix::zero(); segment_len / 2 + 1];
            let mut count = 0;
            let mut start = 0;
            while start + segment_len <= n {
                let seg = tapered(
                    &rows[start..start + segment_len],
                    delta,
                    std::slice::from_ref(&window),
                );
                for (a, v) in acc.iter_mut().zip(seg) {
                    *a += v;
                }
                count += 1;
                start += step;
            }
            let values: Vec<SpectralMatrix> =
                acc.iter().map(|m| m.scale(1.0 / count as f64)).collect();
            Ok(CrossSpectralEstimate {
                omegas: (0..values.len())
                    .map(|k| 2.0 * PI * k as f64 / (segment_len as f64 * delta))
                    .collect(),
                values,
                method,
                transform_len: segment_len,
                delta,
                bandwidth: 2.0 * PI / (segment_len as f64 * delta),
            })
        }
    }
}
