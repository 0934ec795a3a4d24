use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::frequencies::fourier_index_range;
use crate::inference::SeaStateSample;
use crate::SpectralMatrix;

/// Multivariate periodogram I(ω_j) = J(ω_j) J(ω_j)^H at every Fourier
/// frequency, with J(ω) = sqrt(Δ/(2πn)) Σ_t P_t exp(-iωtΔ).
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    n: usize,
    delta: f64,
    /// Matrices in FFT order (index j mod n).
    values: Vec<SpectralMatrix>,
}

impl Periodogram {
    /// Periodogram built from arbitrary Hermitian matrices, one per Fourier
    /// index in FFT order.
    pub fn from_matrices(n: usize, delta: f64, values: Vec<SpectralMatrix>) -> Result<Self> {
        if values.len() != n || n < 2 {
            return Err(Error::InvalidSample(format!(
                "expected {n} matrices, got {}",
                values.len()
            )));
        }
        Ok(Self { n, delta, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Value at signed Fourier index `j`.
    pub fn at(&self, j: isize) -> &SpectralMatrix {
        &self.values[j.rem_euclid(self.n as isize) as usize]
    }

    /// Signed indices of Ω_n in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = isize> {
        let (lo, hi) = fourier_index_range(self.n);
        lo..=hi
    }

    pub fn omega(&self, j: isize) -> f64 {
        2.0 * PI * j as f64 / (self.n as f64 * self.delta)
    }
}

/// DFT J(ω_j) of each channel, FFT order.
pub fn dft(sample: &SeaStateSample) -> Vec<[Complex64; 3]> {
    let n = sample.len();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let scale = (sample.delta() / (2.0 * PI * n as f64)).sqrt();
    let mut out = vec![[Complex64::new(0.0, 0.0); 3]; n];
    for c in 0..3 {
        let mut buf: Vec<Complex64> = sample
            .rows()
            .iter()
            .map(|r| Complex64::new(r[c], 0.0))
            .collect();
        fft.process(&mut buf);
        for (o, v) in out.iter_mut().zip(buf) {
            o[c] = v * scale;
        }
    }
    out
}

/// Periodogram of the sample as given; remove the mean first for spectral
/// estimation.
pub fn periodogram(sample: &SeaStateSample) -> Periodogram {
    let values = dft(sample).iter().map(SpectralMatrix::outer).collect();
    Periodogram {
        n: sample.len(),
        delta: sample.delta(),
        values,
    }
}
