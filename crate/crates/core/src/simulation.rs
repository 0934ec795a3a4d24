//! Gaussian sample paths whose second-order structure follows the model.
//!
//! Both methods draw independent complex Gaussian vectors on a frequency
//! grid of length L, colour them with a square root of a per-frequency
//! covariance matrix, and transform back with one inverse FFT per channel.
//!
//! * Spectral approximation: the covariance at ω_m = 2πm/(LΔ) is the aliased
//!   model matrix times 2π/(LΔ). With the default L = 4n the sample has
//!   exactly the autocovariance used by the expected periodogram.
//! * Circulant embedding: the covariance is the DFT of the model
//!   autocovariance wrapped onto a circle of length 2(n−1), which reproduces
//!   c(τ) exactly when that DFT is non-negative definite.
//!
//! Randomness comes from ChaCha20 seeded with the study seed, with the
//! replication index selecting the stream, so every replication is
//! reproducible independently of scheduling.

use std::sync::Arc;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::discrete_sampling::{aliased_sdf_matrix, approx_autocovariance};
use crate::error::{Error, Result};
use crate::inference::SeaStateSample;
use crate::{Parameters, PhysicalContext, SamplingScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMethod {
    #[default]
    SpectralApproximation,
    CirculantEmbedding,
}

/// Default ratio of the synthesis grid to the sample length.
pub const DEFAULT_PADDING: usize = 4;

/// Largest number of doublings tried to make a circulant embedding
/// non-negative definite.
const MAX_EMBEDDING_DOUBLINGS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub theta: Parameters,
    pub ctx: PhysicalContext,
    pub scheme: SamplingScheme,
    pub seed: u64,
    /// Stream index within the seed, typically the replication number.
    pub replication: u64,
    pub method: SimulationMethod,
    /// Synthesis grid length as a multiple of n (spectral method only).
    pub padding: usize,
}

impl SimulationSpec {
    pub fn new(theta: Parameters, ctx: PhysicalContext, scheme: SamplingScheme, seed: u64) -> Self {
        Self {
            theta,
            ctx,
            scheme,
            seed,
            replication: 0,
            method: SimulationMethod::SpectralApproximation,
            padding: DEFAULT_PADDING,
        }
    }
}

/// Precomputed colouring factors for repeated draws at one model.
pub struct Simulator {
    n: usize,
    delta: f64,
    grid_len: usize,
    /// Square roots of the covariance at m = 0..=L/2.
    factors: Vec<Matrix3<Complex64>>,
    fft: Arc<dyn Fft<f64>>,
    method: SimulationMethod,
}

impl std::fmt::Debug for Simulator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulator")
            .field("n", &self.n)
            .field("delta", &self.delta)
            .field("grid_len", &self.grid_len)
            .field("method", &self.method)
            .finish()
    }
}

fn to_nalgebra(m: &crate::SpectralMatrix) -> Matrix3<Complex64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

/// Hermitian square root of a non-negative definite matrix; returns the
/// most negative eigenvalue relative to the largest as well.
fn hermitian_sqrt(c: &Matrix3<Complex64>) -> (Matrix3<Complex64>, f64) {
    let h = (c + c.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let low = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &l| a.min(l));
    let d = Matrix3::from_diagonal(
        &eig.eigenvalues
            .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
    );
    let root = eig.eigenvectors * d * eig.eigenvectors.adjoint();
    (root, if top > 0.0 { low / top } else { 0.0 })
}

impl Simulator {
    pub fn new(
        theta: &Parameters,
        ctx: &PhysicalContext,
        scheme: &SamplingScheme,
        method: SimulationMethod,
        padding: usize,
    ) -> Result<Self> {
        scheme.validate()?;
        theta.validate()?;
        match method {
            SimulationMethod::SpectralApproximation => Self::spectral(theta, ctx, scheme, padding),
            SimulationMethod::CirculantEmbedding => match Self::circulant(theta, ctx, scheme)? {
                Some(s) => Ok(s),
                None => {
                    log::warn!(
                        "circulant embedding is not non-negative definite after {MAX_EMBEDDING_DOUBLINGS} doublings; \
                         using the spectral approximation"
                    );
                    Self::spectral(theta, ctx, scheme, padding)
                }
            },
        }
    }

    fn spectral(
        theta: &Parameters,
        ctx: &PhysicalContext,
        scheme: &SamplingScheme,
        padding: usize,
    ) -> Result<Self> {
        if padding == 0 {
            return Err(Error::InvalidSettings("padding must be at least 1".into()));
        }
        let mut grid_len = padding * scheme.n;
        grid_len += grid_len % 2;
        let dw = 2.0 * std::f64::consts::PI / (grid_len as f64 * scheme.delta);
        let mut factors = Vec::with_capacity(grid_len / 2 + 1);
        for m in 0..=grid_len / 2 {
            let w = dw * m as f64;
            let mut f = aliased_sdf_matrix(w, theta, ctx, scheme)?;
            if m == grid_len / 2 {
                f = (f + aliased_sdf_matrix(-w, theta, ctx, scheme)?).scale(0.5);
            }
            let (root, _) = hermitian_sqrt(&to_nalgebra(&f.scale(dw)));
            factors.push(root);
        }
        Ok(Self {
            n: scheme.n,
            delta: scheme.delta,
            grid_len,
            factors,
            fft: FftPlanner::new().plan_fft_inverse(grid_len),
            method: SimulationMethod::SpectralApproximation,
        })
    }

    fn circulant(
        theta: &Parameters,
        ctx: &PhysicalContext,
        scheme: &SamplingScheme,
    ) -> Result<Option<Self>> {
        let mut half = scheme.n - 1;
        for _ in 0..=MAX_EMBEDDING_DOUBLINGS {
            let cov = approx_autocovariance(
                theta,
                ctx,
                &SamplingScheme {
                    n: half + 1,
                    ..*scheme
                },
            )?;
            let len = 2 * half;
            // Wrapped sequence c̃(k) = c(k) for k ≤ half, c(k − len) beyond.
            let lag = |k: usize| -> Matrix3<f64> {
                let tau = if k <= half {
                    k as isize
                } else {
                    k as isize - len as isize
                };
                let c = cov.at(tau);
                Matrix3::from_fn(|i, j| c[i][j])
            };
            let mut factors = Vec::with_capacity(half + 1);
            let mut worst = 0.0f64;
            let planner_fft = FftPlanner::new().plan_fft_forward(len);
            let mut spectra = vec![[[Complex64::new(0.0, 0.0); 3]; 3]; len];
            for i in 0..3 {
                for j in 0..3 {
                    let mut buf: Vec<Complex64> = (0..len)
                        .map(|k| Complex64::new(lag(k)[(i, j)], 0.0))
                        .collect();
                    planner_fft.process(&mut buf);
                    for (s, v) in spectra.iter_mut().zip(buf) {
                        s[i][j] = v / len as f64;
                    }
                }
            }
            for s in spectra.iter().take(half + 1) {
                let (root, low) = hermitian_sqrt(&Matrix3::from_fn(|i, j| s[i][j]));
                worst = worst.min(low);
                factors.push(root);
            }
            if worst >= -1e-10 {
                return Ok(Some(Self {
                    n: scheme.n,
                    delta: scheme.delta,
                    grid_len: len,
                    factors,
                    fft: FftPlanner::new().plan_fft_inverse(len),
                    method: SimulationMethod::CirculantEmbedding,
                }));
            }
            log::debug!("circulant embedding of length {len} has relative eigenvalue {worst:e}");
            half *= 2;
        }
        Ok(None)
    }

    /// Method actually in use (after any fallback).
    pub fn method(&self) -> SimulationMethod {
        self.method
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    /// Draw the sample for stream `replication` of `seed`.
    pub fn sample(&self, seed: u64, replication: u64) -> Result<SeaStateSample> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(replication);
        let l = self.grid_len;
        let half = l / 2;
        let mut spec = vec![[Complex64::new(0.0, 0.0); 3]; l];
        let gauss = |rng: &mut ChaCha20Rng| -> f64 { StandardNormal.sample(rng) };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for m in 0..=half {
            let xi: Vector3<Complex64> = if m == 0 || m == half {
                Vector3::from_fn(|_, _| Complex64::new(gauss(&mut rng), 0.0))
            } else {
                Vector3::from_fn(|_, _| Complex64::new(h * gauss(&mut rng), h * gauss(&mut rng)))
            };
            let y = self.factors[m] * xi;
            let y = if m == 0 || m == half {
                y.map(|v| Complex64::new(v.re, 0.0))
            } else {
                y
            };
            for c in 0..3 {
                spec[m][c] = y[c];
                if m != 0 && m != half {
                    spec[l - m][c] = y[c].conj();
                }
            }
        }
        let mut rows = vec![[0.0; 3]; self.n];
        let mut buf = vec![Complex64::new(0.0, 0.0); l];
        for c in 0..3 {
            for (b, s) in buf.iter_mut().zip(spec.iter()) {
                *b = s[c];
            }
            self.fft.process(&mut buf);
            for (r, v) in rows.iter_mut().zip(buf.iter()) {
                r[c] = v.re;
            }
        }
        SeaStateSample::new(rows, self.delta, None)
    }
}

/// One sample described entirely by a [`SimulationSpec`].
pub fn simulate(spec: &SimulationSpec) -> Result<SeaStateSample> {
    Simulator::new(
        &spec.theta,
        &spec.ctx,
        &spec.scheme,
        spec.method,
        spec.padding,
    )?
    .sample(spec.seed, spec.replication)
}
