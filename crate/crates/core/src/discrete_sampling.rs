//! From continuous-time models to finite samples: aliasing, an FFT
//! approximation of the autocovariance, and the expected periodogram with
//! its parameter gradients.
//!
//! The expected periodogram at Fourier frequency ω_k is
//!
//! ```text
//! E[I(ω_k); θ] = Δ/(2π) Σ_{|τ|<n} (1 - |τ|/n) c(τ; θ) exp(-i ω_k τ Δ)
//! ```
//!
//! where c is obtained by an inverse FFT of the aliased model on a fine grid
//! of M = 4n frequencies. Every entry of the model matrix is either real and
//! even in ω or purely imaginary and odd, so every covariance entry is real.
//! Two such entries share one complex FFT in each direction.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::frequencies::FrequencySelection;
use crate::scalar::Real;
use crate::spectral_matrix::SpectralMatrix;
use crate::wave_models::{
    depth_attenuation, model_pattern, model_pattern_with_gradient, sdf_matrix, EntryPattern,
    Parameters, PhysicalContext, N_PARAMS,
};

/// Ratio between the autocovariance grid and the sample length.
pub const FINE_GRID_FACTOR: usize = 4;

/// Sampling interval, record length and the number of Nyquist folds
/// wrapped on each side when aliasing the continuous model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingScheme<T> {
    pub delta: T,
    pub n: usize,
    pub alias_folds: usize,
}

impl<T: Real> SamplingScheme<T> {
    /// No aliasing (`alias_folds = 0`).
    pub fn new(delta: T, n: usize) -> Self {
        Self {
            delta,
            n,
            alias_folds: 0,
        }
    }

    pub fn with_alias_folds(mut self, folds: usize) -> Self {
        self.alias_folds = folds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > T::zero()) || !self.delta.is_finite() {
            return Err(Error::InvalidSettings(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidSettings(format!(
                "n must be >= 2, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn nyquist(&self) -> T {
        T::PI() / self.delta
    }

    pub fn fine_grid_len(&self) -> usize {
        FINE_GRID_FACTOR * self.n
    }
}

/// Which channels the expected periodogram is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSet {
    /// The full (z, x, y) matrix.
    Full,
    /// Heave only; every other entry is left at zero.
    VerticalOnly,
}

/// Sum of the continuous model over `j = -K..=K` Nyquist folds,
/// f(ω) + Σ_{j≠0} f(ω + 2πj/Δ).
pub fn aliased_sdf_matrix<T: Real>(
    omega: T,
    theta: &Parameters<T>,
    ctx: &PhysicalContext<T>,
    scheme: &SamplingScheme<T>,
) -> Result<SpectralMatrix<T>> {
    scheme.validate()?;
    let nyq = scheme.nyquist();
    if !(omega.abs() <= nyq * (T::one() + T::epsilon() * T::of(8.0))) {
        return Err(Error::Domain(format!(
            "|omega| = {} exceeds the Nyquist frequency {nyq}",
            omega.abs()
        )));
    }
    let k = scheme.alias_folds as isize;
    let period = T::of(2.0) * nyq;
    let mut acc = SpectralMatrix::zero();
    for j in -k..=k {
        acc += sdf_matrix(omega + period * T::of(j as f64), theta, ctx)?;
    }
    Ok(acc)
}

/// Real 3×3 autocovariance c(τΔ) for lags τ = -(n-1)…(n-1), in m².
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSequence<T> {
    n: usize,
    lags: Vec<[[T; 3]; 3]>,
}

impl<T: Real> CovarianceSequence<T> {
    pub fn from_lags(n: usize, lags: Vec<[[T; 3]; 3]>) -> Result<Self> {
        if lags.len() != 2 * n - 1 {
            return Err(Error::InvalidSettings(format!(
                "expected {} lags, got {}",
                2 * n - 1,
                lags.len()
            )));
        }
        Ok(Self { n, lags })
    }

    /// Covariance at lag `tau`, |tau| < n.
    pub fn at(&self, tau: isize) -> &[[T; 3]; 3] {
        &self.lags[(tau + self.n as isize - 1) as usize]
    }

    pub fn max_lag(&self) -> usize {
        self.n - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// E[I_n(ω); θ] at the frequencies of a selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedPeriodogram<T> {
    pub indices: Vec<isize>,
    pub values: Vec<SpectralMatrix<T>>,
}

/// Which quantity a packed field carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Value,
    Grad(usize),
}

#[derive(Debug, Clone, Copy)]
struct Field {
    source: Source,
    entry: usize,
}

/// Entries 1 and 2 (xz, yz) are imaginary and odd in ω.
#[inline]
fn is_odd(entry: usize) -> bool {
    entry == 1 || entry == 2
}

/// Model values (and optionally gradients) expressed as entry patterns at
/// positive Fourier frequencies.
#[derive(Debug, Clone)]
pub(crate) struct PatternEvaluation<T> {
    pub values: Vec<EntryPattern<T>>,
    pub gradients: Vec<[EntryPattern<T>; N_PARAMS]>,
}

/// Reusable FFT plans and depth factors for repeated evaluation of the
/// expected periodogram at one sampling scheme.
pub struct ExpectedPeriodogramPlan<T: Real> {
    ctx: PhysicalContext<T>,
    scheme: SamplingScheme<T>,
    channels: ChannelSet,
    fine_len: usize,
    inverse: Arc<dyn Fft<T>>,
    forward: Arc<dyn Fft<T>>,
    /// tanh(k h) per (grid point, fold); empty in deep water.
    attenuation: Vec<T>,
}

impl<T: Real> std::fmt::Debug for ExpectedPeriodogramPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExpectedPeriodogramPlan")
            .field("scheme", &self.scheme)
            .field("channels", &self.channels)
            .field("fine_len", &self.fine_len)
            .finish()
    }
}

impl<T: Real> ExpectedPeriodogramPlan<T> {
    pub fn new(
        ctx: PhysicalContext<T>,
        scheme: SamplingScheme<T>,
        channels: ChannelSet,
    ) -> Result<Self> {
        Self::with_fine_grid(ctx, scheme, channels, scheme.fine_grid_len())
    }

    /// Plan with an explicit fine-grid length `fine_len` (even, ≥ 2n).
    pub fn with_fine_grid(
        ctx: PhysicalContext<T>,
        scheme: SamplingScheme<T>,
        channels: ChannelSet,
        fine_len: usize,
    ) -> Result<Self> {
        scheme.validate()?;
        ctx.validate()?;
        if fine_len < 2 * scheme.n || fine_len % 2 != 0 {
            return Err(Error::InvalidSettings(format!(
                "fine grid length {fine_len} must be even and at least 2n = {}",
                2 * scheme.n
            )));
        }
        let mut planner = FftPlanner::new();
        let inverse = planner.plan_fft_inverse(fine_len);
        let forward = planner.plan_fft_forward(scheme.n);
        let mut plan = Self {
            ctx,
            scheme,
            channels,
            fine_len,
            inverse,
            forward,
            attenuation: Vec::new(),
        };
        if !ctx.is_deep() {
            let folds = 2 * scheme.alias_folds + 1;
            let mut att = Vec::with_capacity((fine_len / 2 + 1) * folds);
            for m in 0..=fine_len / 2 {
                for j in plan.fold_offsets() {
                    let w = plan.grid_omega(m) + plan.period() * T::of(j as f64);
                    att.push(if w == T::zero() {
                        T::one()
                    } else {
                        depth_attenuation(w.abs(), &ctx)?
                    });
                }
            }
            plan.attenuation = att;
        }
        Ok(plan)
    }

    pub fn scheme(&self) -> &SamplingScheme<T> {
        &self.scheme
    }

    pub fn context(&self) -> &PhysicalContext<T> {
        &self.ctx
    }

    pub fn channels(&self) -> ChannelSet {
        self.channels
    }

    fn period(&self) -> T {
        T::of(2.0) * self.scheme.nyquist()
    }

    fn grid_omega(&self, m: usize) -> T {
        self.period() * T::of(m as f64) / T::of(self.fine_len as f64)
    }

    fn fold_offsets(&self) -> std::ops::RangeInclusive<isize> {
        let k = self.scheme.alias_folds as isize;
        -k..=k
    }

    fn fields(&self, with_gradient: bool) -> Vec<Field> {
        let mut fields = Vec::new();
        let value_entries: &[usize] = match self.channels {
            ChannelSet::Full => &[0, 1, 2, 3, 4, 5],
            ChannelSet::VerticalOnly => &[0],
        };
        for &entry in value_entries {
            fields.push(Field {
                source: Source::Value,
                entry,
            });
        }
        if with_gradient {
            // The α-derivative is value/α and needs no transform.
            for p in 1..N_PARAMS {
                for &entry in value_entries {
                    if p >= 4 && entry == 0 {
                        continue;
                    }
                    fields.push(Field {
                        source: Source::Grad(p),
                        entry,
                    });
                }
            }
        }
        fields
    }

    /// Aliased model patterns on the non-negative half of the fine grid.
    fn fine_grid(
        &self,
        theta: &Parameters<T>,
        with_gradient: bool,
    ) -> (Vec<EntryPattern<T>>, Vec<[EntryPattern<T>; N_PARAMS]>) {
        let half = self.fine_len / 2;
        let mut values = vec![EntryPattern::zero(); half + 1];
        let mut grads = if with_gradient {
            vec![[EntryPattern::zero(); N_PARAMS]; half + 1]
        } else {
            Vec::new()
        };
        let folds = 2 * self.scheme.alias_folds + 1;
        for m in 0..=half {
            let base = self.grid_omega(m);
            for (fi, j) in self.fold_offsets().enumerate() {
                let w = base + self.period() * T::of(j as f64);
                if w == T::zero() {
                    continue;
                }
                let a = w.abs();
                let sign = if w < T::zero() { -T::one() } else { T::one() };
                let t = if self.attenuation.is_empty() {
                    T::one()
                } else {
                    self.attenuation[m * folds + fi]
                };
                if with_gradient {
                    let (p, g) = model_pattern_with_gradient(a, theta, t);
                    accumulate(&mut values[m], &p, sign);
                    for (acc, gp) in grads[m].iter_mut().zip(g.iter()) {
                        accumulate(acc, gp, sign);
                    }
                } else {
                    let p = model_pattern(a, theta, t);
                    accumulate(&mut values[m], &p, sign);
                }
            }
        }
        // ±π/Δ share one grid point; their average has only real entries.
        for m in [0, half] {
            values[m].xz = T::zero();
            values[m].yz = T::zero();
            if with_gradient {
                for g in grads[m].iter_mut() {
                    g.xz = T::zero();
                    g.yz = T::zero();
                }
            }
        }
        (values, grads)
    }

    fn field_value(
        values: &[EntryPattern<T>],
        grads: &[[EntryPattern<T>; N_PARAMS]],
        field: Field,
        m: usize,
    ) -> T {
        let p = match field.source {
            Source::Value => &values[m],
            Source::Grad(k) => &grads[m][k],
        };
        p.as_array()[field.entry]
    }

    /// Complex spectrum of one field over the whole fine grid.
    fn field_spectrum(
        &self,
        values: &[EntryPattern<T>],
        grads: &[[EntryPattern<T>; N_PARAMS]],
        field: Field,
    ) -> Vec<Complex<T>> {
        let m_len = self.fine_len;
        let half = m_len / 2;
        let mut out = vec![Complex::new(T::zero(), T::zero()); m_len];
        let odd = is_odd(field.entry);
        for m in 0..=half {
            let v = Self::field_value(values, grads, field, m);
            let (pos, neg) = if odd {
                (Complex::new(T::zero(), v), Complex::new(T::zero(), -v))
            } else {
                (Complex::new(v, T::zero()), Complex::new(v, T::zero()))
            };
            out[m] = pos;
            if m != 0 && m != half {
                out[m_len - m] = neg;
            }
        }
        out
    }

    /// Triangle-kernel fold of a circular covariance onto lags 0..n-1,
    /// g(τ) = (1-τ/n) c(τ) + (τ/n) c(τ-n).
    fn fold(&self, c: impl Fn(usize) -> T) -> Vec<T> {
        let n = self.scheme.n;
        let nf = T::of(n as f64);
        let mut g = Vec::with_capacity(n);
        g.push(c(0));
        for tau in 1..n {
            let w = T::of(tau as f64) / nf;
            g.push((T::one() - w) * c(tau) + w * c(self.fine_len - (n - tau)));
        }
        g
    }

    pub(crate) fn evaluate_patterns(
        &self,
        theta: &Parameters<T>,
        indices: &[usize],
        with_gradient: bool,
    ) -> Result<PatternEvaluation<T>> {
        let n = self.scheme.n;
        for &k in indices {
            if k == 0 || k > n / 2 {
                return Err(Error::InvalidSelection(format!(
                    "index {k} is not a positive Fourier index for n={n}"
                )));
            }
        }
        let (values, grads) = self.fine_grid(theta, with_gradient);
        let fields = self.fields(with_gradient);
        let mut results: Vec<Vec<T>> = vec![Vec::new(); fields.len()];
        let inv_m = T::one() / T::of(self.fine_len as f64);

        let mut scratch_inv =
            vec![Complex::new(T::zero(), T::zero()); self.inverse.get_inplace_scratch_len()];
        let mut scratch_fwd =
            vec![Complex::new(T::zero(), T::zero()); self.forward.get_inplace_scratch_len()];
        for (pair_idx, pair) in fields.chunks(2).enumerate() {
            let a = self.field_spectrum(&values, &grads, pair[0]);
            let b = if pair.len() > 1 {
                Some(self.field_spectrum(&values, &grads, pair[1]))
            } else {
                None
            };
            let mut buf: Vec<Complex<T>> = match &b {
                Some(b) => a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| Complex::new(x.re - y.im, x.im + y.re))
                    .collect(),
                None => a,
            };
            self.inverse
                .process_with_scratch(&mut buf, &mut scratch_inv);
            let ga = self.fold(|t| buf[t].re);
            let gb = self.fold(|t| buf[t].im);
            let mut z: Vec<Complex<T>> = ga
                .iter()
                .zip(gb.iter())
                .map(|(&x, &y)| Complex::new(x, y))
                .collect();
            self.forward.process_with_scratch(&mut z, &mut scratch_fwd);
            for (slot, field) in pair.iter().enumerate() {
                let odd = is_odd(field.entry);
                let out: Vec<T> = indices
                    .iter()
                    .map(|&k| {
                        let zk = z[k];
                        let zc = z[(n - k) % n].conj();
                        let half = T::of(0.5);
                        let spec = if slot == 0 {
                            (zk + zc) * half
                        } else {
                            // (Z[k] - conj Z[n-k]) / (2i)
                            let d = (zk - zc) * half;
                            Complex::new(d.im, -d.re)
                        };
                        if odd {
                            spec.im * inv_m
                        } else {
                            spec.re * inv_m
                        }
                    })
                    .collect();
                results[pair_idx * 2 + slot] = out;
            }
        }

        let mut out_values = vec![EntryPattern::zero(); indices.len()];
        let mut out_grads = if with_gradient {
            vec![[EntryPattern::zero(); N_PARAMS]; indices.len()]
        } else {
            Vec::new()
        };
        for (field, series) in fields.iter().zip(results.iter()) {
            for (i, &v) in series.iter().enumerate() {
                let target = match field.source {
                    Source::Value => &mut out_values[i],
                    Source::Grad(p) => &mut out_grads[i][p],
                };
                set_entry(target, field.entry, v);
            }
        }
        for (i, &k) in indices.iter().enumerate() {
            if 2 * k == n {
                out_values[i].xz = T::zero();
                out_values[i].yz = T::zero();
                if with_gradient {
                    for g in out_grads[i].iter_mut() {
                        g.xz = T::zero();
                        g.yz = T::zero();
                    }
                }
            }
        }
        if with_gradient {
            let inv_alpha = T::one() / theta.alpha;
            for (g, v) in out_grads.iter_mut().zip(out_values.iter()) {
                g[0] = v.scaled(inv_alpha);
            }
        }
        Ok(PatternEvaluation {
            values: out_values,
            gradients: out_grads,
        })
    }

    fn check_selection(&self, selection: &FrequencySelection) -> Result<()> {
        if selection.n() != self.scheme.n {
            return Err(Error::InvalidSelection(format!(
                "selection built for n={} but the sampling scheme has n={}",
                selection.n(),
                self.scheme.n
            )));
        }
        Ok(())
    }

    pub fn evaluate(
        &self,
        theta: &Parameters<T>,
        selection: &FrequencySelection,
    ) -> Result<ExpectedPeriodogram<T>> {
        self.check_selection(selection)?;
        let abs: Vec<usize> = selection
            .indices()
            .iter()
            .map(|j| j.unsigned_abs())
            .collect();
        let eval = self.evaluate_patterns(theta, &abs, false)?;
        let values = selection
            .indices()
            .iter()
            .zip(eval.values.iter())
            .map(|(&j, p)| p.to_matrix(j < 0))
            .collect();
        Ok(ExpectedPeriodogram {
            indices: selection.indices().to_vec(),
            values,
        })
    }

    pub fn evaluate_with_gradient(
        &self,
        theta: &Parameters<T>,
        selection: &FrequencySelection,
    ) -> Result<(ExpectedPeriodogram<T>, Vec<[SpectralMatrix<T>; N_PARAMS]>)> {
        self.check_selection(selection)?;
        let abs: Vec<usize> = selection
            .indices()
            .iter()
            .map(|j| j.unsigned_abs())
            .collect();
        let eval = self.evaluate_patterns(theta, &abs, true)?;
        let mut values = Vec::with_capacity(abs.len());
        let mut grads = Vec::with_capacity(abs.len());
        for (i, &j) in selection.indices().iter().enumerate() {
            values.push(eval.values[i].to_matrix(j < 0));
            grads.push(eval.gradients[i].map(|g| g.to_matrix(j < 0)));
        }
        Ok((
            ExpectedPeriodogram {
                indices: selection.indices().to_vec(),
                values,
            },
            grads,
        ))
    }

    /// Autocovariance at lags 0..=max_lag and their negatives, with a check
    /// that the inverse transform is real.
    pub fn autocovariance(
        &self,
        theta: &Parameters<T>,
        max_lag: usize,
    ) -> Result<Vec<[[T; 3]; 3]>> {
        if max_lag >= self.fine_len / 2 {
            return Err(Error::InvalidSettings(format!(
                "lag {max_lag} not representable on a grid of {}",
                self.fine_len
            )));
        }
        let (values, grads) = self.fine_grid(theta, false);
        let scale = self.period() / T::of(self.fine_len as f64);
        let mut per_entry: Vec<Vec<T>> = Vec::with_capacity(6);
        let mut scratch =
            vec![Complex::new(T::zero(), T::zero()); self.inverse.get_inplace_scratch_len()];
        let mut worst_im = T::zero();
        let mut worst_re = T::zero();
        for entry in 0..6 {
            let mut buf = self.field_spectrum(
                &values,
                &grads,
                Field {
                    source: Source::Value,
                    entry,
                },
            );
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            for c in &buf {
                worst_im = worst_im.max(c.im.abs());
                worst_re = worst_re.max(c.re.abs());
            }
            per_entry.push(buf.iter().map(|c| c.re * scale).collect());
        }
        if worst_im > T::of(1e-10) * worst_re.max(T::min_positive_value()) {
            return Err(Error::NumericalConsistency(format!(
                "imaginary autocovariance residue {worst_im} relative to {worst_re}"
            )));
        }
        let m_len = self.fine_len;
        let idx = |tau: isize| -> usize {
            if tau >= 0 {
                tau as usize
            } else {
                m_len - tau.unsigned_abs()
            }
        };
        let lag = |tau: isize| -> [[T; 3]; 3] {
            let e = |entry: usize, t: isize| per_entry[entry][idx(t)];
            [
                [e(0, tau), e(1, -tau), e(2, -tau)],
                [e(1, tau), e(3, tau), e(5, tau)],
                [e(2, tau), e(5, tau), e(4, tau)],
            ]
        };
        let ml = max_lag as isize;
        Ok((-ml..=ml).map(lag).collect())
    }
}

#[inline]
fn accumulate<T: Real>(acc: &mut EntryPattern<T>, p: &EntryPattern<T>, sign: T) {
    acc.zz = acc.zz + p.zz;
    acc.xz = acc.xz + sign * p.xz;
    acc.yz = acc.yz + sign * p.yz;
    acc.xx = acc.xx + p.xx;
    acc.yy = acc.yy + p.yy;
    acc.xy = acc.xy + p.xy;
}

#[inline]
fn set_entry<T: Real>(p: &mut EntryPattern<T>, entry: usize, v: T) {
    match entry {
        0 => p.zz = v,
        1 => p.xz = v,
        2 => p.yz = v,
        3 => p.xx = v,
        4 => p.yy = v,
        _ => p.xy = v,
    }
}

/// Autocovariance c(τΔ; θ) for |τ| < n from an inverse FFT of the aliased
/// model on a grid of 4n frequencies over (-π/Δ, π/Δ].
pub fn approx_autocovariance<T: Real>(
    theta: &Parameters<T>,
    ctx: &PhysicalContext<T>,
    scheme: &SamplingScheme<T>,
) -> Result<CovarianceSequence<T>> {
    let plan = ExpectedPeriodogramPlan::new(*ctx, *scheme, ChannelSet::Full)?;
    let lags = plan.autocovariance(theta, scheme.n - 1)?;
    CovarianceSequence::from_lags(scheme.n, lags)
}

/// E[I_n(ω); θ] at the selected Fourier frequencies.
pub fn expected_periodogram<T: Real>(
    theta: &Parameters<T>,
    ctx: &PhysicalContext<T>,
    scheme: &SamplingScheme<T>,
    selection: &FrequencySelection,
) -> Result<ExpectedPeriodogram<T>> {
    ExpectedPeriodogramPlan::new(*ctx, *scheme, ChannelSet::Full)?.evaluate(theta, selection)
}

/// ∂E[I_n(ω); θ]/∂θ_j at the selected frequencies, nine matrices per frequency.
pub fn expected_periodogram_gradient<T: Real>(
    theta: &Parameters<T>,
    ctx: &PhysicalContext<T>,
    scheme: &SamplingScheme<T>,
    selection: &FrequencySelection,
) -> Result<Vec<[SpectralMatrix<T>; N_PARAMS]>> {
    let plan = ExpectedPeriodogramPlan::new(*ctx, *scheme, ChannelSet::Full)?;
    Ok(plan.evaluate_with_gradient(theta, selection)?.1)
}
