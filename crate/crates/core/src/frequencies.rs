//! Fourier frequencies and the subset Ω entering a likelihood.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Signed Fourier-frequency index range {-⌈n/2⌉+1, …, ⌊n/2⌋}.
pub fn fourier_index_range(n: usize) -> (isize, isize) {
    let lo = -(n.div_ceil(2) as isize) + 1;
    let hi = (n / 2) as isize;
    (lo, hi)
}

/// Angular Fourier frequency 2πj/(nΔ).
pub fn fourier_omega(j: isize, n: usize, delta: f64) -> f64 {
    2.0 * PI * j as f64 / (n as f64 * delta)
}

/// A set Ω of Fourier frequencies.
///
/// Each stored index j stands for the conjugate pair {j, -j}: its
/// contribution to a likelihood is counted twice, except at the Nyquist
/// index which has no distinct partner. The zero frequency is never
/// included.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySelection {
    n: usize,
    delta: f64,
    low_cut: f64,
    high_cut: f64,
    indices: Vec<isize>,
}

impl FrequencySelection {
    /// All positive Fourier frequencies with ω in [low_cut, high_cut].
    pub fn band(n: usize, delta: f64, low_cut: f64, high_cut: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSelection(format!("need n >= 2, got {n}")));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidSelection(format!(
                "delta must be > 0, got {delta}"
            )));
        }
        if !(low_cut < high_cut) || !low_cut.is_finite() || high_cut.is_nan() {
            return Err(Error::InvalidSelection(format!(
                "low cut {low_cut} must be finite and below high cut {high_cut}"
            )));
        }
        let (_, hi) = fourier_index_range(n);
        let indices: Vec<isize> = (1..=hi)
            .filter(|&j| {
                let w = fourier_omega(j, n, delta);
                w >= low_cut && w <= high_cut
            })
            .collect();
        if indices.is_empty() {
            return Err(Error::InvalidSelection(format!(
                "no Fourier frequency of n={n}, delta={delta} lies in [{low_cut}, {high_cut}]"
            )));
        }
        Ok(Self {
            n,
            delta,
            low_cut,
            high_cut,
            indices,
        })
    }

    /// Every positive Fourier frequency up to and including Nyquist.
    pub fn positive(n: usize, delta: f64) -> Result<Self> {
        Self::band(n, delta, 0.0, f64::INFINITY).map(|mut s| {
            s.low_cut = fourier_omega(1, n, delta);
            s.high_cut = PI / delta;
            s
        })
    }

    /// Explicit signed indices; each must be non-zero, inside Ω_n, and not
    /// accompanied by its own negative.
    pub fn from_indices(n: usize, delta: f64, mut indices: Vec<isize>) -> Result<Self> {
        if n < 2 || !(delta > 0.0) {
            return Err(Error::InvalidSelection("need n >= 2 and delta > 0".into()));
        }
        let (lo, hi) = fourier_index_range(n);
        indices.sort_unstable_by_key(|j| (j.unsigned_abs(), *j));
        for w in indices.windows(2) {
            if w[0].unsigned_abs() == w[1].unsigned_abs() {
                return Err(Error::InvalidSelection(format!(
                    "index {} appears twice (directly or as its conjugate)",
                    w[1]
                )));
            }
        }
        for &j in &indices {
            if j == 0 {
                return Err(Error::InvalidSelection(
                    "the zero frequency cannot be selected".into(),
                ));
            }
            if j < lo || j > hi {
                return Err(Error::InvalidSelection(format!(
                    "index {j} outside [{lo}, {hi}]"
                )));
            }
        }
        if indices.is_empty() {
            return Err(Error::InvalidSelection("empty selection".into()));
        }
        let omegas: Vec<f64> = indices
            .iter()
            .map(|&j| fourier_omega(j.abs(), n, delta))
            .collect();
        let low_cut = omegas.iter().cloned().fold(f64::INFINITY, f64::min);
        let high_cut = omegas.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            n,
            delta,
            low_cut,
            high_cut,
            indices,
        })
    }

    /// Same frequencies with every index replaced by its conjugate partner.
    /// The Nyquist index has no partner inside Ω_n and is kept.
    pub fn negated(&self) -> Self {
        let nyq = self.nyquist_index();
        let indices = self
            .indices
            .iter()
            .map(|&j| if Some(j.abs()) == nyq { j } else { -j })
            .collect();
        Self {
            indices,
            ..self.clone()
        }
    }

    /// Likelihood weight of index `j`: 2 for a conjugate pair, 1 at Nyquist.
    pub fn weight(&self, j: isize) -> f64 {
        if Some(j.abs()) == self.nyquist_index() {
            1.0
        } else {
            2.0
        }
    }

    fn nyquist_index(&self) -> Option<isize> {
        (self.n % 2 == 0).then_some((self.n / 2) as isize)
    }

    pub fn omega(&self, j: isize) -> f64 {
        fourier_omega(j, self.n, self.delta)
    }

    pub fn indices(&self) -> &[isize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn low_cut(&self) -> f64 {
        self.low_cut
    }

    pub fn high_cut(&self) -> f64 {
        self.high_cut
    }

    /// Total weight, i.e. the number of signed frequencies represented.
    pub fn total_weight(&self) -> f64 {
        self.indices.iter().map(|&j| self.weight(j)).sum()
    }
}
