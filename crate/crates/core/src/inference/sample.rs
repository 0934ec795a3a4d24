use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sea state: simultaneous heave, northward and eastward displacement
/// records (m) sampled every `delta` seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeaStateSample {
    channels: Vec<[f64; 3]>,
    delta: f64,
    start_time: Option<String>,
    mean_removed: bool,
}

impl SeaStateSample {
    /// Rows are `[z, x, y]`. Rejects non-finite values and any channel that
    /// is constant over the window.
    pub fn new(channels: Vec<[f64; 3]>, delta: f64, start_time: Option<String>) -> Result<Self> {
        if channels.len() < 2 {
            return Err(Error::InvalidSample(format!(
                "need at least 2 samples, got {}",
                channels.len()
            )));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidSample(format!(
                "sampling interval must be > 0, got {delta}"
            )));
        }
        if let Some(row) = channels
            .iter()
            .position(|r| r.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidSample(format!(
                "non-finite value at sample {row}"
            )));
        }
        for (c, name) in ["z", "x", "y"].iter().enumerate() {
            let first = channels[0][c];
            if channels.iter().all(|r| r[c] == first) {
                return Err(Error::InvalidSample(format!("channel {name} is constant")));
            }
        }
        Ok(Self {
            channels,
            delta,
            start_time,
            mean_removed: false,
        })
    }

    pub fn from_columns(z: &[f64], x: &[f64], y: &[f64], delta: f64) -> Result<Self> {
        if z.len() != x.len() || z.len() != y.len() {
            return Err(Error::InvalidSample(format!(
                "channel lengths differ: {}, {}, {}",
                z.len(),
                x.len(),
                y.len()
            )));
        }
        let rows = z
            .iter()
            .zip(x)
            .zip(y)
            .map(|((&a, &b), &c)| [a, b, c])
            .collect();
        Self::new(rows, delta, None)
    }

    /// Copy with every channel mean subtracted.
    pub fn demeaned(&self) -> Self {
        let mut out = self.clone();
        out.remove_mean();
        out
    }

    pub fn remove_mean(&mut self) {
        if self.mean_removed {
            return;
        }
        let means = self.means();
        for row in self.channels.iter_mut() {
            for c in 0..3 {
                row[c] -= means[c];
            }
        }
        self.mean_removed = true;
    }

    pub fn means(&self) -> [f64; 3] {
        let n = self.channels.len() as f64;
        let mut m = [0.0; 3];
        for row in &self.channels {
            for c in 0..3 {
                m[c] += row[c];
            }
        }
        m.map(|v| v / n)
    }

    pub fn with_start_time(mut self, start: impl Into<String>) -> Self {
        self.start_time = Some(start.into());
        self
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.channels
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.channels.iter().map(|r| r[c]).collect()
    }

    pub fn start_time(&self) -> Option<&str> {
        self.start_time.as_deref()
    }

    pub fn is_mean_removed(&self) -> bool {
        self.mean_removed
    }

    /// Sample covariance at lag zero, normalised by n.
    pub fn second_moments(&self) -> [[f64; 3]; 3] {
        let n = self.channels.len() as f64;
        let mut s = [[0.0; 3]; 3];
        for row in &self.channels {
            for i in 0..3 {
                for j in 0..3 {
                    s[i][j] += row[i] * row[j];
                }
            }
        }
        s.map(|r| r.map(|v| v / n))
    }

    /// Significant wave height 4·sqrt(var z).
    pub fn significant_wave_height(&self) -> f64 {
        let z = self.channel(0);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        4.0 * var.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_channel_rejected() {
        let rows = vec![[1.0, 0.0, 2.0], [2.0, 0.0, 1.0], [0.5, 0.0, 3.0]];
        assert!(matches!(
            SeaStateSample::new(rows, 1.0, None),
            Err(Error::InvalidSample(_))
        ));
    }

    #[test]
    fn demeaning_is_flagged_and_idempotent() {
        let rows = vec![[1.0, 2.0, 3.0], [3.0, 1.0, 0.0], [2.0, 0.0, 3.0]];
        let s = SeaStateSample::new(rows, 0.5, None).unwrap();
        assert!(!s.is_mean_removed());
        let d = s.demeaned();
        assert!(d.is_mean_removed());
        assert!(d.means().iter().all(|m| m.abs() < 1e-15));
        assert_eq!(d.demeaned(), d);
    }

    #[test]
    fn sinusoid_wave_height() {
        let n = 1000;
        let a = 1.5;
        let z: Vec<f64> = (0..n)
            .map(|t| a * (2.0 * std::f64::consts::PI * 10.0 * t as f64 / n as f64).sin())
            .collect();
        let x: Vec<f64> = (0..n).map(|t| (t as f64).cos()).collect();
        let s = SeaStateSample::from_columns(&z, &x, &x, 1.0).unwrap();
        assert!((s.significant_wave_height() - 4.0 * a / 2f64.sqrt()).abs() < 1e-12);
    }
}
