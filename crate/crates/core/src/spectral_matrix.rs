//! Small dense 3×3 complex matrices indexed by the channels (z, x, y).

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Displacement channel of a buoy record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Vertical displacement (heave).
    Z = 0,
    /// Northwards displacement.
    X = 1,
    /// Eastwards displacement.
    Y = 2,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Z, Channel::X, Channel::Y];
}

/// Value of a 3×3 spectral density matrix at one frequency, in m² s/rad.
///
/// Rows and columns are ordered (z, x, y). Model-generated values are
/// Hermitian and non-negative definite; the type itself does not enforce it
/// so that gradients and intermediate products can reuse it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMatrix<T> {
    pub entries: [[Complex<T>; 3]; 3],
}

impl<T: Real> Default for SpectralMatrix<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> SpectralMatrix<T> {
    pub fn zero() -> Self {
        Self {
            entries: [[Complex::new(T::zero(), T::zero()); 3]; 3],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.entries[i][i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_entries(entries: [[Complex<T>; 3]; 3]) -> Self {
        Self { entries }
    }

    /// Rank-one matrix `v v^H`.
    pub fn outer(v: &[Complex<T>; 3]) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.entries[i][j] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, row: Channel, col: Channel) -> Complex<T> {
        self.entries[row as usize][col as usize]
    }

    pub fn scale(&self, s: T) -> Self {
        let mut m = *self;
        for row in m.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = *e * s;
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = e.conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.entries[i][j] = self.entries[j][i];
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    /// `(A + A^H) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::of(0.5);
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.entries[i][j] = (self.entries[i][j] + self.entries[j][i].conj()) * half;
            }
        }
        m
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    pub fn determinant(&self) -> Complex<T> {
        let a = &self.entries;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    fn adjugate(&self) -> Self {
        let a = &self.entries;
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
            a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
        };
        Self {
            entries: [
                [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
                [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
                [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
            ],
        }
    }

    /// Inverse through the adjugate. Returns `None` when `|det| <= floor`.
    pub fn inverse_with_floor(&self, floor: T) -> Option<(Self, Complex<T>)> {
        let det = self.determinant();
        if !(det.norm() > floor) {
            return None;
        }
        let inv_det = det.inv();
        let adj = self.adjugate();
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.entries[i][j] = adj.entries[i][j] * inv_det;
            }
        }
        Some((m, det))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.inverse_with_floor(T::zero()).map(|(m, _)| m)
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..3 {
            for k in 0..3 {
                acc = acc + self.entries[i][k] * other.entries[k][i];
            }
        }
        acc
    }

    /// Largest entrywise modulus of `A - A^H`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let d = (self.entries[i][j] - self.entries[j][i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        let mut worst = T::zero();
        for row in &self.entries {
            for e in row {
                worst = worst.max(e.norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }
}

impl<T> Index<(usize, usize)> for SpectralMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.entries[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for SpectralMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.entries[i][j]
    }
}

impl<T: Real> Add for SpectralMatrix<T> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Real> AddAssign for SpectralMatrix<T> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.entries[i][j] = self.entries[i][j] + rhs.entries[i][j];
            }
        }
    }
}

impl<T: Real> Sub for SpectralMatrix<T> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.entries[i][j] = self.entries[i][j] - rhs.entries[i][j];
            }
        }
        self
    }
}

impl<T: Real> Mul for SpectralMatrix<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..3 {
                    acc = acc + self.entries[i][k] * rhs.entries[k][j];
                }
                m.entries[i][j] = acc;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SpectralMatrix<f64> {
        let c = Complex::new;
        SpectralMatrix::from_entries([
            [c(2.0, 0.0), c(0.1, -0.4), c(-0.2, 0.3)],
            [c(0.1, 0.4), c(1.5, 0.0), c(0.25, 0.05)],
            [c(-0.2, -0.3), c(0.25, -0.05), c(1.1, 0.0)],
        ])
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = sample();
        let inv = a.inverse().unwrap();
        let prod = a * inv;
        let diff = prod - SpectralMatrix::identity();
        assert!(diff.max_abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_rejected_by_floor() {
        let v = [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.5, 0.0),
        ];
        let rank_one = SpectralMatrix::outer(&v);
        assert!(
            rank_one.inverse_with_floor(1e-300).is_none() || rank_one.determinant().norm() < 1e-15
        );
        assert!(rank_one.hermitian_defect() == 0.0);
    }

    #[test]
    fn trace_of_product_matches_product_trace() {
        let a = sample();
        let b = sample().scale(0.3) * sample();
        let t1 = a.trace_of_product(&b);
        let t2 = (a * b).trace();
        assert!((t1 - t2).norm() < 1e-14);
    }
}
