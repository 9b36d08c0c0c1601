//! Uniform periodic discretizations of the transverse coordinate and momentum.

use crate::error::{Error, Result};
use crate::num::Real;

/// Uniform periodic axis with `n` points spanning `length` around `center`.
///
/// Points sit at `center - length/2 + k * spacing` for `k` in `0..n`; the
/// point at `center + length/2` is identified with the first one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGrid<T> {
    n: usize,
    length: T,
    center: T,
}

impl<T: Real> AxisGrid<T> {
    pub fn new(n: usize, length: T, center: T) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidPointCount { n });
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::NonPositiveLength {
                length: length.to_f64_lossy(),
            });
        }
        if !center.is_finite() {
            return Err(Error::NonFinite { what: "axis center" });
        }
        Ok(Self { n, length, center })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn spacing(&self) -> T {
        self.length / T::lit(self.n as f64)
    }

    /// First grid point, `center - length/2`.
    pub fn start(&self) -> T {
        self.center - self.length / T::lit(2.0)
    }

    pub fn point(&self, k: usize) -> T {
        self.start() + T::lit(k as f64) * self.spacing()
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    /// Spacing of the conjugate (spectral) axis, `2 pi / length`.
    pub fn spectral_spacing(&self) -> T {
        T::TAU() / self.length
    }

    /// Conjugate wavenumbers in FFT order: `0, 1, .., n/2-1, -n/2, .., -1` times
    /// the spectral spacing. Index `n/2` is the Nyquist bin.
    pub fn wavenumbers(&self) -> Vec<T> {
        let dk = self.spectral_spacing();
        (0..self.n)
            .map(|j| T::lit(signed_index(j, self.n) as f64) * dk)
            .collect()
    }

    /// Largest representable conjugate wavenumber magnitude, `pi / spacing`.
    pub fn nyquist(&self) -> T {
        T::PI() / self.spacing()
    }

    /// Midpoint-rule integral of sampled values.
    pub fn integrate(&self, values: &[T]) -> T {
        values.iter().copied().sum::<T>() * self.spacing()
    }
}

/// Maps an FFT bin index to its signed frequency index.
pub(crate) fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Phase-space grid: transverse coordinate `x` (length) times slope `p` (dimensionless).
///
/// Sampled fields are stored row-major with `x` as the row index, so the value
/// at `(i, j)` lives at `i * p.len() + j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid<T> {
    pub x: AxisGrid<T>,
    pub p: AxisGrid<T>,
}

impl<T: Real> PhaseGrid<T> {
    pub fn new(x: AxisGrid<T>, p: AxisGrid<T>) -> Self {
        Self { x, p }
    }

    pub fn cells(&self) -> usize {
        self.x.len() * self.p.len()
    }

    pub fn cell_area(&self) -> T {
        self.x.spacing() * self.p.spacing()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.p.len() + j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_point_axis() {
        let g = AxisGrid::new(8, 8.0, 0.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.points(), vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn offset_axis() {
        let g = AxisGrid::new(16, 1.0, 0.5).unwrap();
        assert_eq!(g.spacing(), 0.0625);
        assert_eq!(g.point(0), 0.0);
    }

    #[test]
    fn rejects_bad_counts_and_lengths() {
        assert_eq!(
            AxisGrid::new(12, 1.0, 0.0),
            Err(Error::InvalidPointCount { n: 12 })
        );
        assert!(matches!(
            AxisGrid::new(4, 1.0, 0.0),
            Err(Error::InvalidPointCount { .. })
        ));
        assert!(matches!(
            AxisGrid::new(8, 0.0, 0.0),
            Err(Error::NonPositiveLength { .. })
        ));
        assert!(matches!(
            AxisGrid::new(8, -1.0f32, 0.0),
            Err(Error::NonPositiveLength { .. })
        ));
    }

    #[test]
    fn wavenumbers_in_fft_order() {
        let g = AxisGrid::new(8, std::f64::consts::TAU, 0.0).unwrap();
        assert_eq!(
            g.wavenumbers(),
            vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]
        );
        assert!((g.nyquist() - 4.0).abs() < 1e-12);
    }
}
