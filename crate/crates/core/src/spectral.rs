//! FFT plumbing: cached plans, batched row transforms and transposes.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::num::Real;

/// Forward/inverse plan pair for one transform length, with its own scratch.
pub(crate) struct Plan<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> Plan<T> {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    /// Unnormalized forward transform (`exp(-2 pi i jk/n)`) of every
    /// consecutive length-`n` row in `buf`.
    pub(crate) fn forward(&mut self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len() % self.n, 0);
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Inverse transform of every row, including the `1/n` factor.
    pub(crate) fn inverse(&mut self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len() % self.n, 0);
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        let scale = T::one() / T::lit(self.n as f64);
        for v in buf.iter_mut() {
            *v = *v * scale;
        }
    }
}

/// Writes the transpose of the `rows x cols` row-major `src` into `dst`.
pub(crate) fn transpose<V: Copy>(src: &[V], rows: usize, cols: usize, dst: &mut [V]) {
    debug_assert_eq!(src.len(), rows * cols);
    debug_assert_eq!(dst.len(), rows * cols);
    const BLOCK: usize = 32;
    for rb in (0..rows).step_by(BLOCK) {
        for cb in (0..cols).step_by(BLOCK) {
            for r in rb..(rb + BLOCK).min(rows) {
                for c in cb..(cb + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Multiplier for the Nyquist bin of a real-preserving spectral operator.
///
/// An odd phase `phi(-k) = -phi(k)` has no partner for the lone Nyquist bin;
/// averaging the two branches gives `cos(phi)`, which keeps real data real.
#[inline]
pub(crate) fn nyquist_multiplier<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_round_trip() {
        let src: Vec<usize> = (0..6 * 40).collect();
        let mut t = vec![0; src.len()];
        let mut back = vec![0; src.len()];
        transpose(&src, 6, 40, &mut t);
        assert_eq!(t[1], 40);
        transpose(&t, 40, 6, &mut back);
        assert_eq!(src, back);
    }

    #[test]
    fn batched_round_trip() {
        let mut plan = Plan::<f64>::new(8);
        let orig: Vec<Complex<f64>> = (0..24)
            .map(|k| Complex::new(k as f64, -(k as f64) * 0.5))
            .collect();
        let mut buf = orig.clone();
        plan.forward(&mut buf);
        assert!((buf[0].re - (0..8).sum::<usize>() as f64).abs() < 1e-12);
        plan.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
