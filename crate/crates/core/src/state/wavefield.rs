use num_complex::Complex;

use super::BOUNDARY_DECAY;
use crate::error::{Error, Result};
use crate::grid::AxisGrid;
use crate::num::Real;

/// Complex beam wavefunction `psi(x)` at a fixed propagation coordinate.
///
/// The emittance `epsilon` plays the part of Planck's constant in every
/// operation that touches the field; no other quantum scale exists.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField<T> {
    pub grid: AxisGrid<T>,
    pub values: Vec<Complex<T>>,
    pub epsilon: T,
    pub z: T,
}

impl<T: Real> WaveField<T> {
    pub fn new(grid: AxisGrid<T>, values: Vec<Complex<T>>, epsilon: T, z: T) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                what: "wavefield sample count",
            });
        }
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::NonPositive {
                what: "epsilon",
                value: epsilon.to_f64_lossy(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { what: "wavefield" });
        }
        Ok(Self {
            grid,
            values,
            epsilon,
            z,
        })
    }

    /// `|psi|^2` at each grid point.
    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `integral |psi|^2 dx`.
    pub fn norm_sqr(&self) -> T {
        self.grid.integrate(&self.density())
    }

    /// Rescales in place so that `norm_sqr() == 1`.
    pub fn normalize(&mut self) {
        let s = T::one() / self.norm_sqr().sqrt();
        for v in &mut self.values {
            *v = *v * s;
        }
    }
}

fn boundary_ratio<T: Real>(grid: &AxisGrid<T>, center: T, sigma_x: T) -> T {
    let lo = grid.start();
    let hi = lo + grid.length();
    if center < lo || center >= hi {
        return T::one();
    }
    let d = (center - lo).min(hi - center);
    (-(d * d) / (T::lit(4.0) * sigma_x * sigma_x)).exp()
}

fn check_width<T: Real>(sigma_x: T, epsilon: T) -> Result<()> {
    if !(sigma_x > T::zero()) || !sigma_x.is_finite() {
        return Err(Error::NonPositive {
            what: "sigma_x",
            value: sigma_x.to_f64_lossy(),
        });
    }
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::NonPositive {
            what: "epsilon",
            value: epsilon.to_f64_lossy(),
        });
    }
    Ok(())
}

fn coherent_amplitude<T: Real>(x: T, center: T, sigma_x: T, p0: T, epsilon: T) -> Complex<T> {
    let d = x - center;
    let envelope = (-(d * d) / (T::lit(4.0) * sigma_x * sigma_x)).exp();
    Complex::from_polar(envelope, p0 * d / epsilon)
}

/// Coherent Gaussian `psi ~ exp(-(x-x0)^2/(4 sigma_x^2) + i p0 (x-x0)/epsilon)`,
/// normalized on the grid. `|psi|^2` has mean `x0` and rms width `sigma_x`;
/// the momentum spread is `epsilon / (2 sigma_x)`.
pub fn gaussian_wavefield<T: Real>(
    grid: AxisGrid<T>,
    sigma_x: T,
    x0: T,
    p0: T,
    epsilon: T,
) -> Result<WaveField<T>> {
    check_width(sigma_x, epsilon)?;
    let ratio = boundary_ratio(&grid, x0, sigma_x);
    if ratio > T::lit(BOUNDARY_DECAY) {
        return Err(Error::GridTooNarrow {
            ratio: ratio.to_f64_lossy(),
        });
    }
    let values = grid
        .points()
        .into_iter()
        .map(|x| coherent_amplitude(x, x0, sigma_x, p0, epsilon))
        .collect();
    let mut psi = WaveField::new(grid, values, epsilon, T::zero())?;
    psi.normalize();
    Ok(psi)
}

/// Coherent superposition of two Gaussians of width `sigma_x` centred at
/// `x0 -/+ separation/2`, sharing mean slope `p0`.
pub fn superposition_wavefield<T: Real>(
    grid: AxisGrid<T>,
    sigma_x: T,
    x0: T,
    p0: T,
    separation: T,
    epsilon: T,
) -> Result<WaveField<T>> {
    check_width(sigma_x, epsilon)?;
    let half = separation / T::lit(2.0);
    let (left, right) = (x0 - half, x0 + half);
    let ratio = boundary_ratio(&grid, left, sigma_x).max(boundary_ratio(&grid, right, sigma_x));
    if ratio > T::lit(BOUNDARY_DECAY) {
        return Err(Error::GridTooNarrow {
            ratio: ratio.to_f64_lossy(),
        });
    }
    let values = grid
        .points()
        .into_iter()
        .map(|x| {
            let phase = Complex::from_polar(T::one(), p0 * (x - x0) / epsilon);
            let a = coherent_amplitude(x, left, sigma_x, T::zero(), epsilon);
            let b = coherent_amplitude(x, right, sigma_x, T::zero(), epsilon);
            (a + b) * phase
        })
        .collect();
    let mut psi = WaveField::new(grid, values, epsilon, T::zero())?;
    psi.normalize();
    Ok(psi)
}
