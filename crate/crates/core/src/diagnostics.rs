//! Beam moments, emittance, uncertainty products, Wigner negativity and the
//! semiclassical truncation ratio.

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::potential::{MoyalKernel, PotentialSpec};
use crate::spectral::Plan;
use crate::state::{QuasiDistribution, RayEnsemble, WaveField, NORMALIZATION_TOL};

/// First and second central moments of a beam at one `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamMoments<T> {
    pub z: T,
    pub mean_x: T,
    pub mean_p: T,
    pub sigma_x: T,
    pub sigma_p: T,
    pub sigma_xp: T,
    pub emittance_rms: T,
}

impl<T: Real> BeamMoments<T> {
    /// Builds moments from means and central second moments; the emittance
    /// radicand is clamped at zero.
    pub fn from_central(z: T, mean_x: T, mean_p: T, var_x: T, var_p: T, cov_xp: T) -> Self {
        let var_x = var_x.max(T::zero());
        let var_p = var_p.max(T::zero());
        let radicand = (var_x * var_p - cov_xp * cov_xp).max(T::zero());
        Self {
            z,
            mean_x,
            mean_p,
            sigma_x: var_x.sqrt(),
            sigma_p: var_p.sqrt(),
            sigma_xp: cov_xp,
            emittance_rms: T::lit(2.0) * radicand.sqrt(),
        }
    }

    pub fn uncertainty_product(&self) -> T {
        self.sigma_x * self.sigma_p
    }
}

/// Anything moments can be measured on.
pub trait Moments<T> {
    fn moments(&self) -> Result<BeamMoments<T>>;
}

pub fn moments_of<T: Real, S: Moments<T> + ?Sized>(state: &S) -> Result<BeamMoments<T>> {
    state.moments()
}

fn check_mass<T: Real>(mass: T) -> Result<()> {
    if !(Float::abs(mass - T::one()) <= T::roundoff_floor(NORMALIZATION_TOL)) {
        return Err(Error::NotNormalized {
            mass: mass.to_f64_lossy(),
        });
    }
    Ok(())
}

fn weighted_mean_var<T: Real>(points: &[T], weights: &[T], total: T) -> (T, T) {
    let mean = points
        .iter()
        .zip(weights)
        .map(|(x, w)| *x * *w)
        .sum::<T>()
        / total;
    let var = points
        .iter()
        .zip(weights)
        .map(|(x, w)| (*x - mean) * (*x - mean) * *w)
        .sum::<T>()
        / total;
    (mean, var)
}

impl<T: Real> Moments<T> for QuasiDistribution<T> {
    fn moments(&self) -> Result<BeamMoments<T>> {
        let mass = self.mass();
        check_mass(mass)?;
        let total = mass / self.grid.cell_area();
        let xs = self.grid.x.points();
        let ps = self.grid.p.points();
        let row_sums: Vec<T> = self
            .values
            .chunks(ps.len())
            .map(|r| r.iter().copied().sum())
            .collect();
        let mut col_sums = vec![T::zero(); ps.len()];
        for row in self.values.chunks(ps.len()) {
            for (c, v) in col_sums.iter_mut().zip(row) {
                *c = *c + *v;
            }
        }
        let (mx, vx) = weighted_mean_var(&xs, &row_sums, total);
        let (mp, vp) = weighted_mean_var(&ps, &col_sums, total);
        let mut cov = T::zero();
        for (row, x) in self.values.chunks(ps.len()).zip(&xs) {
            let dx = *x - mx;
            let inner: T = row.iter().zip(&ps).map(|(v, p)| *v * (*p - mp)).sum();
            cov = cov + dx * inner;
        }
        Ok(BeamMoments::from_central(self.z, mx, mp, vx, vp, cov / total))
    }
}

impl<T: Real> Moments<T> for WaveField<T> {
    /// Position moments from `|psi|^2`, momentum moments from the spectrum with
    /// `p = epsilon k`, and the correlation from the probability current
    /// `j = epsilon Im(psi* dpsi/dx)`.
    fn moments(&self) -> Result<BeamMoments<T>> {
        let mass = self.norm_sqr();
        check_mass(mass)?;
        let n = self.grid.len();
        let dx = self.grid.spacing();
        let eps = self.epsilon;
        let xs = self.grid.points();
        let density = self.density();
        let total = mass / dx;
        let (mx, vx) = weighted_mean_var(&xs, &density, total);

        let mut spec = self.values.clone();
        let mut plan = Plan::new(n);
        plan.forward(&mut spec);
        let ks = self.grid.wavenumbers();
        let power: T = spec.iter().map(|c| c.norm_sqr()).sum();
        let k_first: Vec<T> = ks
            .iter()
            .enumerate()
            .map(|(j, k)| if j == n / 2 { T::zero() } else { *k })
            .collect();
        let mp = eps
            * spec
                .iter()
                .zip(&k_first)
                .map(|(c, k)| *k * c.norm_sqr())
                .sum::<T>()
            / power;
        let p2 = eps * eps * spec
            .iter()
            .zip(&ks)
            .map(|(c, k)| *k * *k * c.norm_sqr())
            .sum::<T>()
            / power;
        let vp = p2 - mp * mp;

        let mut deriv: Vec<Complex<T>> = spec
            .iter()
            .zip(&k_first)
            .map(|(c, k)| *c * Complex::new(T::zero(), *k))
            .collect();
        plan.inverse(&mut deriv);
        let xj: T = self
            .values
            .iter()
            .zip(&deriv)
            .zip(&xs)
            .map(|((psi, d), x)| (*x - mx) * eps * (psi.conj() * *d).im)
            .sum();
        let cov = xj / total;
        Ok(BeamMoments::from_central(self.z, mx, mp, vx, vp, cov))
    }
}

impl<T: Real> Moments<T> for RayEnsemble<T> {
    /// Exact sums over rays that are not flagged.
    fn moments(&self) -> Result<BeamMoments<T>> {
        let live: Vec<usize> = (0..self.len()).filter(|&i| !self.flagged[i]).collect();
        if live.len() < 2 {
            return Err(Error::TooFewRays {
                required: 2,
                found: live.len(),
            });
        }
        let nf = T::lit(live.len() as f64);
        let mx = live.iter().map(|&i| self.x[i]).sum::<T>() / nf;
        let mp = live.iter().map(|&i| self.p[i]).sum::<T>() / nf;
        let (mut vx, mut vp, mut cxp) = (T::zero(), T::zero(), T::zero());
        for &i in &live {
            let dx = self.x[i] - mx;
            let dp = self.p[i] - mp;
            vx = vx + dx * dx;
            vp = vp + dp * dp;
            cxp = cxp + dx * dp;
        }
        Ok(BeamMoments::from_central(
            self.z,
            mx,
            mp,
            vx / nf,
            vp / nf,
            cxp / nf,
        ))
    }
}

/// Emittance implied by a thermal spread: `epsilon = 2 (v_th/c) sigma0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEmittance<T> {
    pub epsilon: T,
    /// `epsilon / (2 sigma0)`, numerically equal to `v_th / c`.
    pub eta: T,
    /// Set when `v_th / c > 0.1`, outside the paraxial regime.
    pub paraxial_warning: bool,
}

pub const PARAXIAL_WARNING_THRESHOLD: f64 = 0.1;

pub fn emittance_from_thermal<T: Real>(vth_over_c: T, sigma0: T) -> Result<ThermalEmittance<T>> {
    for (what, v) in [("vth_over_c", vth_over_c), ("sigma0", sigma0)] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::NonPositive {
                what,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(ThermalEmittance {
        epsilon: T::lit(2.0) * vth_over_c * sigma0,
        eta: vth_over_c,
        paraxial_warning: vth_over_c > T::lit(PARAXIAL_WARNING_THRESHOLD),
    })
}

/// Relative slack allowed below `epsilon / 2` before the uncertainty bound
/// counts as violated.
pub const UNCERTAINTY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport<T> {
    pub product: T,
    pub bound: T,
    pub satisfied: bool,
}

pub fn uncertainty_check<T: Real>(m: &BeamMoments<T>, epsilon: T) -> UncertaintyReport<T> {
    let product = m.uncertainty_product();
    let bound = epsilon / T::lit(2.0);
    UncertaintyReport {
        product,
        bound,
        satisfied: product >= bound * (T::one() - T::lit(UNCERTAINTY_SLACK)),
    }
}

/// How far a phase-space density departs from being non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityReport<T> {
    pub min_value: T,
    /// `integral max(-rho, 0) dx dp`.
    pub negative_mass: T,
    /// `(integral |rho| - integral rho) / integral rho`.
    pub negativity_volume: T,
}

pub fn negativity<T: Real>(rho: &QuasiDistribution<T>) -> NegativityReport<T> {
    let area = rho.grid.cell_area();
    let (mut neg, mut total) = (T::zero(), T::zero());
    for v in &rho.values {
        total = total + *v;
        if *v < T::zero() {
            neg = neg - *v;
        }
    }
    let negative_mass = neg * area;
    let mass = total * area;
    NegativityReport {
        min_value: rho.min(),
        negative_mass,
        negativity_volume: T::lit(2.0) * negative_mass / mass,
    }
}

/// `|| (G - G1) rho~ ||_2 / || G1 rho~ ||_2` over the `(x, y)` grid, where
/// `rho~` is the p-Fourier transform of `rho`, `G` the full generator and
/// `G1 = U'(x) y` its classical truncation.
///
/// Returns `None` when the denominator vanishes (force-free state).
pub fn truncation_ratio<T: Real>(
    rho: &QuasiDistribution<T>,
    spec: &PotentialSpec<T>,
    epsilon: T,
    z: T,
) -> Option<T> {
    let np = rho.grid.p.len();
    let ys = rho.grid.p.wavenumbers();
    let mut buf: Vec<Complex<T>> = rho
        .values
        .iter()
        .map(|v| Complex::new(*v, T::zero()))
        .collect();
    Plan::new(np).forward(&mut buf);

    let poly = spec.polynomial_at(z);
    let kernel = MoyalKernel::new(&poly, epsilon, None);
    let (mut num, mut den) = (T::zero(), T::zero());
    for (row, x) in buf.chunks(np).zip(rho.grid.x.points()) {
        let mut coeffs = kernel.coefficients(x);
        let a1 = coeffs[0];
        coeffs[0] = T::zero();
        for (c, y) in row.iter().zip(&ys) {
            let w = c.norm_sqr();
            let g1 = a1 * *y;
            let dg = MoyalKernel::eval_with(&coeffs, *y);
            num = num + dg * dg * w;
            den = den + g1 * g1 * w;
        }
    }
    if den > T::zero() {
        Some((num / den).sqrt())
    } else {
        None
    }
}

/// `<psi| -(eps^2/2) d^2/dx^2 + U(x, z) |psi>`.
pub fn energy<T: Real>(psi: &WaveField<T>, spec: &PotentialSpec<T>) -> T {
    let n = psi.grid.len();
    let mut spec_vals = psi.values.clone();
    Plan::new(n).forward(&mut spec_vals);
    let ks = psi.grid.wavenumbers();
    let power: T = spec_vals.iter().map(|c| c.norm_sqr()).sum();
    let eps = psi.epsilon;
    let kinetic = eps * eps / T::lit(2.0)
        * spec_vals
            .iter()
            .zip(&ks)
            .map(|(c, k)| *k * *k * c.norm_sqr())
            .sum::<T>()
        / power;
    let poly = spec.polynomial_at(psi.z);
    let potential = psi
        .grid
        .points()
        .into_iter()
        .zip(&psi.values)
        .map(|(x, v)| poly.value(x) * v.norm_sqr())
        .sum::<T>()
        * psi.grid.spacing();
    kinetic + potential / psi.norm_sqr()
}
