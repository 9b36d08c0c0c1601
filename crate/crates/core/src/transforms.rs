//! Conversions between representations: the emittance-scaled Wigner transform
//! of a pure state, the momentum representation and tomographic marginals.

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{signed_index, AxisGrid, PhaseGrid};
use crate::num::Real;
use crate::spectral::Plan;
use crate::state::{DistKind, QuasiDistribution, WaveField};

/// Pointwise tolerance on the Wigner marginal identities, relative to
/// `max(1, peak density)`.
pub const MARGINAL_TOL: f64 = 1e-10;

/// Imaginary residue (relative to `max |rho_w|`) tolerated by the transform.
pub const WIGNER_RESIDUE_TOL: f64 = 1e-10;

/// `rho_w(x, p) = 1/(pi eps) integral psi(x+s) psi*(x-s) exp(-2 i p s / eps) ds`
/// on `psi.grid x p_axis`.
///
/// Evaluated through its p-Fourier transform
/// `rho~(x, y) = psi(x - eps y/2) psi*(x + eps y/2)`: the shifted fields come
/// from spectral interpolation of the zero-padded wavefunction, so shifts
/// never wrap the periodic window onto itself. The prefactor makes the
/// marginals exactly `|psi|^2` and `|phi_eps|^2`; the p-marginal is checked
/// against a direct momentum transform and [`Error::PAxisTooCoarse`] is
/// returned when the p axis cannot represent the state.
pub fn wigner_transform<T: Real>(
    psi: &WaveField<T>,
    p_axis: AxisGrid<T>,
) -> Result<QuasiDistribution<T>> {
    let nx = psi.grid.len();
    let np = p_axis.len();
    let dx = psi.grid.spacing();
    let eps = psi.epsilon;
    let dy = p_axis.spectral_spacing();
    let half = T::lit(0.5);

    let s_max = eps * T::lit((np / 2) as f64) * dy * half;
    let pad_cells = (s_max / dx).ceil().to_usize().unwrap_or(usize::MAX / 4);
    let m = (nx + pad_cells + 2).next_power_of_two();
    let padded_grid = AxisGrid::new(m, dx * T::lit(m as f64), T::zero())?;
    let kp = padded_grid.wavenumbers();
    let zero = Complex::new(T::zero(), T::zero());
    let mut spectrum = vec![zero; m];
    spectrum[..nx].copy_from_slice(&psi.values);
    let mut plan = Plan::new(m);
    plan.forward(&mut spectrum);

    let mut shifted = |s: T, out: &mut Vec<Complex<T>>| {
        out.clear();
        out.extend(spectrum.iter().zip(&kp).enumerate().map(|(j, (c, k))| {
            let phase = -*k * s;
            if j == m / 2 {
                *c * phase.cos()
            } else {
                *c * Complex::from_polar(T::one(), phase)
            }
        }));
        plan.inverse(out);
    };

    // x-major table of rho~(x_i, y_j) exp(i p0 y_j), FFT order in j
    let p0 = p_axis.start();
    let mut table = vec![zero; nx * np];
    let (mut fwd, mut back) = (Vec::with_capacity(m), Vec::with_capacity(m));
    for jj in 0..=np / 2 {
        let y = T::lit(jj as f64) * dy;
        let s = eps * y * half;
        shifted(s, &mut fwd);
        shifted(-s, &mut back);
        let pos = Complex::from_polar(T::one(), p0 * y);
        let neg = pos.conj();
        for i in 0..nx {
            let r = fwd[i] * back[i].conj();
            if jj == np / 2 {
                // Nyquist bin: average of +y and -y branches
                table[i * np + jj] = Complex::new((r * pos).re, T::zero());
            } else {
                table[i * np + jj] = r * pos;
                if jj > 0 {
                    table[i * np + np - jj] = r.conj() * neg;
                }
            }
        }
    }
    Plan::new(np).inverse(&mut table);

    let inv_dp = T::one() / p_axis.spacing();
    let mut values = Vec::with_capacity(nx * np);
    let (mut residue, mut peak) = (T::zero(), T::zero());
    for c in &table {
        let v = c.re * inv_dp;
        residue = residue.max(Float::abs(c.im * inv_dp));
        peak = peak.max(Float::abs(v));
        values.push(v);
    }
    let rel = residue / peak.max(T::min_positive_value());
    let limit = T::roundoff_floor(WIGNER_RESIDUE_TOL);
    if !(rel <= limit) {
        return Err(Error::ImaginaryResidue {
            residue: rel.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    let rho = QuasiDistribution::new(
        PhaseGrid::new(psi.grid, p_axis),
        values,
        psi.z,
        DistKind::Wigner,
    )?;

    let target: Vec<T> = momentum_amplitudes(psi, &p_axis.points())
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let marginal = rho.p_marginal();
    let scale = target.iter().fold(T::one(), |a, v| a.max(*v));
    let mismatch = marginal
        .iter()
        .zip(&target)
        .fold(T::zero(), |a, (m, t)| a.max(Float::abs(*m - *t)))
        / scale;
    let limit = T::roundoff_floor(MARGINAL_TOL);
    if !(mismatch <= limit) {
        return Err(Error::PAxisTooCoarse {
            mismatch: mismatch.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok(rho)
}

/// Momentum-representation amplitude `phi_eps(p)` on the natural grid
/// `p = eps k`, in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumField<T> {
    pub p: Vec<T>,
    pub values: Vec<Complex<T>>,
    pub spacing: T,
}

impl<T: Real> MomentumField<T> {
    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> T {
        self.density().into_iter().sum::<T>() * self.spacing
    }
}

/// `phi_eps(p) = (2 pi eps)^(-1/2) integral psi(x) exp(-i p x / eps) dx` at
/// `p = eps k` for the FFT wavenumbers of the grid.
pub fn momentum_wavefield<T: Real>(psi: &WaveField<T>) -> MomentumField<T> {
    let n = psi.grid.len();
    let eps = psi.epsilon;
    let x0 = psi.grid.start();
    let mut spectrum = psi.values.clone();
    Plan::new(n).forward(&mut spectrum);
    let ks = psi.grid.wavenumbers();
    let norm = psi.grid.spacing() / (T::TAU() * eps).sqrt();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| signed_index(j, n));
    let p: Vec<T> = order.iter().map(|&j| eps * ks[j]).collect();
    let values = order
        .iter()
        .map(|&j| spectrum[j] * Complex::from_polar(norm, -ks[j] * x0))
        .collect();
    MomentumField {
        p,
        values,
        spacing: eps * psi.grid.spectral_spacing(),
    }
}

/// `phi_eps` at arbitrary momenta by direct quadrature over the x grid.
pub fn momentum_amplitudes<T: Real>(psi: &WaveField<T>, ps: &[T]) -> Vec<Complex<T>> {
    let eps = psi.epsilon;
    let xs = psi.grid.points();
    let norm = psi.grid.spacing() / (T::TAU() * eps).sqrt();
    ps.iter()
        .map(|p| {
            let sum = xs
                .iter()
                .zip(&psi.values)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (x, v)| {
                    acc + *v * Complex::from_polar(T::one(), -*p * *x / eps)
                });
            sum * norm
        })
        .collect()
}

/// Marginal distribution of the quadrature `X = mu x + nu p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram<T> {
    pub mu: T,
    pub nu: T,
    pub axis: AxisGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> Tomogram<T> {
    pub fn mass(&self) -> T {
        self.axis.integrate(&self.values)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }
}

/// Band-limited interpolation of one real periodic row at arbitrary offsets
/// from its first sample; points outside the window evaluate to zero.
struct RowInterpolant<T> {
    coeffs: Vec<Complex<T>>,
    n: usize,
    spacing: T,
    length: T,
}

impl<T: Real> RowInterpolant<T> {
    fn new(spectrum: &[Complex<T>], spacing: T) -> Self {
        let n = spectrum.len();
        Self {
            coeffs: spectrum.to_vec(),
            n,
            spacing,
            length: spacing * T::lit(n as f64),
        }
    }

    fn eval(&self, offset: T) -> T {
        if offset < T::zero() || offset >= self.length {
            return T::zero();
        }
        let theta = offset * T::TAU() / self.length;
        let step = Complex::from_polar(T::one(), theta);
        let mut phase = step;
        let mut acc = T::zero();
        let half = self.n / 2;
        for c in &self.coeffs[1..half] {
            acc = acc + (*c * phase).re;
            phase = phase * step;
        }
        let nyq = self.coeffs[half].re * (theta * T::lit(half as f64)).cos();
        (self.coeffs[0].re + T::lit(2.0) * acc + nyq) / T::lit(self.n as f64)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    #[allow(dead_code)]
    fn spacing(&self) -> T {
        self.spacing
    }
}

/// `w(X) = integral rho(x, p) delta(X - mu x - nu p) dx dp` on `axis_out`.
///
/// The delta is resolved along whichever of `x`, `p` keeps the integrand best
/// sampled; the other coordinate is spectrally interpolated and the line
/// integral is a rectangle sum over grid points.
pub fn tomogram<T: Real>(
    rho: &QuasiDistribution<T>,
    mu: T,
    nu: T,
    axis_out: AxisGrid<T>,
) -> Result<Tomogram<T>> {
    if !mu.is_finite() || !nu.is_finite() {
        return Err(Error::NonFinite {
            what: "tomogram parameters",
        });
    }
    if mu == T::zero() && nu == T::zero() {
        return Err(Error::DegenerateTomogram);
    }
    let (nx, np) = (rho.grid.x.len(), rho.grid.p.len());
    let (dx, dp) = (rho.grid.x.spacing(), rho.grid.p.spacing());
    let out_points = axis_out.points();
    let mut values = vec![T::zero(); axis_out.len()];

    // integrate over x, interpolate in p when |mu| dx <= |nu| dp
    let over_x = Float::abs(mu) * dx <= Float::abs(nu) * dp;
    let (lines, inner_axis, along_axis, inner_n, a, b) = if over_x {
        (
            rho.values.clone(),
            rho.grid.p,
            rho.grid.x,
            np,
            mu,
            nu,
        )
    } else {
        let mut t = vec![T::zero(); nx * np];
        crate::spectral::transpose(&rho.values, nx, np, &mut t);
        (t, rho.grid.x, rho.grid.p, nx, nu, mu)
    };
    // lines[r * inner_n + c]: r indexes `along_axis`, c indexes `inner_axis`;
    // on line r the delta fixes inner = (X - a * along_r) / b
    let mut plan = Plan::new(inner_n);
    let inner_start = inner_axis.start();
    let weight = along_axis.spacing() / Float::abs(b);
    let mut buf: Vec<Complex<T>> = Vec::with_capacity(inner_n);
    for (r, along) in along_axis.points().into_iter().enumerate() {
        let row = &lines[r * inner_n..(r + 1) * inner_n];
        buf.clear();
        buf.extend(row.iter().map(|v| Complex::new(*v, T::zero())));
        plan.forward(&mut buf);
        let interp = RowInterpolant::new(&buf, inner_axis.spacing());
        if interp.is_zero() {
            continue;
        }
        for (w, big_x) in values.iter_mut().zip(&out_points) {
            let inner = (*big_x - a * along) / b;
            *w = *w + weight * interp.eval(inner - inner_start);
        }
    }
    Ok(Tomogram {
        mu,
        nu,
        axis: axis_out,
        values,
    })
}
