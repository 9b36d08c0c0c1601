use super::BOUNDARY_DECAY;
use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::num::Real;

/// Whether a phase-space density is a classical (non-negative) density or a
/// Wigner-like quasi-distribution that may go negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistKind {
    Classical,
    Wigner,
}

impl DistKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DistKind::Classical => "classical",
            DistKind::Wigner => "wigner",
        }
    }
}

/// Real phase-space density `rho(x, p)` sampled on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution<T> {
    pub grid: PhaseGrid<T>,
    pub values: Vec<T>,
    pub z: T,
    pub kind: DistKind,
}

impl<T: Real> QuasiDistribution<T> {
    pub fn new(grid: PhaseGrid<T>, values: Vec<T>, z: T, kind: DistKind) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::GridMismatch {
                what: "quasi-distribution cell count",
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "quasi-distribution",
            });
        }
        Ok(Self {
            grid,
            values,
            z,
            kind,
        })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    /// `sum rho dx dp`.
    pub fn mass(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.grid.cell_area()
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, v| m.max(num_traits::Float::abs(*v)))
    }

    /// Marginal `integral rho dp` on the x axis.
    pub fn x_marginal(&self) -> Vec<T> {
        let np = self.grid.p.len();
        let dp = self.grid.p.spacing();
        self.values
            .chunks(np)
            .map(|row| row.iter().copied().sum::<T>() * dp)
            .collect()
    }

    /// Marginal `integral rho dx` on the p axis.
    pub fn p_marginal(&self) -> Vec<T> {
        let np = self.grid.p.len();
        let dx = self.grid.x.spacing();
        let mut out = vec![T::zero(); np];
        for row in self.values.chunks(np) {
            for (o, v) in out.iter_mut().zip(row) {
                *o = *o + *v;
            }
        }
        out.into_iter().map(|v| v * dx).collect()
    }

    /// Largest pointwise difference to another state on the same grid.
    pub fn linf_distance(&self, other: &Self) -> Result<T> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                what: "phase grids differ",
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max(num_traits::Float::abs(*a - *b))))
    }

    /// Weighted sum of states on the same grid; the result is classical only
    /// if every part is.
    pub fn mixture(parts: &[(T, &QuasiDistribution<T>)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(Error::InvalidCount { n: 0 })?;
        let mut values = vec![T::zero(); first.values.len()];
        let mut kind = DistKind::Classical;
        for (w, part) in parts {
            if part.grid != first.grid {
                return Err(Error::GridMismatch {
                    what: "mixture components",
                });
            }
            if part.kind == DistKind::Wigner {
                kind = DistKind::Wigner;
            }
            for (o, v) in values.iter_mut().zip(&part.values) {
                *o = *o + *w * *v;
            }
        }
        Self::new(first.grid, values, first.z, kind)
    }
}

/// Bivariate Gaussian with covariance `[[sx^2, sxp], [sxp, sp^2]]` centred at
/// `(x0, p0)`, normalized to unit mass on the grid.
pub fn gaussian_quasidist<T: Real>(
    grid: PhaseGrid<T>,
    sigma_x: T,
    sigma_p: T,
    sigma_xp: T,
    x0: T,
    p0: T,
) -> Result<QuasiDistribution<T>> {
    let (sxx, spp) = (sigma_x * sigma_x, sigma_p * sigma_p);
    let det = sxx * spp - sigma_xp * sigma_xp;
    if !(sigma_x > T::zero()) || !(sigma_p > T::zero()) || !(det > T::zero()) {
        return Err(Error::NotPositiveDefinite {
            det: det.to_f64_lossy(),
        });
    }
    let edge = |center: T, axis: &crate::grid::AxisGrid<T>, var: T| {
        let lo = axis.start();
        let hi = lo + axis.length();
        if center < lo || center >= hi {
            return T::one();
        }
        let d = (center - lo).min(hi - center);
        (-(d * d) / (T::lit(2.0) * var)).exp()
    };
    let ratio = edge(x0, &grid.x, sxx).max(edge(p0, &grid.p, spp));
    if ratio > T::lit(BOUNDARY_DECAY) {
        return Err(Error::GridTooNarrow {
            ratio: ratio.to_f64_lossy(),
        });
    }

    let half = T::lit(0.5);
    let (ixx, ipp, ixp) = (spp / det, sxx / det, -sigma_xp / det);
    let ps = grid.p.points();
    let mut values = Vec::with_capacity(grid.cells());
    for x in grid.x.points() {
        let dx = x - x0;
        for &p in &ps {
            let dp = p - p0;
            let q = ixx * dx * dx + T::lit(2.0) * ixp * dx * dp + ipp * dp * dp;
            values.push((-half * q).exp());
        }
    }
    let mut rho = QuasiDistribution::new(grid, values, T::zero(), DistKind::Classical)?;
    let s = T::one() / rho.mass();
    rho.values.iter_mut().for_each(|v| *v = *v * s);
    Ok(rho)
}

/// Classical counterpart of a two-Gaussian superposition: the equal mixture of
/// the two minimum-spread Gaussians, without the interference term.
pub fn incoherent_pair_quasidist<T: Real>(
    grid: PhaseGrid<T>,
    sigma_x: T,
    x0: T,
    p0: T,
    separation: T,
    epsilon: T,
) -> Result<QuasiDistribution<T>> {
    let sigma_p = epsilon / (T::lit(2.0) * sigma_x);
    let half = separation / T::lit(2.0);
    let a = gaussian_quasidist(grid, sigma_x, sigma_p, T::zero(), x0 - half, p0)?;
    let b = gaussian_quasidist(grid, sigma_x, sigma_p, T::zero(), x0 + half, p0)?;
    QuasiDistribution::mixture(&[(T::lit(0.5), &a), (T::lit(0.5), &b)])
}
