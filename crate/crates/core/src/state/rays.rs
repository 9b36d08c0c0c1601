use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::QuasiDistribution;
use crate::error::{Error, Result};
use crate::num::Real;

/// Name of the generator behind [`sample_rays`], recorded in run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha::ChaCha20Rng, seed_from_u64)";

/// Negative mass, as a fraction of total mass, above which a density is
/// treated as a genuine quasi-distribution and refused for sampling.
pub const SAMPLING_NEGATIVE_MASS_LIMIT: f64 = 1e-6;

/// Discrete classical rays `(x_i, p_i)` at a common propagation coordinate.
///
/// Rays whose orbit became non-finite are `flagged`, frozen at their last
/// finite coordinates and excluded from moments.
#[derive(Debug, Clone, PartialEq)]
pub struct RayEnsemble<T> {
    pub x: Vec<T>,
    pub p: Vec<T>,
    pub flagged: Vec<bool>,
    pub z: T,
    pub seed: u64,
    /// Mass removed by clipping negative cells before sampling.
    pub clipped_mass: T,
}

impl<T: Real> RayEnsemble<T> {
    pub fn new(x: Vec<T>, p: Vec<T>, z: T, seed: u64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidCount { n: 0 });
        }
        if x.len() != p.len() {
            return Err(Error::GridMismatch {
                what: "ray coordinate counts",
            });
        }
        if x.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "ray ensemble" });
        }
        let flagged = vec![false; x.len()];
        Ok(Self {
            x,
            p,
            flagged,
            z,
            seed,
            clipped_mass: T::zero(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|f| **f).count()
    }
}

/// Draws `n` rays from a phase-space density by inverse-CDF sampling over grid
/// cells, followed by a uniform position inside the chosen cell.
///
/// Negative cells are clipped to zero; the clipped mass is recorded on the
/// ensemble. Densities whose negative mass exceeds
/// [`SAMPLING_NEGATIVE_MASS_LIMIT`] of the total are refused. The uniform
/// in-cell offset broadens each variance by `spacing^2 / 12`.
pub fn sample_rays<T: Real>(rho: &QuasiDistribution<T>, n: usize, seed: u64) -> Result<RayEnsemble<T>> {
    if n == 0 {
        return Err(Error::InvalidCount { n });
    }
    let area = rho.grid.cell_area().to_f64_lossy();
    let mut cdf = Vec::with_capacity(rho.values.len());
    let (mut acc, mut negative, mut total_abs) = (0.0f64, 0.0f64, 0.0f64);
    for v in &rho.values {
        let v = v.to_f64_lossy();
        total_abs += v.abs();
        if v > 0.0 {
            acc += v;
        } else {
            negative -= v;
        }
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::NotNormalized { mass: acc * area });
    }
    let fraction = negative / total_abs;
    if fraction > SAMPLING_NEGATIVE_MASS_LIMIT {
        return Err(Error::NegativeMass { fraction });
    }

    let np = rho.grid.p.len();
    let (dx, dp) = (
        rho.grid.x.spacing().to_f64_lossy(),
        rho.grid.p.spacing().to_f64_lossy(),
    );
    let (x_start, p_start) = (
        rho.grid.x.start().to_f64_lossy(),
        rho.grid.p.start().to_f64_lossy(),
    );
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ps = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * acc;
        let cell = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        let (i, j) = (cell / np, cell % np);
        let ox: f64 = rng.random::<f64>() - 0.5;
        let op: f64 = rng.random::<f64>() - 0.5;
        xs.push(T::lit(x_start + (i as f64 + ox) * dx));
        ps.push(T::lit(p_start + (j as f64 + op) * dp));
    }
    let mut rays = RayEnsemble::new(xs, ps, rho.z, seed)?;
    rays.clipped_mass = T::lit(negative * area);
    Ok(rays)
}
