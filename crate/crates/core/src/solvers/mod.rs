//! Propagators for phase-space densities, ray ensembles and wavefields.

mod phase_space;
mod rays;
mod twm;

pub use phase_space::{
    evolve_phase_space, evolve_phase_space_with, step_phase_space, PhaseSpacePropagator,
    PhaseSpaceTrajectory, IMAGINARY_RESIDUE_LIMIT,
};
pub use rays::{trace_rays, RayTrajectory};
pub use twm::{
    evolve_twm, evolve_twm_with, free_gaussian_sigma, matched_width, step_twm, TwmPropagator,
    TwmTrajectory,
};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::potential::check_order;

/// Which generator the phase-space kick uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorMode {
    /// Exact imaginary-shift difference: the deformed (von Neumann) equation.
    FullMoyal,
    /// Odd Taylor series cut at the given order; `Truncated(1)` is Liouville.
    Truncated(u32),
}

impl GeneratorMode {
    pub fn classical() -> Self {
        GeneratorMode::Truncated(1)
    }

    pub(crate) fn max_order(self) -> Option<u32> {
        match self {
            GeneratorMode::FullMoyal => None,
            GeneratorMode::Truncated(k) => Some(k),
        }
    }
}

/// Step size, step count and generator for a Strang-split run.
///
/// Splitting is always second-order Strang; `z`-dependent potential
/// coefficients are sampled at each step midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan<T> {
    pub dz: T,
    pub n_steps: usize,
    pub generator: GeneratorMode,
}

impl<T: Real> StepPlan<T> {
    pub fn new(dz: T, n_steps: usize, generator: GeneratorMode) -> Result<Self> {
        if !(dz > T::zero()) || !dz.is_finite() {
            return Err(Error::NonPositive {
                what: "dz",
                value: dz.to_f64_lossy(),
            });
        }
        if let Some(order) = generator.max_order() {
            check_order(order)?;
        }
        Ok(Self {
            dz,
            n_steps,
            generator,
        })
    }

    pub fn moyal(dz: T, n_steps: usize) -> Result<Self> {
        Self::new(dz, n_steps, GeneratorMode::FullMoyal)
    }

    pub fn classical(dz: T, n_steps: usize) -> Result<Self> {
        Self::new(dz, n_steps, GeneratorMode::classical())
    }
}

/// Steps at which snapshots are kept: the initial state, every
/// `snapshot_every`-th step (`0` disables the cadence) and the final step.
pub fn is_snapshot(step: usize, n_steps: usize, snapshot_every: usize) -> bool {
    step == 0 || step == n_steps || (snapshot_every > 0 && step % snapshot_every == 0)
}
