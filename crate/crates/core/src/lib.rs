//! Paraxial beam transport in phase space.
//!
//! Three descriptions of a one-dimensional beam are evolved side by side: the
//! classical Liouville equation for the ray density, its emittance-deformed
//! (Moyal/von Neumann) counterpart for a Wigner-like quasi-distribution, and
//! the Schrödinger-like thermal-wave-model equation for a complex beam
//! wavefunction. The emittance plays the part of Planck's constant and the
//! propagation coordinate that of time.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the precision.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod num;
pub mod potential;
pub mod solvers;
mod spectral;
pub mod state;
pub mod transforms;

pub use diagnostics::{
    emittance_from_thermal, moments_of, negativity, truncation_ratio, uncertainty_check,
    BeamMoments, Moments, NegativityReport, ThermalEmittance, UncertaintyReport,
};
pub use error::{Error, Result};
pub use grid::{AxisGrid, PhaseGrid};
pub use num::Real;
pub use potential::{CoefficientProfile, PotentialSpec, PotentialTerm};
pub use solvers::{
    evolve_phase_space, evolve_twm, step_phase_space, step_twm, trace_rays, GeneratorMode,
    StepPlan,
};
pub use state::{
    gaussian_quasidist, gaussian_wavefield, sample_rays, DistKind, QuasiDistribution, RayEnsemble,
    ScaleContext, WaveField,
};
pub use transforms::{momentum_wavefield, tomogram, wigner_transform, MomentumField, Tomogram};

pub type AxisGrid64 = AxisGrid<f64>;
pub type PhaseGrid64 = PhaseGrid<f64>;
pub type WaveField64 = WaveField<f64>;
pub type QuasiDistribution64 = QuasiDistribution<f64>;
pub type RayEnsemble64 = RayEnsemble<f64>;
pub type PotentialSpec64 = PotentialSpec<f64>;
pub type BeamMoments64 = BeamMoments<f64>;
pub type StepPlan64 = StepPlan<f64>;
pub type Tomogram64 = Tomogram<f64>;

pub type AxisGrid32 = AxisGrid<f32>;
pub type PhaseGrid32 = PhaseGrid<f32>;
pub type WaveField32 = WaveField<f32>;
pub type QuasiDistribution32 = QuasiDistribution<f32>;
pub type RayEnsemble32 = RayEnsemble<f32>;
pub type PotentialSpec32 = PotentialSpec<f32>;
pub type BeamMoments32 = BeamMoments<f32>;
pub type StepPlan32 = StepPlan<f32>;
pub type Tomogram32 = Tomogram<f32>;
