//! State containers, initial-condition constructors and unit scalings.

mod quasidist;
mod rays;
mod scale;
mod wavefield;

pub use quasidist::{
    gaussian_quasidist, incoherent_pair_quasidist, DistKind, QuasiDistribution,
};
pub use rays::{sample_rays, RayEnsemble, RNG_ALGORITHM, SAMPLING_NEGATIVE_MASS_LIMIT};
pub use scale::ScaleContext;
pub use wavefield::{gaussian_wavefield, superposition_wavefield, WaveField};

/// Peak-relative amplitude a state may have on the periodic boundary.
pub const BOUNDARY_DECAY: f64 = 1e-12;

/// Relative mass error accepted by operations that require normalized input.
pub const NORMALIZATION_TOL: f64 = 1e-6;
