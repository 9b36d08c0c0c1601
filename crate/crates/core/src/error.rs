use thiserror::Error;

/// Errors raised by grid construction, state constructors, solvers and transforms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid point count {n}: must be a power of two and at least 8")]
    InvalidPointCount { n: usize },

    #[error("axis length must be positive and finite, got {length}")]
    NonPositiveLength { length: f64 },

    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("grid too narrow: boundary/peak ratio {ratio:.3e} exceeds 1e-12")]
    GridTooNarrow { ratio: f64 },

    #[error("covariance is not positive definite (det = {det:.3e})")]
    NotPositiveDefinite { det: f64 },

    #[error("invalid ray count {n}")]
    InvalidCount { n: usize },

    #[error("refusing to sample: negative mass fraction {fraction:.3e} exceeds 1e-6")]
    NegativeMass { fraction: f64 },

    #[error("potential term with power {power} appears more than once")]
    DuplicatePower { power: u32 },

    #[error("potential coefficient for power {power} is not finite")]
    NonFiniteCoefficient { power: u32 },

    #[error("truncation order must be odd and at least 1, got {order}")]
    InvalidTruncationOrder { order: u32 },

    #[error("kick phase increment {increment:.3} rad per y-sample exceeds pi; refine the p grid or shorten dz")]
    KickPhaseOverflow { increment: f64 },

    #[error("kinetic phase increment {increment:.3} rad per k-sample exceeds pi; widen the x grid or shorten dz")]
    KineticPhaseAliasing { increment: f64 },

    #[error("potential phase increment {increment:.3} rad per x-sample exceeds pi; refine the x grid or shorten dz")]
    PotentialPhaseAliasing { increment: f64 },

    #[error("imaginary residue {residue:.3e} (relative to max |rho|) exceeds {limit:.1e}")]
    ImaginaryResidue { residue: f64, limit: f64 },

    #[error("non-finite value encountered in {what}")]
    NonFinite { what: &'static str },

    #[error("state is not normalized: mass = {mass}")]
    NotNormalized { mass: f64 },

    #[error("at least {required} live rays required, found {found}")]
    TooFewRays { required: usize, found: usize },

    #[error("potential is not focusing (quadratic coefficient {k})")]
    NotFocusing { k: f64 },

    #[error("p axis too coarse: marginal mismatch {mismatch:.3e} exceeds {limit:.1e}")]
    PAxisTooCoarse { mismatch: f64, limit: f64 },

    #[error("tomogram parameters (mu, nu) = (0, 0) are degenerate")]
    DegenerateTomogram,

    #[error("grids do not match: {what}")]
    GridMismatch { what: &'static str },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
