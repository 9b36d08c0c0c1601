//! Scalar abstraction shared by every solver.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the propagators are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + FftNum + Sum + Default + Display + Debug
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Widens to `f64` for reporting.
    fn to_f64_lossy(self) -> f64;

    /// Smallest meaningful relative tolerance for checks that would otherwise
    /// sit below round-off in this precision.
    fn roundoff_floor(tol: f64) -> Self {
        Self::lit(tol.max(1e3 * Self::epsilon().to_f64_lossy()))
    }
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundoff_floor_keeps_f64_tolerances() {
        assert_eq!(f64::roundoff_floor(1e-8), 1e-8);
        assert!(f32::roundoff_floor(1e-8) > 1e-5);
    }

    #[test]
    fn abs_resolves() {
        let x = -2.0f64;
        assert_eq!(Float::abs(x), 2.0);
    }
}
