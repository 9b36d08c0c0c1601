use crate::error::{Error, Result};
use crate::num::Real;

/// Reference width and emittance defining the scaled coordinates
/// `x_bar = x / (2 sigma0)`, `z_bar = z / (2 sigma0)` and the smallness
/// parameter `eta = epsilon / (2 sigma0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleContext<T> {
    sigma0: T,
    epsilon: T,
    eta: T,
}

impl<T: Real> ScaleContext<T> {
    pub fn new(sigma0: T, epsilon: T) -> Result<Self> {
        for (what, v) in [("sigma0", sigma0), ("epsilon", epsilon)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::NonPositive {
                    what,
                    value: v.to_f64_lossy(),
                });
            }
        }
        Ok(Self {
            sigma0,
            epsilon,
            eta: epsilon / (T::lit(2.0) * sigma0),
        })
    }

    pub fn sigma0(&self) -> T {
        self.sigma0
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    /// Physical length (x or z) to scaled coordinate.
    pub fn to_scaled(&self, length: T) -> T {
        length / (T::lit(2.0) * self.sigma0)
    }

    /// Scaled coordinate back to physical length.
    pub fn from_scaled(&self, scaled: T) -> T {
        scaled * (T::lit(2.0) * self.sigma0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_examples() {
        let ctx = ScaleContext::new(1.0, 0.1).unwrap();
        assert_eq!(ctx.to_scaled(2.0), 1.0);
        assert_eq!(ctx.to_scaled(0.0), 0.0);
        assert_eq!(ctx.eta(), 0.1 / 2.0);
        let ctx = ScaleContext::new(0.8, 0.1).unwrap();
        assert_eq!(ctx.from_scaled(ctx.to_scaled(0.37)), 0.37);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(ScaleContext::new(0.0, 0.1).is_err());
        assert!(ScaleContext::new(1.0, -0.1).is_err());
    }
}
