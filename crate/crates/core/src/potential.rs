//! Polynomial effective potentials `U(x, z) = sum_k c_k(z) x^k` and the
//! generators the solvers need: the classical force, the exact imaginary-shift
//! (Moyal) difference and its Taylor truncations.

use crate::error::{Error, Result};
use crate::num::Real;

/// z-dependence of one polynomial coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientProfile<T> {
    Constant(T),
    /// Repeating lattice cell of `(length, value)` elements; `z` is taken
    /// modulo the cell length.
    Lattice(Vec<(T, T)>),
    /// `amplitude * cos(omega z + phase)`.
    Harmonic { amplitude: T, omega: T, phase: T },
}

impl<T: Real> CoefficientProfile<T> {
    pub fn value_at(&self, z: T) -> T {
        match self {
            CoefficientProfile::Constant(c) => *c,
            CoefficientProfile::Lattice(cell) => {
                let period = cell.iter().fold(T::zero(), |acc, (len, _)| acc + *len);
                let mut s = z % period;
                if s < T::zero() {
                    s = s + period;
                }
                for (len, value) in cell {
                    if s < *len {
                        return *value;
                    }
                    s = s - *len;
                }
                cell.last().map(|(_, v)| *v).unwrap_or_else(T::zero)
            }
            CoefficientProfile::Harmonic {
                amplitude,
                omega,
                phase,
            } => *amplitude * (*omega * z + *phase).cos(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientProfile::Constant(_))
    }

    /// Multiplies every value the profile can take by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        match self {
            CoefficientProfile::Constant(c) => CoefficientProfile::Constant(*c * factor),
            CoefficientProfile::Lattice(cell) => {
                CoefficientProfile::Lattice(cell.iter().map(|(l, v)| (*l, *v * factor)).collect())
            }
            CoefficientProfile::Harmonic {
                amplitude,
                omega,
                phase,
            } => CoefficientProfile::Harmonic {
                amplitude: *amplitude * factor,
                omega: *omega,
                phase: *phase,
            },
        }
    }

    fn validate(&self, power: u32) -> Result<()> {
        let bad = Error::NonFiniteCoefficient { power };
        match self {
            CoefficientProfile::Constant(c) if !c.is_finite() => Err(bad),
            CoefficientProfile::Lattice(cell) => {
                let period = cell.iter().fold(T::zero(), |acc, (len, _)| acc + *len);
                if cell.is_empty()
                    || !(period > T::zero())
                    || cell
                        .iter()
                        .any(|(l, v)| !l.is_finite() || *l < T::zero() || !v.is_finite())
                {
                    Err(bad)
                } else {
                    Ok(())
                }
            }
            CoefficientProfile::Harmonic {
                amplitude,
                omega,
                phase,
            } if !(amplitude.is_finite() && omega.is_finite() && phase.is_finite()) => Err(bad),
            _ => Ok(()),
        }
    }
}

/// One `c_k(z) x^k` term.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTerm<T> {
    pub power: u32,
    pub profile: CoefficientProfile<T>,
}

/// Dimensionless effective potential acting on the beam.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialSpec<T> {
    terms: Vec<PotentialTerm<T>>,
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(terms: Vec<PotentialTerm<T>>) -> Result<Self> {
        for (idx, t) in terms.iter().enumerate() {
            if terms[..idx].iter().any(|o| o.power == t.power) {
                return Err(Error::DuplicatePower { power: t.power });
            }
            t.profile.validate(t.power)?;
        }
        Ok(Self { terms })
    }

    /// `U = 0`.
    pub fn free_space() -> Self {
        Self { terms: Vec::new() }
    }

    /// Thin-lens channel `U = K x^2 / 2`; `K > 0` focuses.
    pub fn linear_lens(k: T) -> Self {
        Self {
            terms: vec![PotentialTerm {
                power: 2,
                profile: CoefficientProfile::Constant(k / T::lit(2.0)),
            }],
        }
    }

    /// `U = K x^2 / 2 + lambda x^4`.
    pub fn quartic(k: T, lambda: T) -> Self {
        Self {
            terms: vec![
                PotentialTerm {
                    power: 2,
                    profile: CoefficientProfile::Constant(k / T::lit(2.0)),
                },
                PotentialTerm {
                    power: 4,
                    profile: CoefficientProfile::Constant(lambda),
                },
            ],
        }
    }

    pub fn terms(&self) -> &[PotentialTerm<T>] {
        &self.terms
    }

    pub fn is_free_space(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_z_independent(&self) -> bool {
        self.terms.iter().all(|t| t.profile.is_constant())
    }

    /// Highest power present (0 for free space).
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.power).max().unwrap_or(0)
    }

    /// Dense polynomial with coefficients frozen at `z`.
    pub fn polynomial_at(&self, z: T) -> Polynomial<T> {
        let mut coeffs = vec![T::zero(); self.degree() as usize + 1];
        for t in &self.terms {
            coeffs[t.power as usize] = coeffs[t.power as usize] + t.profile.value_at(z);
        }
        Polynomial { coeffs }
    }

    pub fn eval_potential(&self, x: T, z: T) -> T {
        self.polynomial_at(z).value(x)
    }

    pub fn eval_gradient(&self, x: T, z: T) -> T {
        self.polynomial_at(z).taylor(1, x)
    }

    /// `[U(x + eps y/2) - U(x - eps y/2)] / eps`, evaluated through the exact
    /// odd Taylor series of the polynomial.
    pub fn moyal_generator(&self, x: T, y: T, z: T, epsilon: T) -> T {
        MoyalKernel::new(&self.polynomial_at(z), epsilon, None).eval(x, y)
    }

    /// Partial sum of the odd-order series up to `max_order`; order 1 is the
    /// classical generator `U'(x) y`.
    pub fn moyal_generator_truncated(
        &self,
        x: T,
        y: T,
        z: T,
        epsilon: T,
        max_order: u32,
    ) -> Result<T> {
        check_order(max_order)?;
        Ok(MoyalKernel::new(&self.polynomial_at(z), epsilon, Some(max_order)).eval(x, y))
    }
}

pub(crate) fn check_order(order: u32) -> Result<()> {
    if order == 0 || order % 2 == 0 {
        Err(Error::InvalidTruncationOrder { order })
    } else {
        Ok(())
    }
}

/// Dense polynomial `sum_k coeffs[k] x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    pub coeffs: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn value(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x + *c)
    }

    /// `U^(k)(x) / k!`, the k-th coefficient of the expansion of `U(x + a)` in `a`.
    pub fn taylor(&self, k: usize, x: T) -> T {
        if k >= self.coeffs.len() {
            return T::zero();
        }
        self.coeffs[k..]
            .iter()
            .enumerate()
            .rev()
            .fold(T::zero(), |acc, (m, c)| {
                acc * x + T::lit(binomial(k + m, k)) * *c
            })
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Generator frozen at one `z`: for each `x` it holds the odd-power
/// coefficients `a_k(x)` of `G(x, y) = sum_k a_k(x) y^k`.
pub(crate) struct MoyalKernel<'a, T> {
    poly: &'a Polynomial<T>,
    /// `(eps/2)^(k-1)` for each odd k kept, starting at k = 1.
    weights: Vec<T>,
}

impl<'a, T: Real> MoyalKernel<'a, T> {
    /// `max_order = None` keeps every order the polynomial supports.
    pub(crate) fn new(poly: &'a Polynomial<T>, epsilon: T, max_order: Option<u32>) -> Self {
        let top = max_order
            .map(|m| m as usize)
            .unwrap_or(usize::MAX)
            .min(poly.degree().max(1));
        let half = epsilon / T::lit(2.0);
        let weights = (1..=top)
            .step_by(2)
            .map(|k| half.powi(k as i32 - 1))
            .collect();
        Self { poly, weights }
    }

    /// `a_k(x)` for the kept odd orders, lowest first.
    pub(crate) fn coefficients(&self, x: T) -> Vec<T> {
        self.weights
            .iter()
            .enumerate()
            .map(|(idx, w)| {
                let k = 2 * idx + 1;
                if k == 1 {
                    self.poly.taylor(1, x)
                } else {
                    self.poly.taylor(k, x) * *w
                }
            })
            .collect()
    }

    #[inline]
    pub(crate) fn eval_with(coeffs: &[T], y: T) -> T {
        let y2 = y * y;
        let inner = coeffs.iter().rev().fold(T::zero(), |acc, a| acc * y2 + *a);
        y * inner
    }

    pub(crate) fn eval(&self, x: T, y: T) -> T {
        Self::eval_with(&self.coefficients(x), y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_values() {
        assert_eq!(PotentialSpec::<f64>::free_space().eval_potential(1.3, 2.0), 0.0);
        assert_eq!(PotentialSpec::linear_lens(1.0).eval_potential(2.0, 0.0), 2.0);
        assert!((PotentialSpec::<f64>::quartic(1.0, 0.1).eval_potential(2.0, 0.0) - 3.6).abs() < 1e-14);
    }

    #[test]
    fn gradients() {
        assert_eq!(PotentialSpec::<f64>::free_space().eval_gradient(1.3, 0.0), 0.0);
        assert_eq!(PotentialSpec::linear_lens(1.0).eval_gradient(2.0, 0.0), 2.0);
        assert!((PotentialSpec::<f64>::quartic(1.0, 0.1).eval_gradient(2.0, 0.0) - 5.2).abs() < 1e-14);
    }

    #[test]
    fn quartic_generator_matches_shifted_difference() {
        let lambda = 0.7f64;
        let spec = PotentialSpec::new(vec![PotentialTerm {
            power: 4,
            profile: CoefficientProfile::Constant(lambda),
        }])
        .unwrap();
        let g = spec.moyal_generator(1.0, 1.0, 0.0, 0.2);
        assert!((g - 4.04 * lambda).abs() < 1e-13);
        let oracle = (lambda * 1.1f64.powi(4) - lambda * 0.9f64.powi(4)) / 0.2;
        assert!((g - oracle).abs() < 1e-13);
    }

    #[test]
    fn generator_vanishes_at_zero_shift() {
        let spec = PotentialSpec::<f64>::quartic(1.0, 0.1);
        assert_eq!(spec.moyal_generator(0.7, 0.0, 0.0, 0.1), 0.0);
    }

    #[test]
    fn lens_generator_is_classical() {
        let spec = PotentialSpec::linear_lens(1.5);
        for &(x, y) in &[(0.3, 2.0), (-1.7, 13.1), (2.2, -0.4)] {
            let full = spec.moyal_generator(x, y, 0.0, 0.1);
            assert_eq!(full, spec.eval_gradient(x, 0.0) * y);
            assert_eq!(full, spec.moyal_generator_truncated(x, y, 0.0, 0.1, 1).unwrap());
        }
    }

    #[test]
    fn even_order_rejected() {
        let spec = PotentialSpec::<f64>::quartic(1.0, 0.1);
        assert_eq!(
            spec.moyal_generator_truncated(0.0, 1.0, 0.0, 0.1, 2),
            Err(Error::InvalidTruncationOrder { order: 2 })
        );
        assert!(spec.moyal_generator_truncated(0.0, 1.0, 0.0, 0.1, 0).is_err());
    }

    #[test]
    fn duplicate_powers_rejected() {
        let t = PotentialTerm {
            power: 2,
            profile: CoefficientProfile::Constant(1.0),
        };
        assert_eq!(
            PotentialSpec::new(vec![t.clone(), t]),
            Err(Error::DuplicatePower { power: 2 })
        );
        let nan = PotentialTerm {
            power: 3,
            profile: CoefficientProfile::Constant(f64::NAN),
        };
        assert!(PotentialSpec::new(vec![nan]).is_err());
    }

    #[test]
    fn profiles() {
        let lattice = CoefficientProfile::Lattice(vec![(0.5, 1.0), (1.5, -2.0)]);
        assert_eq!(lattice.value_at(0.25), 1.0);
        assert_eq!(lattice.value_at(1.0), -2.0);
        assert_eq!(lattice.value_at(2.25), 1.0);
        assert_eq!(lattice.value_at(-0.5), -2.0);
        let h = CoefficientProfile::Harmonic {
            amplitude: 2.0,
            omega: 1.0,
            phase: 0.0,
        };
        assert!((h.value_at(std::f64::consts::PI) + 2.0).abs() < 1e-14);
        assert!(!h.is_constant());
    }

    #[test]
    fn taylor_coefficients() {
        // U = 1 + 2x + 3x^2 + 4x^3
        let p = Polynomial {
            coeffs: vec![1.0f64, 2.0, 3.0, 4.0],
        };
        let x = 0.5;
        assert_eq!(p.taylor(0, x), p.value(x));
        assert!((p.taylor(1, x) - (2.0 + 6.0 * x + 12.0 * x * x)).abs() < 1e-14);
        assert!((p.taylor(2, x) - (3.0 + 12.0 * x)).abs() < 1e-14);
        assert_eq!(p.taylor(3, x), 4.0);
        assert_eq!(p.taylor(4, x), 0.0);
    }
}
