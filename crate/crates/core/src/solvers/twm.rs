use num_complex::Complex;
use num_traits::Float;

use super::{is_snapshot, StepPlan};
use crate::diagnostics::{moments_of, BeamMoments};
use crate::error::{Error, Result};
use crate::grid::AxisGrid;
use crate::num::Real;
use crate::potential::PotentialSpec;
use crate::spectral::Plan;
use crate::state::WaveField;

/// Split-step propagator for `i eps dpsi/dz = -(eps^2/2) psi'' + U(x, z) psi`.
///
/// One step: half potential phase `exp(-i U dz / (2 eps))`, full kinetic phase
/// `exp(-i eps k^2 dz / 2)` in the x-Fourier variable, half potential phase.
/// `eps` is taken from the field being stepped.
pub struct TwmPropagator<T: Real> {
    grid: AxisGrid<T>,
    epsilon: T,
    dz: T,
    plan: Plan<T>,
    kinetic: Vec<Complex<T>>,
    potential_cache: Option<Vec<Complex<T>>>,
}

impl<T: Real> TwmPropagator<T> {
    pub fn new(grid: AxisGrid<T>, epsilon: T, dz: T) -> Result<Self> {
        if !(dz > T::zero()) || !dz.is_finite() {
            return Err(Error::NonPositive {
                what: "dz",
                value: dz.to_f64_lossy(),
            });
        }
        // the kinetic phase advances by eps |k| dk dz between neighbouring k
        let increment = epsilon * grid.nyquist() * grid.spectral_spacing() * dz;
        if !(increment < T::PI()) {
            return Err(Error::KineticPhaseAliasing {
                increment: increment.to_f64_lossy(),
            });
        }
        let kinetic = grid
            .wavenumbers()
            .into_iter()
            .map(|k| Complex::from_polar(T::one(), -epsilon * k * k * dz / T::lit(2.0)))
            .collect();
        Ok(Self {
            grid,
            epsilon,
            dz,
            plan: Plan::new(grid.len()),
            kinetic,
            potential_cache: None,
        })
    }

    fn half_potential(&self, spec: &PotentialSpec<T>, z_mid: T) -> Result<Vec<Complex<T>>> {
        let poly = spec.polynomial_at(z_mid);
        let values: Vec<T> = self.grid.points().into_iter().map(|x| poly.value(x)).collect();
        let mut worst = T::zero();
        for i in 0..values.len() {
            let next = values[(i + 1) % values.len()];
            worst = worst.max(Float::abs(next - values[i]));
        }
        let increment = worst * self.dz / self.epsilon;
        if !(increment < T::PI()) {
            return Err(Error::PotentialPhaseAliasing {
                increment: increment.to_f64_lossy(),
            });
        }
        let factor = -self.dz / (T::lit(2.0) * self.epsilon);
        Ok(values
            .into_iter()
            .map(|u| Complex::from_polar(T::one(), u * factor))
            .collect())
    }

    pub fn step(&mut self, psi: &WaveField<T>, spec: &PotentialSpec<T>) -> Result<WaveField<T>> {
        if psi.grid != self.grid || psi.epsilon != self.epsilon {
            return Err(Error::GridMismatch {
                what: "wavefield grid or emittance differs from propagator",
            });
        }
        let mut values = psi.values.clone();
        let potential = if spec.is_free_space() {
            None
        } else {
            let z_mid = psi.z + self.dz / T::lit(2.0);
            Some(match self.potential_cache.take() {
                Some(t) => t,
                None => self.half_potential(spec, z_mid)?,
            })
        };
        if let Some(v) = &potential {
            values.iter_mut().zip(v).for_each(|(a, m)| *a = *a * *m);
        }
        self.plan.forward(&mut values);
        values
            .iter_mut()
            .zip(&self.kinetic)
            .for_each(|(a, m)| *a = *a * *m);
        self.plan.inverse(&mut values);
        if let Some(v) = potential {
            values.iter_mut().zip(&v).for_each(|(a, m)| *a = *a * *m);
            if spec.is_z_independent() {
                self.potential_cache = Some(v);
            }
        }
        if values.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { what: "wavefield" });
        }
        Ok(WaveField {
            grid: self.grid,
            values,
            epsilon: self.epsilon,
            z: psi.z + self.dz,
        })
    }
}

/// One split-step of the thermal-wave-model equation.
pub fn step_twm<T: Real>(
    psi: &WaveField<T>,
    spec: &PotentialSpec<T>,
    plan: &StepPlan<T>,
) -> Result<WaveField<T>> {
    TwmPropagator::new(psi.grid, psi.epsilon, plan.dz)?.step(psi, spec)
}

#[derive(Debug, Clone)]
pub struct TwmTrajectory<T> {
    pub snapshots: Vec<(usize, WaveField<T>)>,
    pub moments: Vec<BeamMoments<T>>,
}

impl<T> TwmTrajectory<T> {
    pub fn final_state(&self) -> &WaveField<T> {
        &self.snapshots.last().expect("at least one snapshot").1
    }
}

pub fn evolve_twm<T: Real>(
    psi: &WaveField<T>,
    spec: &PotentialSpec<T>,
    plan: &StepPlan<T>,
    snapshot_every: usize,
) -> Result<TwmTrajectory<T>> {
    evolve_twm_with(psi, spec, plan, snapshot_every, |_, _| {})
}

/// As [`evolve_twm`], calling `observer(step, psi)` on the initial field and
/// after every step.
pub fn evolve_twm_with<T: Real, F>(
    psi: &WaveField<T>,
    spec: &PotentialSpec<T>,
    plan: &StepPlan<T>,
    snapshot_every: usize,
    mut observer: F,
) -> Result<TwmTrajectory<T>>
where
    F: FnMut(usize, &WaveField<T>),
{
    let mut moments = vec![moments_of(psi)?];
    let mut snapshots = vec![(0, psi.clone())];
    observer(0, psi);
    if plan.n_steps == 0 {
        return Ok(TwmTrajectory { snapshots, moments });
    }
    let mut prop = TwmPropagator::new(psi.grid, psi.epsilon, plan.dz)?;
    let mut current = psi.clone();
    for step in 1..=plan.n_steps {
        current = prop.step(&current, spec).map_err(|e| e.at_step(step))?;
        moments.push(moments_of(&current).map_err(|e| e.at_step(step))?);
        observer(step, &current);
        if is_snapshot(step, plan.n_steps, snapshot_every) {
            snapshots.push((step, current.clone()));
        }
    }
    Ok(TwmTrajectory { snapshots, moments })
}

/// Stationary rms width in a linear-lens channel, `sqrt(eps / (2 sqrt(K)))`.
///
/// `spec` must be a z-independent quadratic potential with `K > 0`.
pub fn matched_width<T: Real>(spec: &PotentialSpec<T>, epsilon: T) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::NonPositive {
            what: "epsilon",
            value: epsilon.to_f64_lossy(),
        });
    }
    let poly = spec.polynomial_at(T::zero());
    let k = poly.coeffs.get(2).map(|c| *c * T::lit(2.0)).unwrap_or_else(T::zero);
    let quadratic_only = spec.degree() == 2
        && spec.is_z_independent()
        && poly.coeffs[1] == T::zero();
    if !quadratic_only || !(k > T::zero()) {
        return Err(Error::NotFocusing {
            k: k.to_f64_lossy(),
        });
    }
    Ok((epsilon / (T::lit(2.0) * k.sqrt())).sqrt())
}

/// Free-space rms width of a minimum-spread Gaussian,
/// `sigma0 sqrt(1 + (eps z / (2 sigma0^2))^2)`.
pub fn free_gaussian_sigma<T: Real>(sigma0: T, epsilon: T, z: T) -> Result<T> {
    if !(sigma0 > T::zero()) {
        return Err(Error::NonPositive {
            what: "sigma0",
            value: sigma0.to_f64_lossy(),
        });
    }
    let r = epsilon * z / (T::lit(2.0) * sigma0 * sigma0);
    Ok(sigma0 * (T::one() + r * r).sqrt())
}
