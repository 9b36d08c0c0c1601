use num_complex::Complex;
use num_traits::Float;

use super::{is_snapshot, GeneratorMode, StepPlan};
use crate::diagnostics::{moments_of, BeamMoments};
use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::num::Real;
use crate::potential::{MoyalKernel, PotentialSpec};
use crate::spectral::{nyquist_multiplier, transpose, Plan};
use crate::state::QuasiDistribution;

/// Largest imaginary residue (relative to `max |rho|`) tolerated after a step.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-8;

/// Reusable Strang propagator for one grid, emittance, step size and generator.
///
/// One step is half drift, full kick, half drift:
///
/// * drift `rho(x, p) <- rho(x - p dz/2, p)`, applied as the phase
///   `exp(-i k p dz/2)` on the x-Fourier transform of each p-row;
/// * kick `rho~(x, y) <- exp(+i dz G(x, y)) rho~(x, y)` with
///   `rho~(x, y) = sum_p rho(x, p) exp(-i p y) dp` and `G` the selected
///   generator evaluated at the step midpoint.
///
/// With this transform convention `+i dz G` is the sign that reproduces the
/// characteristics `dp/dz = -U'(x)`.
pub struct PhaseSpacePropagator<T: Real> {
    grid: PhaseGrid<T>,
    epsilon: T,
    dz: T,
    generator: GeneratorMode,
    plan_x: Plan<T>,
    plan_p: Plan<T>,
    /// p-major `[j * nx + kx]` drift multipliers for dz/2 and dz.
    half_drift: Vec<Complex<T>>,
    full_drift: Vec<Complex<T>>,
    /// x-major kick multipliers, cached for z-independent potentials.
    kick_cache: Option<Vec<Complex<T>>>,
    x_major: Vec<Complex<T>>,
    p_major: Vec<Complex<T>>,
    last_residue: T,
}

impl<T: Real> PhaseSpacePropagator<T> {
    pub fn new(grid: PhaseGrid<T>, epsilon: T, dz: T, generator: GeneratorMode) -> Result<Self> {
        StepPlan::new(dz, 1, generator)?;
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::NonPositive {
                what: "epsilon",
                value: epsilon.to_f64_lossy(),
            });
        }
        let (nx, np) = (grid.x.len(), grid.p.len());
        let ks = grid.x.wavenumbers();
        let ps = grid.p.points();
        let drift = |fraction: T| {
            let mut table = Vec::with_capacity(nx * np);
            for p in &ps {
                for (kx, k) in ks.iter().enumerate() {
                    let phase = -*k * *p * dz * fraction;
                    table.push(if kx == nx / 2 {
                        nyquist_multiplier(phase)
                    } else {
                        Complex::from_polar(T::one(), phase)
                    });
                }
            }
            table
        };
        let zero = Complex::new(T::zero(), T::zero());
        Ok(Self {
            grid,
            epsilon,
            dz,
            generator,
            plan_x: Plan::new(nx),
            plan_p: Plan::new(np),
            half_drift: drift(T::lit(0.5)),
            full_drift: drift(T::one()),
            kick_cache: None,
            x_major: vec![zero; nx * np],
            p_major: vec![zero; nx * np],
            last_residue: T::zero(),
        })
    }

    pub fn grid(&self) -> &PhaseGrid<T> {
        &self.grid
    }

    /// Imaginary residue (relative to `max |rho|`) discarded by the last step.
    pub fn last_residue(&self) -> T {
        self.last_residue
    }

    /// Builds the kick multipliers at `z_mid`, checking that the sampled phase
    /// never advances by more than pi between neighbouring y samples.
    fn kick_table(&self, spec: &PotentialSpec<T>, z_mid: T) -> Result<Vec<Complex<T>>> {
        let np = self.grid.p.len();
        let ys = self.grid.p.wavenumbers();
        let poly = spec.polynomial_at(z_mid);
        let kernel = MoyalKernel::new(&poly, self.epsilon, self.generator.max_order());
        let pi = T::PI();
        let mut table = Vec::with_capacity(self.grid.cells());
        let mut phases = vec![T::zero(); np];
        let mut worst = T::zero();
        for x in self.grid.x.points() {
            let coeffs = kernel.coefficients(x);
            for (ph, y) in phases.iter_mut().zip(&ys) {
                *ph = self.dz * MoyalKernel::eval_with(&coeffs, *y);
            }
            // neighbours in ascending y: FFT order wraps at np/2
            for j in 0..np {
                let next = (j + 1) % np;
                if next == np / 2 {
                    continue;
                }
                worst = worst.max(Float::abs(phases[next] - phases[j]));
            }
            for (j, ph) in phases.iter().enumerate() {
                table.push(if j == np / 2 {
                    nyquist_multiplier(*ph)
                } else {
                    Complex::from_polar(T::one(), *ph)
                });
            }
        }
        if !(worst < pi) {
            return Err(Error::KickPhaseOverflow {
                increment: worst.to_f64_lossy(),
            });
        }
        Ok(table)
    }

    fn drift(&mut self, table_is_full: bool) {
        let (nx, np) = (self.grid.x.len(), self.grid.p.len());
        transpose(&self.x_major, nx, np, &mut self.p_major);
        self.plan_x.forward(&mut self.p_major);
        let table = if table_is_full {
            &self.full_drift
        } else {
            &self.half_drift
        };
        for (v, m) in self.p_major.iter_mut().zip(table) {
            *v = *v * *m;
        }
        self.plan_x.inverse(&mut self.p_major);
        transpose(&self.p_major, np, nx, &mut self.x_major);
    }

    fn kick(&mut self, table: &[Complex<T>]) {
        self.plan_p.forward(&mut self.x_major);
        for (v, m) in self.x_major.iter_mut().zip(table) {
            *v = *v * *m;
        }
        self.plan_p.inverse(&mut self.x_major);
    }

    /// Advances `state` by one step of size `dz`.
    pub fn step(
        &mut self,
        state: &QuasiDistribution<T>,
        spec: &PotentialSpec<T>,
    ) -> Result<QuasiDistribution<T>> {
        if state.grid != self.grid {
            return Err(Error::GridMismatch {
                what: "state grid differs from propagator grid",
            });
        }
        for (c, v) in self.x_major.iter_mut().zip(&state.values) {
            *c = Complex::new(*v, T::zero());
        }
        if spec.is_free_space() {
            self.drift(true);
        } else {
            let z_mid = state.z + self.dz / T::lit(2.0);
            let table = match self.kick_cache.take() {
                Some(t) => t,
                None => self.kick_table(spec, z_mid)?,
            };
            self.drift(false);
            self.kick(&table);
            self.drift(false);
            if spec.is_z_independent() {
                self.kick_cache = Some(table);
            }
        }

        let scale = state.max_abs().max(T::min_positive_value());
        let mut residue = T::zero();
        let mut values = Vec::with_capacity(state.values.len());
        for c in &self.x_major {
            residue = residue.max(Float::abs(c.im));
            values.push(c.re);
        }
        self.last_residue = residue / scale;
        let limit = T::roundoff_floor(IMAGINARY_RESIDUE_LIMIT);
        if !(self.last_residue <= limit) {
            if !self.last_residue.is_finite() {
                return Err(Error::NonFinite {
                    what: "phase-space state",
                });
            }
            return Err(Error::ImaginaryResidue {
                residue: self.last_residue.to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            });
        }
        QuasiDistribution::new(self.grid, values, state.z + self.dz, state.kind)
    }

    /// Drops cached kick multipliers (needed if the same propagator is reused
    /// with a different potential).
    pub fn reset_cache(&mut self) {
        self.kick_cache = None;
    }
}

/// One Strang step of the phase-space equation selected by `plan.generator`.
pub fn step_phase_space<T: Real>(
    state: &QuasiDistribution<T>,
    spec: &PotentialSpec<T>,
    epsilon: T,
    plan: &StepPlan<T>,
) -> Result<QuasiDistribution<T>> {
    PhaseSpacePropagator::new(state.grid, epsilon, plan.dz, plan.generator)?.step(state, spec)
}

/// Snapshots and per-step moments of a phase-space run.
#[derive(Debug, Clone)]
pub struct PhaseSpaceTrajectory<T> {
    /// `(step, state)` at the snapshot cadence, always including the initial
    /// and final states.
    pub snapshots: Vec<(usize, QuasiDistribution<T>)>,
    /// Moments after every step, starting with the initial state.
    pub moments: Vec<BeamMoments<T>>,
    /// Largest relative imaginary residue discarded over the run.
    pub max_residue: T,
}

impl<T> PhaseSpaceTrajectory<T> {
    pub fn final_state(&self) -> &QuasiDistribution<T> {
        &self.snapshots.last().expect("at least one snapshot").1
    }
}

pub fn evolve_phase_space<T: Real>(
    state: &QuasiDistribution<T>,
    spec: &PotentialSpec<T>,
    epsilon: T,
    plan: &StepPlan<T>,
    snapshot_every: usize,
) -> Result<PhaseSpaceTrajectory<T>> {
    evolve_phase_space_with(state, spec, epsilon, plan, snapshot_every, |_, _| {})
}

/// As [`evolve_phase_space`], calling `observer(step, state)` on the initial
/// state and after every step.
pub fn evolve_phase_space_with<T: Real, F>(
    state: &QuasiDistribution<T>,
    spec: &PotentialSpec<T>,
    epsilon: T,
    plan: &StepPlan<T>,
    snapshot_every: usize,
    mut observer: F,
) -> Result<PhaseSpaceTrajectory<T>>
where
    F: FnMut(usize, &QuasiDistribution<T>),
{
    let mut moments = vec![moments_of(state)?];
    let mut snapshots = vec![(0, state.clone())];
    observer(0, state);
    if plan.n_steps == 0 {
        return Ok(PhaseSpaceTrajectory {
            snapshots,
            moments,
            max_residue: T::zero(),
        });
    }
    let mut prop = PhaseSpacePropagator::new(state.grid, epsilon, plan.dz, plan.generator)?;
    let mut current = state.clone();
    let mut max_residue = T::zero();
    for step in 1..=plan.n_steps {
        current = prop
            .step(&current, spec)
            .map_err(|e| e.at_step(step))?;
        max_residue = max_residue.max(prop.last_residue());
        moments.push(moments_of(&current).map_err(|e| e.at_step(step))?);
        observer(step, &current);
        if is_snapshot(step, plan.n_steps, snapshot_every) {
            snapshots.push((step, current.clone()));
        }
    }
    Ok(PhaseSpaceTrajectory {
        snapshots,
        moments,
        max_residue,
    })
}
