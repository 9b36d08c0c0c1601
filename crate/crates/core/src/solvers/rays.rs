use super::{is_snapshot, StepPlan};
use crate::diagnostics::{moments_of, BeamMoments};
use crate::error::Result;
use crate::num::Real;
use crate::potential::PotentialSpec;
use crate::state::RayEnsemble;

/// Snapshots and moment history of a traced ensemble.
#[derive(Debug, Clone)]
pub struct RayTrajectory<T> {
    pub snapshots: Vec<(usize, RayEnsemble<T>)>,
    /// Moments after every step; empty when fewer than two rays are live.
    pub moments: Vec<BeamMoments<T>>,
    /// Rays flagged for non-finite orbits by the end of the run.
    pub flagged: usize,
}

impl<T> RayTrajectory<T> {
    pub fn final_ensemble(&self) -> &RayEnsemble<T> {
        &self.snapshots.last().expect("at least one snapshot").1
    }
}

/// Integrates `dx/dz = p`, `dp/dz = -U'(x)` with kick-drift-kick leapfrog.
///
/// Both half kicks use the potential sampled at the step midpoint. A ray whose
/// update is non-finite is flagged, frozen at its last finite coordinates and
/// left out of the moments.
pub fn trace_rays<T: Real>(
    ensemble: &RayEnsemble<T>,
    spec: &PotentialSpec<T>,
    plan: &StepPlan<T>,
    snapshot_every: usize,
) -> Result<RayTrajectory<T>> {
    let mut rays = ensemble.clone();
    let record = |r: &RayEnsemble<T>, out: &mut Vec<BeamMoments<T>>| {
        if r.len() - r.flagged_count() >= 2 {
            if let Ok(m) = moments_of(r) {
                out.push(m);
            }
        }
    };
    let mut moments = Vec::with_capacity(plan.n_steps + 1);
    record(&rays, &mut moments);
    let mut snapshots = vec![(0, rays.clone())];
    let dz = plan.dz;
    let half = dz / T::lit(2.0);
    let free = spec.is_free_space();
    let constant_poly = spec.is_z_independent().then(|| spec.polynomial_at(T::zero()));

    for step in 1..=plan.n_steps {
        let z0 = rays.z;
        let poly = match &constant_poly {
            Some(p) => p.clone(),
            None => spec.polynomial_at(z0 + half),
        };
        for i in 0..rays.len() {
            if rays.flagged[i] {
                continue;
            }
            let (mut x, mut p) = (rays.x[i], rays.p[i]);
            if free {
                x = x + p * dz;
            } else {
                p = p - half * poly.taylor(1, x);
                x = x + p * dz;
                p = p - half * poly.taylor(1, x);
            }
            if x.is_finite() && p.is_finite() {
                rays.x[i] = x;
                rays.p[i] = p;
            } else {
                rays.flagged[i] = true;
            }
        }
        rays.z = z0 + dz;
        record(&rays, &mut moments);
        if is_snapshot(step, plan.n_steps, snapshot_every) {
            snapshots.push((step, rays.clone()));
        }
    }
    let flagged = rays.flagged_count();
    Ok(RayTrajectory {
        snapshots,
        moments,
        flagged,
    })
}
