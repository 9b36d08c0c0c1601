//! Builds initial states from a resolved scenario, runs the requested
//! engines side by side and collects moment series, diagnostics and
//! cross-engine distances.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use quasibeam_core::diagnostics::PARAXIAL_WARNING_THRESHOLD;
use quasibeam_core::solvers::{
    evolve_phase_space_with, evolve_twm_with, is_snapshot, IMAGINARY_RESIDUE_LIMIT,
};
use quasibeam_core::state::{
    incoherent_pair_quasidist, superposition_wavefield, BOUNDARY_DECAY, NORMALIZATION_TOL,
    RNG_ALGORITHM, SAMPLING_NEGATIVE_MASS_LIMIT,
};
use quasibeam_core::transforms::{MARGINAL_TOL, WIGNER_RESIDUE_TOL};
use quasibeam_core::{
    gaussian_quasidist, gaussian_wavefield, negativity, sample_rays, trace_rays,
    truncation_ratio, uncertainty_check, wigner_transform, BeamMoments, Error as CoreError,
    PotentialSpec, QuasiDistribution, StepPlan, WaveField,
};
use serde::Serialize;

use crate::config::{BeamKind, Engine, OutputFormat, ScenarioConfig};
use crate::output::{
    write_csv, write_grid_dump, write_heatmap, CsvRow, OutputError,
};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("engine {engine}: {source}")]
    Engine {
        engine: &'static str,
        #[source]
        source: CoreError,
    },
    #[error(transparent)]
    Output(#[from] OutputError),
}

fn engine_err(engine: Engine) -> impl FnOnce(CoreError) -> RunError {
    move |source| RunError::Engine {
        engine: engine.name(),
        source,
    }
}

/// Every threshold a run depends on, recorded in the report.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub imaginary_residue_limit: f64,
    pub wigner_residue_tol: f64,
    pub wigner_marginal_tol: f64,
    pub uncertainty_slack: f64,
    pub sampling_negative_mass_limit: f64,
    pub boundary_decay: f64,
    pub normalization_tol: f64,
    pub paraxial_warning_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            imaginary_residue_limit: IMAGINARY_RESIDUE_LIMIT,
            wigner_residue_tol: WIGNER_RESIDUE_TOL,
            wigner_marginal_tol: MARGINAL_TOL,
            uncertainty_slack: quasibeam_core::diagnostics::UNCERTAINTY_SLACK,
            sampling_negative_mass_limit: SAMPLING_NEGATIVE_MASS_LIMIT,
            boundary_decay: BOUNDARY_DECAY,
            normalization_tol: NORMALIZATION_TOL,
            paraxial_warning_threshold: PARAXIAL_WARNING_THRESHOLD,
        }
    }
}

/// One recorded step of an engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub step: usize,
    pub z: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub sigma_xp: f64,
    pub emittance: f64,
    pub uncertainty_product: f64,
    /// `None` where the engine has no phase-space density at this step.
    pub negativity_volume: Option<f64>,
    /// `None` where undefined (force-free state) or not evaluated.
    pub r3: Option<f64>,
}

impl SeriesPoint {
    fn new(step: usize, m: &BeamMoments<f64>) -> Self {
        Self {
            step,
            z: m.z,
            mean_x: m.mean_x,
            mean_p: m.mean_p,
            sigma_x: m.sigma_x,
            sigma_p: m.sigma_p,
            sigma_xp: m.sigma_xp,
            emittance: m.emittance_rms,
            uncertainty_product: m.uncertainty_product(),
            negativity_volume: None,
            r3: None,
        }
    }

    pub fn csv_row(&self) -> CsvRow {
        CsvRow([
            self.z,
            self.mean_x,
            self.mean_p,
            self.sigma_x,
            self.sigma_p,
            self.sigma_xp,
            self.emittance,
            self.uncertainty_product,
            self.negativity_volume.unwrap_or(f64::NAN),
            self.r3.unwrap_or(f64::NAN),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativitySummary {
    pub min_value: f64,
    pub negative_mass: f64,
    pub negativity_volume: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineReport {
    pub engine: Engine,
    pub wall_clock_s: f64,
    pub snapshot_steps: Vec<usize>,
    pub series: Vec<SeriesPoint>,
    pub final_negativity: Option<NegativitySummary>,
    pub flagged_rays: Option<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Distance {
    pub a: Engine,
    pub b: Engine,
    pub step: usize,
    pub z: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub rng_algorithm: String,
    pub tolerances: Tolerances,
    pub engines: Vec<EngineReport>,
    pub distances: Vec<Distance>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn engine(&self, e: Engine) -> Option<&EngineReport> {
        self.engines.iter().find(|r| r.engine == e)
    }

    /// Distances between `a` and `b` in snapshot order, in either orientation.
    pub fn distances_between(&self, a: Engine, b: Engine) -> Vec<&Distance> {
        self.distances
            .iter()
            .filter(|d| (d.a == a && d.b == b) || (d.a == b && d.b == a))
            .collect()
    }
}

/// A finished run: the report plus the phase-space snapshots of each grid
/// engine (TWM snapshots are stored as their Wigner transforms).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub snapshots: BTreeMap<Engine, Vec<(usize, QuasiDistribution<f64>)>>,
}

struct EngineRun {
    report: EngineReport,
    snapshots: Vec<(usize, QuasiDistribution<f64>)>,
}

pub fn initial_wavefield(cfg: &ScenarioConfig) -> Result<WaveField<f64>, CoreError> {
    let b = &cfg.beam;
    let gx = cfg.phase_grid().x;
    match b.kind {
        BeamKind::Gaussian => gaussian_wavefield(gx, b.sigma0, b.x0, b.p0, cfg.epsilon()),
        BeamKind::Superposition => {
            superposition_wavefield(gx, b.sigma0, b.x0, b.p0, cfg.separation(), cfg.epsilon())
        }
    }
}

/// Classical analogue of the initial beam: the minimum-spread Gaussian, or
/// the incoherent mixture of the two superposed Gaussians.
pub fn initial_classical(cfg: &ScenarioConfig) -> Result<QuasiDistribution<f64>, CoreError> {
    let b = &cfg.beam;
    let grid = cfg.phase_grid();
    let eps = cfg.epsilon();
    match b.kind {
        BeamKind::Gaussian => {
            gaussian_quasidist(grid, b.sigma0, eps / (2.0 * b.sigma0), 0.0, b.x0, b.p0)
        }
        BeamKind::Superposition => {
            incoherent_pair_quasidist(grid, b.sigma0, b.x0, b.p0, cfg.separation(), eps)
        }
    }
}

fn uncertainty_warnings(engine: Engine, series: &[SeriesPoint], epsilon: f64) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(p) = series.iter().find(|p| {
        let m = BeamMoments::from_central(p.z, 0.0, 0.0, p.sigma_x.powi(2), p.sigma_p.powi(2), p.sigma_xp);
        !uncertainty_check(&m, epsilon).satisfied
    }) {
        out.push(format!(
            "{}: sigma_x sigma_p = {:e} below epsilon/2 at step {} (grid truncation?)",
            engine.name(),
            p.uncertainty_product,
            p.step
        ));
    }
    out
}

fn run_twm(cfg: &ScenarioConfig, spec: &PotentialSpec<f64>, plan: &StepPlan<f64>) -> Result<EngineRun, RunError> {
    let err = engine_err(Engine::Twm);
    let psi0 = initial_wavefield(cfg).map_err(err)?;
    let p_axis = cfg.phase_grid().p;
    let every = cfg.snapshot_every();
    let mut snapshots = Vec::new();
    let mut extra: BTreeMap<usize, (f64, Option<f64>)> = BTreeMap::new();
    let mut warnings = Vec::new();
    let traj = evolve_twm_with(&psi0, spec, plan, every, |step, psi| {
        if !is_snapshot(step, plan.n_steps, every) {
            return;
        }
        match wigner_transform(psi, p_axis) {
            Ok(w) => {
                let neg = negativity(&w).negativity_volume;
                extra.insert(step, (neg, truncation_ratio(&w, spec, psi.epsilon, psi.z)));
                snapshots.push((step, w));
            }
            Err(e) => warnings.push(format!("twm: no Wigner snapshot at step {step}: {e}")),
        }
    })
    .map_err(engine_err(Engine::Twm))?;
    let series = traj
        .moments
        .iter()
        .enumerate()
        .map(|(step, m)| {
            let mut p = SeriesPoint::new(step, m);
            if let Some((neg, r3)) = extra.get(&step) {
                p.negativity_volume = Some(*neg);
                p.r3 = *r3;
            }
            p
        })
        .collect::<Vec<_>>();
    warnings.extend(uncertainty_warnings(Engine::Twm, &series, cfg.epsilon()));
    let final_negativity = snapshots.last().filter(|(s, _)| *s == plan.n_steps).map(|(_, w)| summary(w));
    Ok(EngineRun {
        report: EngineReport {
            engine: Engine::Twm,
            wall_clock_s: 0.0,
            snapshot_steps: traj.snapshots.iter().map(|(s, _)| *s).collect(),
            series,
            final_negativity,
            flagged_rays: None,
            warnings,
        },
        snapshots,
    })
}

fn summary(rho: &QuasiDistribution<f64>) -> NegativitySummary {
    let r = negativity(rho);
    NegativitySummary {
        min_value: r.min_value,
        negative_mass: r.negative_mass,
        negativity_volume: r.negativity_volume,
    }
}

fn run_grid(
    engine: Engine,
    cfg: &ScenarioConfig,
    spec: &PotentialSpec<f64>,
    plan: &StepPlan<f64>,
) -> Result<EngineRun, RunError> {
    let err = engine_err(engine);
    let initial = if engine == Engine::Moyal {
        let psi0 = initial_wavefield(cfg).map_err(engine_err(engine))?;
        wigner_transform(&psi0, cfg.phase_grid().p).map_err(engine_err(engine))?
    } else {
        initial_classical(cfg).map_err(engine_err(engine))?
    };
    let eps = cfg.epsilon();
    let mut diag = Vec::with_capacity(plan.n_steps + 1);
    let traj = evolve_phase_space_with(&initial, spec, eps, plan, cfg.snapshot_every(), |_, rho| {
        diag.push((negativity(rho).negativity_volume, truncation_ratio(rho, spec, eps, rho.z)));
    })
    .map_err(err)?;
    let series: Vec<SeriesPoint> = traj
        .moments
        .iter()
        .zip(&diag)
        .enumerate()
        .map(|(step, (m, (neg, r3)))| {
            let mut p = SeriesPoint::new(step, m);
            p.negativity_volume = Some(*neg);
            p.r3 = *r3;
            p
        })
        .collect();
    let mut warnings = uncertainty_warnings(engine, &series, eps);
    if engine == Engine::Liouville {
        let min = traj.snapshots.iter().map(|(_, s)| s.min()).fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            warnings.push(format!("liouville: spectral ringing, min density {min:e}"));
        }
    }
    Ok(EngineRun {
        report: EngineReport {
            engine,
            wall_clock_s: 0.0,
            snapshot_steps: traj.snapshots.iter().map(|(s, _)| *s).collect(),
            series,
            final_negativity: Some(summary(traj.final_state())),
            flagged_rays: None,
            warnings,
        },
        snapshots: traj.snapshots,
    })
}

fn run_rays(cfg: &ScenarioConfig, spec: &PotentialSpec<f64>, plan: &StepPlan<f64>) -> Result<EngineRun, RunError> {
    let err = engine_err(Engine::Rays);
    let classical = initial_classical(cfg).map_err(engine_err(Engine::Rays))?;
    let rays = sample_rays(&classical, cfg.ray_count(), cfg.run.seed).map_err(engine_err(Engine::Rays))?;
    let traj = trace_rays(&rays, spec, plan, cfg.snapshot_every()).map_err(err)?;
    let mut warnings = Vec::new();
    if rays.clipped_mass > 0.0 {
        warnings.push(format!("rays: clipped negative mass {:e} before sampling", rays.clipped_mass));
    }
    if traj.flagged > 0 {
        warnings.push(format!("rays: {} rays left the finite range and were excluded", traj.flagged));
    }
    Ok(EngineRun {
        report: EngineReport {
            engine: Engine::Rays,
            wall_clock_s: 0.0,
            snapshot_steps: traj.snapshots.iter().map(|(s, _)| *s).collect(),
            series: traj
                .moments
                .iter()
                .enumerate()
                .map(|(step, m)| SeriesPoint::new(step, m))
                .collect(),
            final_negativity: None,
            flagged_rays: Some(traj.flagged),
            warnings,
        },
        snapshots: Vec::new(),
    })
}

fn run_engine(
    engine: Engine,
    cfg: &ScenarioConfig,
    spec: &PotentialSpec<f64>,
) -> Result<EngineRun, RunError> {
    let start = Instant::now();
    let plan = match engine {
        Engine::Twm | Engine::Moyal => StepPlan::moyal(cfg.run.dz, cfg.run.n_steps),
        Engine::Liouville | Engine::Rays => StepPlan::classical(cfg.run.dz, cfg.run.n_steps),
    }
    .map_err(engine_err(engine))?;
    let mut run = match engine {
        Engine::Twm => run_twm(cfg, spec, &plan),
        Engine::Moyal | Engine::Liouville => run_grid(engine, cfg, spec, &plan),
        Engine::Rays => run_rays(cfg, spec, &plan),
    }?;
    run.report.wall_clock_s = start.elapsed().as_secs_f64();
    Ok(run)
}

/// Runs every requested engine (concurrently) and compares the phase-space
/// snapshots of each pair of grid engines.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutcome, RunError> {
    let spec = cfg.potential_spec();
    let results: Vec<Result<EngineRun, RunError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .run
            .engines
            .iter()
            .map(|&e| {
                let spec = &spec;
                scope.spawn(move || run_engine(e, cfg, spec))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("engine thread panicked"))
            .collect()
    });

    let mut engines = Vec::new();
    let mut snapshots = BTreeMap::new();
    let mut warnings = Vec::new();
    if let Some(v) = cfg.physics.vth_over_c {
        if v > PARAXIAL_WARNING_THRESHOLD {
            warnings.push(format!("vth_over_c = {v} is outside the paraxial regime"));
        }
    }
    for r in results {
        let run = r?;
        warnings.extend(run.report.warnings.iter().cloned());
        snapshots.insert(run.report.engine, run.snapshots);
        engines.push(run.report);
    }

    let pairs = [
        (Engine::Moyal, Engine::Liouville),
        (Engine::Twm, Engine::Moyal),
        (Engine::Twm, Engine::Liouville),
    ];
    let mut distances = Vec::new();
    for (a, b) in pairs {
        let (Some(sa), Some(sb)) = (snapshots.get(&a), snapshots.get(&b)) else {
            continue;
        };
        for (step, ra) in sa {
            if let Some((_, rb)) = sb.iter().find(|(s, _)| s == step) {
                if let Ok(linf) = ra.linf_distance(rb) {
                    distances.push(Distance {
                        a,
                        b,
                        step: *step,
                        z: ra.z,
                        linf,
                    });
                }
            }
        }
    }

    Ok(RunOutcome {
        report: RunReport {
            config: cfg.clone(),
            rng_algorithm: RNG_ALGORITHM.to_string(),
            tolerances: Tolerances::default(),
            engines,
            distances,
            warnings,
        },
        snapshots,
    })
}

/// Writes the resolved config, the report and the requested artifacts into
/// the configured output directory; returns the files written.
pub fn emit_outputs(outcome: &RunOutcome, cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, OutputError> {
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|source| OutputError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut written = Vec::new();
    let io = |path: &PathBuf| {
        let path = path.clone();
        move |source| OutputError::Io { path, source }
    };

    let resolved = dir.join("scenario.toml");
    std::fs::write(&resolved, cfg.to_toml()).map_err(io(&resolved))?;
    written.push(resolved);

    let formats = cfg.formats();
    for report in &outcome.report.engines {
        let name = report.engine.name();
        if formats.contains(&OutputFormat::Csv) {
            let path = dir.join(format!("{name}.csv"));
            let rows: Vec<CsvRow> = report.series.iter().map(SeriesPoint::csv_row).collect();
            write_csv(&path, &rows)?;
            written.push(path);
        }
        for (step, rho) in outcome.snapshots.get(&report.engine).into_iter().flatten() {
            if formats.contains(&OutputFormat::GridDump) {
                let path = dir.join(format!("{name}_{step:06}.mbgd"));
                write_grid_dump(&path, rho, cfg.epsilon())?;
                written.push(path);
            }
            if formats.contains(&OutputFormat::Heatmap) {
                let path = dir.join(format!("{name}_{step:06}.pgm"));
                write_heatmap(&path, rho)?;
                written.push(path.with_extension("txt"));
                written.push(path);
            }
        }
    }

    let report_path = dir.join("report.json");
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    std::fs::write(&report_path, json).map_err(io(&report_path))?;
    written.push(report_path);
    Ok(written)
}
