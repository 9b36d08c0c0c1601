//! Scenario files: a sectioned TOML document describing grid, beam, physics,
//! potential, run and output settings.
//!
//! [`load_scenario`] parses and validates a file and returns a
//! [`ScenarioConfig`] in which every optional key has been replaced by the
//! value actually used, so the resolved config can be written back out and
//! re-run with identical results.

use std::path::{Path, PathBuf};

use quasibeam_core::state::superposition_wavefield;
use quasibeam_core::{
    emittance_from_thermal, gaussian_wavefield, AxisGrid, CoefficientProfile, PhaseGrid,
    PotentialSpec, PotentialTerm,
};
use serde::{Deserialize, Serialize};

/// Environment variable that replaces the default output directory.
pub const OUTPUT_DIR_ENV: &str = "QUASIBEAM_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "quasibeam-out";
pub const DEFAULT_RAY_COUNT: usize = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: cannot read scenario: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridConfig,
    pub beam: BeamConfig,
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub np: usize,
    pub x_length: f64,
    pub p_length: f64,
    #[serde(default)]
    pub x_center: f64,
    #[serde(default)]
    pub p_center: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamKind {
    #[default]
    Gaussian,
    Superposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    #[serde(default)]
    pub kind: BeamKind,
    pub sigma0: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
    /// Peak separation of a superposition; defaults to `4 sigma0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vth_over_c: Option<f64>,
    /// Width entering `epsilon = 2 (v_th/c) sigma0`; defaults to `beam.sigma0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    FreeSpace,
    LinearLens,
    Quartic,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub power: u32,
    pub coefficient: f64,
}

/// z-dependence applied to every coefficient.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    #[default]
    Constant,
    /// `c cos(omega z + phase)`.
    Harmonic {
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Repeating cell of `[length, factor]` elements.
    Lattice { cells: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(default)]
    pub preset: Preset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermConfig>,
    #[serde(default)]
    pub profile: ProfileConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Twm,
    Moyal,
    Liouville,
    Rays,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Twm => "twm",
            Engine::Moyal => "moyal",
            Engine::Liouville => "liouville",
            Engine::Rays => "rays",
        }
    }
}

pub const DEFAULT_ENGINES: [Engine; 3] = [Engine::Twm, Engine::Moyal, Engine::Liouville];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dz: f64,
    pub n_steps: usize,
    /// Defaults to `max(1, n_steps / 10)`; 0 keeps only the end points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub engines: Vec<Engine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray_count: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    GridDump,
    Heatmap,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<OutputFormat>>,
}

impl ScenarioConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((0, 0));
            ConfigError::Parse {
                path: path.to_path_buf(),
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    /// Serializes the config so that it parses and resolves back to itself.
    /// An emittance derived from the thermal pair is left out.
    pub fn to_toml(&self) -> String {
        let mut out = self.clone();
        if out.physics.vth_over_c.is_some() {
            out.physics.epsilon = None;
        }
        toml::to_string_pretty(&out).expect("scenario config serializes")
    }

    pub fn epsilon(&self) -> f64 {
        self.physics.epsilon.expect("resolved config")
    }

    pub fn snapshot_every(&self) -> usize {
        self.run.snapshot_every.expect("resolved config")
    }

    pub fn ray_count(&self) -> usize {
        self.run.ray_count.unwrap_or(DEFAULT_RAY_COUNT)
    }

    pub fn separation(&self) -> f64 {
        self.beam.separation.unwrap_or(0.0)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.directory.clone().expect("resolved config")
    }

    pub fn formats(&self) -> &[OutputFormat] {
        self.output.formats.as_deref().unwrap_or(&[])
    }

    pub fn has_engine(&self, e: Engine) -> bool {
        self.run.engines.contains(&e)
    }

    pub fn phase_grid(&self) -> PhaseGrid<f64> {
        let g = &self.grid;
        PhaseGrid::new(
            AxisGrid::new(g.nx, g.x_length, g.x_center).expect("validated grid"),
            AxisGrid::new(g.np, g.p_length, g.p_center).expect("validated grid"),
        )
    }

    pub fn potential_spec(&self) -> PotentialSpec<f64> {
        build_potential(&self.potential).expect("validated potential")
    }

    /// Fills every default and checks all preconditions that do not need a
    /// solver run.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        let g = &self.grid;
        for (key, n) in [("grid.nx", g.nx), ("grid.np", g.np)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(invalid(key, format!("{n} is not a power of two >= 8")));
            }
        }
        for (key, v) in [("grid.x_length", g.x_length), ("grid.p_length", g.p_length)] {
            positive(key, v)?;
        }
        for (key, v) in [("grid.x_center", g.x_center), ("grid.p_center", g.p_center)] {
            finite(key, v)?;
        }

        positive("beam.sigma0", self.beam.sigma0)?;
        finite("beam.x0", self.beam.x0)?;
        finite("beam.p0", self.beam.p0)?;
        match self.beam.kind {
            BeamKind::Gaussian => {
                if self.beam.separation.is_some() {
                    return Err(invalid("beam.separation", "only used by kind = \"superposition\""));
                }
            }
            BeamKind::Superposition => {
                let sep = *self.beam.separation.get_or_insert(4.0 * self.beam.sigma0);
                positive("beam.separation", sep)?;
            }
        }

        let ph = &mut self.physics;
        match (ph.epsilon, ph.vth_over_c) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "physics.epsilon",
                    "give either epsilon or vth_over_c, not both",
                ))
            }
            (None, None) => {
                return Err(invalid("physics.epsilon", "one of epsilon or vth_over_c is required"))
            }
            (Some(eps), None) => {
                if ph.sigma0.is_some() {
                    return Err(invalid("physics.sigma0", "only used together with vth_over_c"));
                }
                positive("physics.epsilon", eps)?;
            }
            (None, Some(v)) => {
                let sigma0 = *ph.sigma0.get_or_insert(self.beam.sigma0);
                let t = emittance_from_thermal(v, sigma0).map_err(|e| {
                    let key = if v > 0.0 { "physics.sigma0" } else { "physics.vth_over_c" };
                    invalid(key, e.to_string())
                })?;
                ph.epsilon = Some(t.epsilon);
            }
        }

        build_potential(&self.potential)?;

        let run = &mut self.run;
        positive("run.dz", run.dz)?;
        run.snapshot_every.get_or_insert((run.n_steps / 10).max(1));
        if run.engines.is_empty() {
            run.engines = DEFAULT_ENGINES.to_vec();
        }
        run.engines.sort();
        run.engines.dedup();
        if run.engines.contains(&Engine::Rays) {
            let n = *run.ray_count.get_or_insert(DEFAULT_RAY_COUNT);
            if n < 2 {
                return Err(invalid("run.ray_count", "at least two rays are needed for moments"));
            }
        } else if run.ray_count.is_some() {
            return Err(invalid("run.ray_count", "only used when engines include \"rays\""));
        }

        let out = &mut self.output;
        if out.directory.is_none() {
            out.directory = Some(
                std::env::var_os(OUTPUT_DIR_ENV)
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            );
        }
        let formats = out.formats.get_or_insert_with(|| {
            vec![OutputFormat::Csv, OutputFormat::GridDump, OutputFormat::Heatmap]
        });
        formats.sort();
        formats.dedup();

        self.check_initial_states()?;
        Ok(self)
    }

    fn check_initial_states(&self) -> Result<(), ConfigError> {
        let grid = self.phase_grid();
        let b = &self.beam;
        let eps = self.epsilon();
        let built = match b.kind {
            BeamKind::Gaussian => gaussian_wavefield(grid.x, b.sigma0, b.x0, b.p0, eps).map(|_| ()),
            BeamKind::Superposition => {
                superposition_wavefield(grid.x, b.sigma0, b.x0, b.p0, self.separation(), eps)
                    .map(|_| ())
            }
        };
        built.map_err(|e| invalid("grid.x_length", format!("initial beam does not fit: {e}")))?;
        let half_width = 0.5 * self.grid.p_length;
        let p_spread = (b.p0 - self.grid.p_center).abs() + 8.0 * eps / (2.0 * b.sigma0);
        if p_spread > half_width {
            return Err(invalid(
                "grid.p_length",
                format!("momentum window +/-{half_width} does not hold the beam (needs {p_spread:.3})"),
            ));
        }
        Ok(())
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("{v} must be positive and finite")))
    }
}

fn finite(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("{v} must be finite")))
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn build_potential(p: &PotentialConfig) -> Result<PotentialSpec<f64>, ConfigError> {
    let need = |key: &str, v: Option<f64>| v.ok_or_else(|| invalid(key, "required by this preset"));
    let forbid = |key: &str, present: bool| {
        if present {
            Err(invalid(key, "not used by this preset"))
        } else {
            Ok(())
        }
    };
    let base: Vec<(u32, f64)> = match p.preset {
        Preset::FreeSpace => {
            forbid("potential.k", p.k.is_some())?;
            forbid("potential.lambda", p.lambda.is_some())?;
            forbid("potential.terms", !p.terms.is_empty())?;
            Vec::new()
        }
        Preset::LinearLens => {
            forbid("potential.lambda", p.lambda.is_some())?;
            forbid("potential.terms", !p.terms.is_empty())?;
            let k = need("potential.k", p.k)?;
            positive("potential.k", k)?;
            vec![(2, k / 2.0)]
        }
        Preset::Quartic => {
            forbid("potential.terms", !p.terms.is_empty())?;
            let k = need("potential.k", p.k)?;
            let lambda = need("potential.lambda", p.lambda)?;
            finite("potential.k", k)?;
            finite("potential.lambda", lambda)?;
            vec![(2, k / 2.0), (4, lambda)]
        }
        Preset::Custom => {
            forbid("potential.k", p.k.is_some())?;
            forbid("potential.lambda", p.lambda.is_some())?;
            p.terms.iter().map(|t| (t.power, t.coefficient)).collect()
        }
    };
    let profile = |c: f64| -> Result<CoefficientProfile<f64>, ConfigError> {
        Ok(match &p.profile {
            ProfileConfig::Constant => CoefficientProfile::Constant(c),
            ProfileConfig::Harmonic { omega, phase } => CoefficientProfile::Harmonic {
                amplitude: c,
                omega: *omega,
                phase: *phase,
            },
            ProfileConfig::Lattice { cells } => {
                if cells.is_empty() || cells.iter().any(|[len, _]| !(*len > 0.0)) {
                    return Err(invalid(
                        "potential.profile.cells",
                        "needs at least one [length, factor] pair with positive length",
                    ));
                }
                CoefficientProfile::Lattice(cells.iter().map(|[l, f]| (*l, f * c)).collect())
            }
        })
    };
    let terms = base
        .into_iter()
        .map(|(power, c)| Ok(PotentialTerm { power, profile: profile(c)? }))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    PotentialSpec::new(terms).map_err(|e| invalid("potential.terms", e.to_string()))
}

/// Reads, parses and resolves a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioConfig::parse(&text, path)?.resolve()
}
