use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quasibeam_cli::config::{ConfigError, Engine, ScenarioConfig, OUTPUT_DIR_ENV};
use quasibeam_cli::output::read_grid_dump;
use quasibeam_cli::{emit_outputs, run_scenario};

/// Phase-space transport of charged-particle beams with classical, Moyal and
/// thermal-wave engines.
#[derive(Parser)]
#[command(name = "quasibeam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Output directory; overrides the scenario file.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    /// RNG seed for ray sampling; overrides the scenario file.
    #[arg(long)]
    seed: Option<u64>,
    /// Print nothing but errors.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the engines listed in the scenario.
    Run(RunArgs),
    /// Run the wave, Moyal and Liouville engines and report their distances.
    Compare(RunArgs),
    /// Check a scenario file without running it.
    Validate {
        scenario: PathBuf,
    },
    /// Print the header of a grid dump.
    Info {
        dump: PathBuf,
    },
}

const EXIT_RUNTIME: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn load(path: &Path, args: Option<&RunArgs>) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = ScenarioConfig::parse(&text, path)?;
    if let Some(a) = args {
        if let Some(dir) = &a.output_dir {
            cfg.output.directory = Some(dir.clone());
        }
        if let Some(seed) = a.seed {
            cfg.run.seed = seed;
        }
    }
    cfg.resolve()
}

fn run(args: RunArgs, compare: bool) -> ExitCode {
    let mut cfg = match load(&args.scenario, Some(&args)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if compare {
        let rays = cfg.has_engine(Engine::Rays);
        cfg.run.engines = vec![Engine::Twm, Engine::Moyal, Engine::Liouville];
        if rays {
            cfg.run.engines.push(Engine::Rays);
        }
    }
    let outcome = match run_scenario(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    let written = match emit_outputs(&outcome, &cfg) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    if !args.quiet {
        for r in &outcome.report.engines {
            let last = r.series.last();
            println!(
                "{:<10} {:>8.3} s  z = {:<10.4} eps_rms = {:<12.6e} negativity = {}",
                r.engine.name(),
                r.wall_clock_s,
                last.map_or(f64::NAN, |p| p.z),
                last.map_or(f64::NAN, |p| p.emittance),
                r.final_negativity
                    .map_or("-".to_string(), |n| format!("{:.6e}", n.negativity_volume)),
            );
        }
        let last = outcome.report.distances.iter().map(|d| d.step).max();
        for d in outcome.report.distances.iter().filter(|d| Some(d.step) == last) {
            println!("max |{} - {}| at z = {:.4}: {:.6e}", d.a.name(), d.b.name(), d.z, d.linf);
        }
        println!("wrote {} files to {}", written.len(), cfg.output_dir().display());
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args, false),
        Command::Compare(args) => run(args, true),
        Command::Validate { scenario } => match load(&scenario, None) {
            Ok(cfg) => {
                println!(
                    "{}: ok (engines: {})",
                    scenario.display(),
                    cfg.run.engines.iter().map(|e| e.name()).collect::<Vec<_>>().join(", ")
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_INVALID)
            }
        },
        Command::Info { dump } => match read_grid_dump(&dump) {
            Ok(d) => {
                println!("version   {}", d.version);
                println!("grid      {} x {}", d.nx, d.np);
                println!("x window  {} +/- {}", d.x_center, d.x_length / 2.0);
                println!("p window  {} +/- {}", d.p_center, d.p_length / 2.0);
                println!("z         {}", d.z);
                println!("epsilon   {}", d.epsilon);
                println!("mass      {:.12}", d.mass());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_RUNTIME)
            }
        },
    }
}
