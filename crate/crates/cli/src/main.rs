use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pfdtd_cli::{build_materials, cfl_for, load_config, run_experiment, CliError, RunConfig};
use pfdtd_core::{assemble_system, GridIndex, SystemKind};

#[derive(Parser)]
#[command(name = "pfdtd", version, about = "Potentials-based FDTD solver and energy auditor")]
struct Cli {
    /// Worker threads for the solver (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Scalar,
    Vector,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the CFL time step for a config's grid and materials.
    Cfl {
        #[arg(long)]
        config: PathBuf,
    },
    /// Dump the assembled state-space matrices as triplets.
    Assemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cavity run on the preset 90×30×30 grid.
    Cavity {
        #[arg(long, default_value_t = 0.999)]
        dt_factor: f64,
        #[arg(long, default_value_t = 600)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Largest grid dimension accepted by `assemble`.
const ASSEMBLE_MAX_CELLS: usize = 5;

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config { line: None, msg: format!("--threads: {e}") })?;
    }
    let mut log = std::io::stderr();
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let out = out.or_else(|| cfg.out.clone()).ok_or_else(|| CliError::Config {
                line: None,
                msg: "no output directory: pass --out or set `out`".into(),
            })?;
            run_experiment(&cfg, &out, &mut log)?;
        }
        Command::Cfl { config } => {
            let cfg = load_config(&config)?;
            let grid = GridIndex::new(cfg.grid)?;
            let m = build_materials(&cfg, &grid)?;
            let cfl = cfl_for(&cfg, &m)?;
            println!("cfl_dt = {cfl:.16e}");
            println!("dt = {:.16e}", cfl * cfg.dt_factor);
        }
        Command::Assemble { config, system, out } => {
            let cfg = load_config(&config)?;
            let g = &cfg.grid;
            if g.nx.max(g.ny).max(g.nz) > ASSEMBLE_MAX_CELLS {
                return Err(CliError::Config {
                    line: None,
                    msg: format!("assemble supports grids up to {0}×{0}×{0}", ASSEMBLE_MAX_CELLS),
                });
            }
            let grid = GridIndex::new(cfg.grid)?;
            let m = build_materials(&cfg, &grid)?;
            let dt = cfg.dt_factor * cfl_for(&cfg, &m)?;
            let which = match system {
                SystemArg::Scalar => SystemKind::Scalar,
                SystemArg::Vector => SystemKind::Vector,
            };
            let sys = assemble_system(&grid, &m, dt, which)?;
            let f = std::fs::File::create(&out)?;
            sys.write_triplets(std::io::BufWriter::new(f))?;
        }
        Command::Cavity { dt_factor, steps, out } => {
            if !(dt_factor.is_finite() && dt_factor > 0.0) || steps == 0 {
                return Err(CliError::Config {
                    line: None,
                    msg: "dt-factor must be positive and steps at least 1".into(),
                });
            }
            run_experiment(&RunConfig::preset_cavity(dt_factor, steps), &out, &mut log)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
