//! Experiment orchestration: build, step with audit, write artifacts.

use std::io::Write;
use std::path::Path;

use pfdtd_core::{
    assemble_system, cavity_initial_scalar, cavity_initial_vector, cavity_params_with_modes, cfl_limit,
    cfl_limit_materials, check_positive_definite, eval_cavity, exact_energies, init_scalar, init_vector,
    materials_from_relative, reconstruct_phi, uniform_materials, CavityDrive, CavityField, CavityMode, CompensatedSum,
    Drive, Family, GridIndex, MaterialMaps, PdMethod, PotentialSystem, ScalarState, SystemKind, VectorState, ZeroDrive,
    EPS0, MU0,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{DriveChoice, InitialChoice, MaterialSpec, RunConfig};
use crate::error::CliError;
use crate::timeseries::{write_timeseries_csv, TimeSeriesRow};
use crate::voxel::load_voxels;

/// Grids with every dimension at most this size get a dense PD check.
pub const PD_CHECK_MAX_CELLS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSummary {
    pub steps_completed: u64,
    /// `ok`, or the step at which the state stopped being finite.
    pub status: String,
    /// `positive definite`, `not positive definite` or `skipped`.
    pub pd_check: String,
    pub smallest_scaled_eigenvalue: Option<f64>,
    pub exact_energy: Option<f64>,
    pub initial_storage: f64,
    pub final_storage: f64,
    pub max_abs_residual: f64,
    /// Largest residual over the largest storage magnitude.
    pub max_relative_residual: f64,
    /// Largest `|storage − exact| / exact`.
    pub max_relative_deviation: Option<f64>,
    /// Largest `|init_plus_supplied − storage|`.
    pub max_balance_gap: f64,
    pub initial_max_abs_state: f64,
    pub max_abs_state: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub grid: [usize; 3],
    pub spacing: [f64; 3],
    pub dt: f64,
    pub cfl_dt: f64,
    pub dt_factor: f64,
    pub above_cfl: bool,
    pub steps: usize,
    pub threads: usize,
    pub scalar: Option<SystemSummary>,
    pub vector: Option<SystemSummary>,
}

fn float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn push(out: &mut String, key: &str, value: String) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(&value);
    out.push('\n');
}

impl SystemSummary {
    fn write(&self, out: &mut String) {
        push(out, "steps_completed", self.steps_completed.to_string());
        push(out, "status", format!("{:?}", self.status));
        push(out, "pd_check", format!("{:?}", self.pd_check));
        if let Some(v) = self.smallest_scaled_eigenvalue {
            push(out, "smallest_scaled_eigenvalue", float(v));
        }
        if let Some(v) = self.exact_energy {
            push(out, "exact_energy", float(v));
        }
        push(out, "initial_storage", float(self.initial_storage));
        push(out, "final_storage", float(self.final_storage));
        push(out, "max_abs_residual", float(self.max_abs_residual));
        push(out, "max_relative_residual", float(self.max_relative_residual));
        if let Some(v) = self.max_relative_deviation {
            push(out, "max_relative_deviation", float(v));
        }
        push(out, "max_balance_gap", float(self.max_balance_gap));
        push(out, "initial_max_abs_state", float(self.initial_max_abs_state));
        push(out, "max_abs_state", float(self.max_abs_state));
    }
}

impl Summary {
    /// `key = value` lines with `[scalar]`/`[vector]` sections; valid TOML.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        push(&mut out, "grid", format!("{:?}", self.grid));
        push(&mut out, "spacing", format!("[{}]", self.spacing.map(float).join(", ")));
        push(&mut out, "dt", float(self.dt));
        push(&mut out, "cfl_dt", float(self.cfl_dt));
        push(&mut out, "dt_factor", float(self.dt_factor));
        push(&mut out, "above_cfl", self.above_cfl.to_string());
        push(&mut out, "steps", self.steps.to_string());
        push(&mut out, "threads", self.threads.to_string());
        for (name, s) in [("scalar", &self.scalar), ("vector", &self.vector)] {
            if let Some(s) = s {
                out.push_str(&format!("\n[{name}]\n"));
                s.write(&mut out);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SystemRun {
    pub kind: SystemKind,
    pub rows: Vec<TimeSeriesRow>,
    pub summary: SystemSummary,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub summary: Summary,
    pub runs: Vec<SystemRun>,
}

impl RunReport {
    pub fn run(&self, kind: SystemKind) -> Option<&SystemRun> {
        self.runs.iter().find(|r| r.kind == kind)
    }
}

pub fn build_materials(cfg: &RunConfig, grid: &GridIndex) -> Result<MaterialMaps, CliError> {
    match &cfg.materials {
        MaterialSpec::Uniform { eps_r, mu_r } => Ok(uniform_materials(grid, *eps_r, *mu_r)?),
        MaterialSpec::Voxel { path, format } => {
            let (eps, mu) = load_voxels(path, *format, cfg.grid.cell_count())?;
            materials_from_relative(grid, &eps, &mu).map_err(|e| CliError::Voxel(e.to_string()))
        }
    }
}

/// CFL step: closed form for uniform media, nodal estimate otherwise.
pub fn cfl_for(cfg: &RunConfig, materials: &MaterialMaps) -> Result<f64, CliError> {
    Ok(match &cfg.materials {
        MaterialSpec::Uniform { eps_r, mu_r } => cfl_limit(&cfg.grid, eps_r * EPS0, mu_r * MU0)?,
        MaterialSpec::Voxel { .. } => cfl_limit_materials(&cfg.grid, materials)?,
    })
}

fn cavity_mode(cfg: &RunConfig) -> Result<CavityMode, CliError> {
    Ok(cavity_params_with_modes(cfg.grid.extent(pfdtd_core::Axis::X), cfg.c_a, cfg.modes)?)
}

fn is_vacuum(cfg: &RunConfig) -> bool {
    cfg.materials == MaterialSpec::Uniform { eps_r: 1.0, mu_r: 1.0 }
}

fn random_scalar(grid: &GridIndex, rng: &mut ChaCha8Rng) -> ScalarState {
    let mut s = ScalarState::zeros(grid);
    s.grad_phi.iter_mut().flatten().for_each(|v| *v = rng.gen_range(-1.0..1.0));
    s.dphi_dt.iter_mut().for_each(|v| *v = 3e8 * rng.gen_range(-1.0..1.0));
    s
}

fn random_vector(grid: &GridIndex, rng: &mut ChaCha8Rng) -> VectorState {
    let mut s = VectorState::zeros(grid);
    s.da_dt.iter_mut().flatten().for_each(|v| *v = rng.gen_range(-1.0..1.0));
    s.b.iter_mut().flatten().for_each(|v| *v = rng.gen_range(-1.0..1.0) / 3e8);
    s.kappa.iter_mut().for_each(|v| *v = 3e8 * rng.gen_range(-1.0..1.0));
    s
}

struct Stepped {
    rows: Vec<TimeSeriesRow>,
    initial_storage: f64,
    initial_max: f64,
    failed_at: Option<u64>,
}

fn step_loop<S: PotentialSystem>(
    sim: &mut S,
    drive: &mut dyn Drive,
    steps: usize,
    mut potential: impl FnMut(&S) -> Option<f64>,
) -> Result<Stepped, CliError> {
    let dt = sim.dt();
    let e0 = sim.storage();
    let initial_max = sim.max_abs_state();
    let mut e_prev = e0;
    let mut y_minus = sim.outputs();
    let mut cum = CompensatedSum::new();
    let mut rows = Vec::with_capacity(steps);
    for n in 0..steps as u64 {
        let u = drive.input(n, sim.input_len())?;
        let y_plus = sim.advance(&u)?;
        let supply = sim.supply(&u, &y_minus, &y_plus)?;
        let e = sim.storage();
        let max = sim.max_abs_state();
        let pot = potential(sim);
        if !(e.is_finite() && max.is_finite() && supply.is_finite()) {
            return Ok(Stepped { rows, initial_storage: e0, initial_max, failed_at: Some(n + 1) });
        }
        cum.add(supply);
        rows.push(TimeSeriesRow {
            step: n + 1,
            t: (n + 1) as f64 * dt,
            storage: e,
            supply_step: supply,
            supply_cum: cum.value(),
            init_plus_supplied: e0 + cum.value(),
            residual: e - e_prev - supply,
            max_abs_state: max,
            max_abs_potential: pot,
        });
        e_prev = e;
        y_minus = y_plus;
    }
    Ok(Stepped { rows, initial_storage: e0, initial_max, failed_at: None })
}

fn summarize(s: &Stepped, pd: (String, Option<f64>), exact: Option<f64>) -> SystemSummary {
    let max_abs_residual = s.rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
    let max_storage = s.rows.iter().map(|r| r.storage.abs()).fold(s.initial_storage.abs(), f64::max);
    let last = s.rows.last();
    SystemSummary {
        steps_completed: s.rows.len() as u64,
        status: match s.failed_at {
            None => "ok".into(),
            Some(n) => format!("non-finite at step {n}"),
        },
        pd_check: pd.0,
        smallest_scaled_eigenvalue: pd.1,
        exact_energy: exact,
        initial_storage: s.initial_storage,
        final_storage: last.map_or(s.initial_storage, |r| r.storage),
        max_abs_residual,
        max_relative_residual: if max_storage > 0.0 { max_abs_residual / max_storage } else { max_abs_residual },
        max_relative_deviation: exact.map(|e| {
            s.rows.iter().map(|r| (r.storage - e).abs() / e).fold((s.initial_storage - e).abs() / e, f64::max)
        }),
        max_balance_gap: s.rows.iter().map(|r| (r.init_plus_supplied - r.storage).abs()).fold(0.0, f64::max),
        initial_max_abs_state: s.initial_max,
        max_abs_state: s.rows.iter().map(|r| r.max_abs_state).fold(s.initial_max, f64::max),
    }
}

fn pd_verdict(
    cfg: &RunConfig,
    grid: &GridIndex,
    m: &MaterialMaps,
    dt: f64,
    kind: SystemKind,
) -> Result<(String, Option<f64>), CliError> {
    let g = &cfg.grid;
    if g.nx.max(g.ny).max(g.nz) > PD_CHECK_MAX_CELLS {
        return Ok(("skipped".into(), None));
    }
    let sys = assemble_system(grid, m, dt, kind)?;
    let v = check_positive_definite(&sys, PdMethod::DenseEigen)?;
    let label = if v.pd { "positive definite" } else { "not positive definite" };
    Ok((label.into(), v.smallest_eigenvalue))
}

/// Run every requested system, writing `<system>.csv` and `summary.txt`
/// into `out`. Progress notes go to `log`.
pub fn run_experiment(cfg: &RunConfig, out: &Path, log: &mut dyn Write) -> Result<RunReport, CliError> {
    std::fs::create_dir_all(out)?;
    let grid = GridIndex::new(cfg.grid)?;
    let materials = build_materials(cfg, &grid)?;
    let cfl_dt = cfl_for(cfg, &materials)?;
    let dt = cfg.dt_factor * cfl_dt;
    if cfg.above_cfl() {
        writeln!(log, "warning: above CFL (dt_factor = {}), the run is expected to be unstable", cfg.dt_factor)?;
    }
    writeln!(log, "dt = {dt:.6e} s (CFL {cfl_dt:.6e} s), {} steps", cfg.steps)?;
    let mode = if cfg.uses_cavity() { Some(cavity_mode(cfg)?) } else { None };
    let exact = match (mode, cfg.initial) {
        (Some(m), InitialChoice::Cavity) if is_vacuum(cfg) => Some(exact_energies(&m)),
        _ => None,
    };

    let mut summary = Summary {
        grid: [cfg.grid.nx, cfg.grid.ny, cfg.grid.nz],
        spacing: [cfg.grid.dx, cfg.grid.dy, cfg.grid.dz],
        dt,
        cfl_dt,
        dt_factor: cfg.dt_factor,
        above_cfl: cfg.above_cfl(),
        steps: cfg.steps,
        threads: rayon::current_num_threads(),
        scalar: None,
        vector: None,
    };
    let mut runs = Vec::new();
    let mut failure = None;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for kind in cfg.system.kinds() {
        let pd = pd_verdict(cfg, &grid, &materials, dt, kind)?;
        let mut drive: Box<dyn Drive> = match (cfg.drive, mode) {
            (DriveChoice::Cavity, Some(m)) => Box::new(CavityDrive::new(&grid, &m, kind, dt)?),
            _ => Box::new(ZeroDrive),
        };
        let stepped = match kind {
            SystemKind::Scalar => {
                let s0 = match (cfg.initial, mode) {
                    (InitialChoice::Cavity, Some(m)) => cavity_initial_scalar(&grid, &m, dt)?,
                    (InitialChoice::Random, _) => random_scalar(&grid, &mut rng),
                    _ => ScalarState::zeros(&grid),
                };
                let mut sim = init_scalar(&grid, &materials, dt, &s0)?;
                let mut phi = match (cfg.initial, mode) {
                    (InitialChoice::Cavity, Some(m)) => (0..grid.node_count())
                        .map(|id| {
                            let p = grid.position(Family::Node, grid.coords(Family::Node, id).unwrap());
                            eval_cavity(&m, CavityField::Phi, p[0], p[1], p[2], 0.0)
                        })
                        .collect(),
                    _ => vec![0.0; grid.node_count()],
                };
                let emit = cfg.emit_phi;
                step_loop(&mut sim, drive.as_mut(), cfg.steps, |s| {
                    emit.then(|| {
                        phi = reconstruct_phi(s, &phi, dt).expect("node count is fixed");
                        phi.iter().fold(0.0f64, |m, v| m.max(v.abs()))
                    })
                })?
            }
            SystemKind::Vector => {
                let s0 = match (cfg.initial, mode) {
                    (InitialChoice::Cavity, Some(m)) => cavity_initial_vector(&grid, &m, dt)?,
                    (InitialChoice::Random, _) => random_vector(&grid, &mut rng),
                    _ => VectorState::zeros(&grid),
                };
                let mut sim = init_vector(&grid, &materials, dt, &s0)?;
                step_loop(&mut sim, drive.as_mut(), cfg.steps, |_| None)?
            }
        };
        let e_exact = exact.map(|(e_phi, e_a)| if kind == SystemKind::Scalar { e_phi } else { e_a });
        let sys_summary = summarize(&stepped, pd, e_exact);
        if !stepped.rows.is_empty() {
            write_timeseries_csv(&stepped.rows, &out.join(format!("{}.csv", kind.name())))?;
        }
        writeln!(
            log,
            "{}: {} steps, max relative residual {:.3e}{}",
            kind.name(),
            sys_summary.steps_completed,
            sys_summary.max_relative_residual,
            sys_summary
                .max_relative_deviation
                .map(|d| format!(", max relative deviation from exact energy {d:.3e}"))
                .unwrap_or_default()
        )?;
        match kind {
            SystemKind::Scalar => summary.scalar = Some(sys_summary.clone()),
            SystemKind::Vector => summary.vector = Some(sys_summary.clone()),
        }
        runs.push(SystemRun { kind, rows: stepped.rows, summary: sys_summary });
        if let Some(step) = stepped.failed_at {
            writeln!(log, "{}: non-finite state at step {step}; partial output written", kind.name())?;
            failure = Some(CliError::NonFinite { system: kind, step });
            break;
        }
    }

    std::fs::write(out.join("summary.txt"), summary.to_text())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(RunReport { summary, runs }),
    }
}
