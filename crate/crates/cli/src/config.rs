//! Run configuration: TOML text to a validated [`RunConfig`].

use std::ops::Range;
use std::path::{Path, PathBuf};

use pfdtd_core::{GridSpec, SystemKind};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemChoice {
    Scalar,
    Vector,
    Both,
}

impl SystemChoice {
    pub fn kinds(self) -> Vec<SystemKind> {
        match self {
            SystemChoice::Scalar => vec![SystemKind::Scalar],
            SystemChoice::Vector => vec![SystemKind::Vector],
            SystemChoice::Both => vec![SystemKind::Scalar, SystemKind::Vector],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveChoice {
    Cavity,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialChoice {
    Cavity,
    Zero,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoxelFormat {
    Csv,
    Bin,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MaterialSpec {
    Uniform { eps_r: f64, mu_r: f64 },
    Voxel { path: PathBuf, format: VoxelFormat },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub materials: MaterialSpec,
    pub dt_factor: f64,
    pub steps: usize,
    pub system: SystemChoice,
    pub drive: DriveChoice,
    pub initial: InitialChoice,
    pub seed: u64,
    pub c_a: f64,
    pub modes: [u32; 3],
    pub out: Option<PathBuf>,
    pub emit_phi: bool,
}

impl RunConfig {
    /// The 90×30×30 cavity in a 0.1 m vacuum cube.
    pub fn preset_cavity(dt_factor: f64, steps: usize) -> Self {
        RunConfig {
            grid: GridSpec::new(90, 30, 30, 0.1 / 90.0, 0.1 / 30.0, 0.1 / 30.0).expect("valid preset"),
            materials: MaterialSpec::Uniform { eps_r: 1.0, mu_r: 1.0 },
            dt_factor,
            steps,
            system: SystemChoice::Both,
            drive: DriveChoice::Cavity,
            initial: InitialChoice::Cavity,
            seed: 0,
            c_a: 1e-9,
            modes: [3, 1, 1],
            out: None,
            emit_phi: false,
        }
    }

    pub fn above_cfl(&self) -> bool {
        self.dt_factor > 1.0
    }

    pub fn uses_cavity(&self) -> bool {
        self.drive == DriveChoice::Cavity || self.initial == InitialChoice::Cavity
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    nx: usize,
    ny: usize,
    nz: usize,
    lx: Option<f64>,
    ly: Option<f64>,
    lz: Option<f64>,
    dx: Option<f64>,
    dy: Option<f64>,
    dz: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterials {
    eps_r: Option<f64>,
    mu_r: Option<f64>,
    voxel: Option<String>,
    format: Option<VoxelFormat>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: Spanned<RawGrid>,
    materials: Option<Spanned<RawMaterials>>,
    dt_factor: Option<Spanned<f64>>,
    steps: Option<Spanned<i64>>,
    system: Option<SystemChoice>,
    drive: Option<DriveChoice>,
    initial: Option<InitialChoice>,
    seed: Option<u64>,
    c_a: Option<Spanned<f64>>,
    modes: Option<Spanned<[u32; 3]>>,
    out: Option<String>,
    emit_phi: Option<bool>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn err_at(text: &str, span: Range<usize>, msg: impl Into<String>) -> CliError {
    CliError::Config { line: Some(line_of(text, span.start)), msg: msg.into() }
}

fn axis_step(
    text: &str,
    span: &Range<usize>,
    n: usize,
    l: Option<f64>,
    d: Option<f64>,
    name: &str,
) -> Result<f64, CliError> {
    match (l, d) {
        (Some(l), None) => Ok(l / n.max(1) as f64),
        (None, Some(d)) => Ok(d),
        (Some(_), Some(_)) => {
            Err(err_at(text, span.clone(), format!("grid: give either l{name} or d{name}, not both")))
        }
        (None, None) => Err(err_at(text, span.clone(), format!("grid: missing l{name} or d{name}"))),
    }
}

/// Parse and validate configuration text. Relative voxel paths resolve
/// against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config {
        line: e.span().map(|s| line_of(text, s.start)),
        msg: e.message().to_string(),
    })?;

    let gspan = raw.grid.span();
    let g = raw.grid.into_inner();
    let dx = axis_step(text, &gspan, g.nx, g.lx, g.dx, "x")?;
    let dy = axis_step(text, &gspan, g.ny, g.ly, g.dy, "y")?;
    let dz = axis_step(text, &gspan, g.nz, g.lz, g.dz, "z")?;
    let grid = GridSpec::new(g.nx, g.ny, g.nz, dx, dy, dz).map_err(|e| err_at(text, gspan.clone(), e.to_string()))?;

    let materials = match raw.materials {
        None => MaterialSpec::Uniform { eps_r: 1.0, mu_r: 1.0 },
        Some(m) => {
            let span = m.span();
            let m = m.into_inner();
            match m.voxel {
                Some(path) => {
                    if m.eps_r.is_some() || m.mu_r.is_some() {
                        return Err(err_at(text, span, "materials: voxel file excludes eps_r/mu_r"));
                    }
                    let path = base_dir.join(path);
                    let format = match m.format {
                        Some(f) => f,
                        None if path.extension().is_some_and(|e| e == "bin") => VoxelFormat::Bin,
                        None => VoxelFormat::Csv,
                    };
                    MaterialSpec::Voxel { path, format }
                }
                None => {
                    let eps_r = m.eps_r.unwrap_or(1.0);
                    let mu_r = m.mu_r.unwrap_or(1.0);
                    if !(eps_r.is_finite() && eps_r > 0.0 && mu_r.is_finite() && mu_r > 0.0) {
                        return Err(err_at(text, span, "materials: eps_r and mu_r must be positive"));
                    }
                    if m.format.is_some() {
                        return Err(err_at(text, span, "materials: format requires a voxel file"));
                    }
                    MaterialSpec::Uniform { eps_r, mu_r }
                }
            }
        }
    };

    let dt_factor = match raw.dt_factor {
        None => 0.999,
        Some(v) => {
            let f = *v.get_ref();
            if !(f.is_finite() && f > 0.0) {
                return Err(err_at(text, v.span(), format!("dt_factor must be positive, got {f}")));
            }
            f
        }
    };
    let steps = match raw.steps {
        None => 600,
        Some(v) => {
            let s = *v.get_ref();
            if s < 1 {
                return Err(err_at(text, v.span(), format!("steps must be at least 1, got {s}")));
            }
            s as usize
        }
    };
    let c_a = match raw.c_a {
        None => 1e-9,
        Some(v) => {
            let c = *v.get_ref();
            if !(c.is_finite() && c != 0.0) {
                return Err(err_at(text, v.span(), "c_a must be finite and nonzero"));
            }
            c
        }
    };
    let modes = match raw.modes {
        None => [3, 1, 1],
        Some(v) => {
            if v.get_ref().contains(&0) {
                return Err(err_at(text, v.span(), "mode integers must be positive"));
            }
            *v.get_ref()
        }
    };

    let cfg = RunConfig {
        grid,
        materials,
        dt_factor,
        steps,
        system: raw.system.unwrap_or(SystemChoice::Both),
        drive: raw.drive.unwrap_or(DriveChoice::Cavity),
        initial: raw.initial.unwrap_or(InitialChoice::Cavity),
        seed: raw.seed.unwrap_or(0),
        c_a,
        modes,
        out: raw.out.map(PathBuf::from),
        emit_phi: raw.emit_phi.unwrap_or(false),
    };
    if cfg.uses_cavity() {
        let a = grid.extent(pfdtd_core::Axis::X);
        for axis in pfdtd_core::Axis::ALL {
            if (grid.extent(axis) - a).abs() > 1e-12 * a {
                return Err(err_at(text, gspan, "cavity drive or initial state needs a cubic domain"));
            }
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config { line: None, msg: format!("{}: {e}", path.display()) })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = "[grid]\nnx = 4\nny = 4\nnz = 4\nlx = 0.1\nly = 0.1\nlz = 0.1\n";

    fn parse(s: &str) -> Result<RunConfig, CliError> {
        parse_config(s, Path::new("."))
    }

    fn line(e: CliError) -> Option<usize> {
        match e {
            CliError::Config { line, .. } => line,
            other => panic!("not a config error: {other}"),
        }
    }

    #[test]
    fn defaults() {
        let c = parse(MIN).unwrap();
        assert_eq!(c.dt_factor, 0.999);
        assert_eq!(c.steps, 600);
        assert_eq!(c.system, SystemChoice::Both);
        assert_eq!(c.drive, DriveChoice::Cavity);
        assert_eq!(c.initial, InitialChoice::Cavity);
        assert_eq!(c.c_a, 1e-9);
        assert_eq!(c.materials, MaterialSpec::Uniform { eps_r: 1.0, mu_r: 1.0 });
        assert_eq!(c.grid.dx, 0.1 / 4.0);
        assert!(!c.above_cfl());
    }

    #[test]
    fn above_cfl_is_accepted() {
        let c = parse(&format!("dt_factor = 1.001\n{MIN}")).unwrap();
        assert!(c.above_cfl());
    }

    #[test]
    fn zero_steps_rejected_with_line() {
        let e = parse(&format!("system = \"scalar\"\nsteps = 0\n{MIN}")).unwrap_err();
        assert_eq!(line(e), Some(2));
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let e = parse(&format!("{MIN}colour = 3\n")).unwrap_err();
        assert!(line(e).is_some());
        let e = parse(&format!("{MIN}bogus = 1\n").replace("nx = 4", "nx = 4\nnw = 2")).unwrap_err();
        assert!(line(e).is_some());
    }

    #[test]
    fn type_mismatch_rejected() {
        let e = parse(&format!("steps = \"many\"\n{MIN}")).unwrap_err();
        assert_eq!(line(e), Some(1));
    }

    #[test]
    fn missing_grid_rejected() {
        assert!(matches!(parse("steps = 3\n"), Err(CliError::Config { .. })));
    }

    #[test]
    fn spacing_forms() {
        let c = parse(
            "drive = \"none\"\ninitial = \"zero\"\n[grid]\nnx = 2\nny = 3\nnz = 4\ndx = 1e-3\ndy = 2e-3\nlz = 1e-2\n",
        )
        .unwrap();
        assert_eq!((c.grid.dx, c.grid.dy, c.grid.dz), (1e-3, 2e-3, 2.5e-3));
        assert!(parse(&MIN.replace("lx = 0.1", "lx = 0.1\ndx = 0.1")).is_err());
        // a non-cubic domain cannot host the cavity mode
        assert!(parse(&MIN.replace("lx = 0.1", "lx = 0.2")).is_err());
    }

    #[test]
    fn voxel_materials() {
        let c = parse_config(&format!("{MIN}[materials]\nvoxel = \"m.bin\"\n"), Path::new("/data")).unwrap();
        assert_eq!(c.materials, MaterialSpec::Voxel { path: PathBuf::from("/data/m.bin"), format: VoxelFormat::Bin });
        assert!(parse(&format!("{MIN}[materials]\nvoxel = \"m.csv\"\neps_r = 2.0\n")).is_err());
        assert!(parse(&format!("{MIN}[materials]\neps_r = -1.0\n")).is_err());
    }
}
