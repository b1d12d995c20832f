//! Closed-form cavity mode used for initial states, boundary drives and
//! reference energies.
//!
//! The mode is
//!
//! ```text
//! φ   = Cφ sin(kx x) sin(ky y) sin(kz z) cos(ωt + π/3)
//! A_x = C_A cos(kx x) sin(ky y) sin(kz z) sin(ωt + π/3)
//! ```
//!
//! in a vacuum-filled cube of side `a`, with `Cφ = −C_A ε₀ kx / (χ₀ ω)` so that
//! the generalized Lorenz gauge `κ = ∂φ/∂t` holds.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Axis, Family, GridIndex, HangingFamily};
use crate::materials::{EPS0, MU0};
use crate::scalar::ScalarState;
use crate::system::SystemKind;
use crate::vector::VectorState;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityMode {
    /// Side length (m).
    pub a: f64,
    /// Mode integers along x, y, z.
    pub modes: [u32; 3],
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// Vector potential amplitude (T·m).
    pub c_a: f64,
    /// Scalar potential amplitude (V).
    pub c_phi: f64,
    /// Temporal phase (rad).
    pub phase: f64,
    pub eps0: f64,
    pub mu0: f64,
    pub chi0: f64,
}

/// The default (3, 1, 1) mode.
pub fn cavity_params(a: f64, c_a: f64) -> Result<CavityMode> {
    cavity_params_with_modes(a, c_a, [3, 1, 1])
}

pub fn cavity_params_with_modes(a: f64, c_a: f64, modes: [u32; 3]) -> Result<CavityMode> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!("cavity side must be positive, got {a}")));
    }
    if !(c_a.is_finite() && c_a != 0.0) {
        return Err(Error::InvalidParameter(format!("C_A must be finite and nonzero, got {c_a}")));
    }
    if modes.contains(&0) {
        return Err(Error::InvalidParameter(format!("mode integers must be positive, got {modes:?}")));
    }
    let eps0 = EPS0;
    let mu0 = MU0;
    let chi0 = mu0 * eps0 * eps0;
    let [kx, ky, kz] = modes.map(|m| m as f64 * PI / a);
    let omega = ((eps0 / chi0) * (kx * kx + ky * ky + kz * kz)).sqrt();
    let c_phi = -c_a * eps0 * kx / (chi0 * omega);
    Ok(CavityMode { a, modes, kx, ky, kz, omega, c_a, c_phi, phase: PI / 3.0, eps0, mu0, chi0 })
}

impl CavityMode {
    /// Oscillation period (s).
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CavityField {
    Phi,
    DphiDt,
    DphiDx,
    DphiDy,
    DphiDz,
    Ax,
    DaxDt,
    By,
    Bz,
    Kappa,
}

impl CavityField {
    pub const ALL: [CavityField; 10] = [
        CavityField::Phi,
        CavityField::DphiDt,
        CavityField::DphiDx,
        CavityField::DphiDy,
        CavityField::DphiDz,
        CavityField::Ax,
        CavityField::DaxDt,
        CavityField::By,
        CavityField::Bz,
        CavityField::Kappa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CavityField::Phi => "phi",
            CavityField::DphiDt => "dphi_dt",
            CavityField::DphiDx => "dphi_dx",
            CavityField::DphiDy => "dphi_dy",
            CavityField::DphiDz => "dphi_dz",
            CavityField::Ax => "A_x",
            CavityField::DaxDt => "dAx_dt",
            CavityField::By => "B_y",
            CavityField::Bz => "B_z",
            CavityField::Kappa => "kappa",
        }
    }
}

impl FromStr for CavityField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CavityField::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown cavity field '{s}'")))
    }
}

/// Evaluate one analytic field at `(x, y, z, t)`.
pub fn eval_cavity(mode: &CavityMode, field: CavityField, x: f64, y: f64, z: f64, t: f64) -> f64 {
    let (sx, cx) = (mode.kx * x).sin_cos();
    let (sy, cy) = (mode.ky * y).sin_cos();
    let (sz, cz) = (mode.kz * z).sin_cos();
    let (st, ct) = (mode.omega * t + mode.phase).sin_cos();
    let cp = mode.c_phi;
    let ca = mode.c_a;
    match field {
        CavityField::Phi => cp * sx * sy * sz * ct,
        CavityField::DphiDt => -cp * mode.omega * sx * sy * sz * st,
        CavityField::DphiDx => cp * mode.kx * cx * sy * sz * ct,
        CavityField::DphiDy => cp * mode.ky * sx * cy * sz * ct,
        CavityField::DphiDz => cp * mode.kz * sx * sy * cz * ct,
        CavityField::Ax => ca * cx * sy * sz * st,
        CavityField::DaxDt => ca * mode.omega * cx * sy * sz * ct,
        CavityField::By => ca * mode.kz * cx * sy * cz * st,
        CavityField::Bz => -ca * mode.ky * cx * cy * sz * st,
        CavityField::Kappa => mode.eps0 / mode.chi0 * ca * mode.kx * sx * sy * sz * st,
    }
}

/// Exact stored energies `(E_φ, E_A)` (J).
pub fn exact_energies(mode: &CavityMode) -> (f64, f64) {
    let w2a3 = mode.omega * mode.omega * mode.a.powi(3);
    let e_phi = mode.chi0 * mode.c_phi * mode.c_phi * w2a3 / 16.0;
    let e_a = mode.eps0 * mode.c_a * mode.c_a * w2a3 / 16.0;
    (e_phi, e_a)
}

fn check_extent(grid: &GridIndex, mode: &CavityMode) -> Result<()> {
    for axis in Axis::ALL {
        let ext = grid.spec().extent(axis);
        if (ext - mode.a).abs() > 1e-12 * mode.a {
            return Err(Error::InvalidParameter(format!(
                "grid extent {ext} along {} does not match cavity side {}",
                axis.name(),
                mode.a
            )));
        }
    }
    Ok(())
}

fn sample(grid: &GridIndex, family: Family, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
    (0..grid.count(family)).map(|id| f(grid.position(family, grid.coords(family, id).unwrap()))).collect()
}

/// Scalar state with `[∇φ]` at `t = 0` and `[∂tφ]` at `t = −Δt/2`.
pub fn cavity_initial_scalar(grid: &GridIndex, mode: &CavityMode, dt: f64) -> Result<ScalarState> {
    check_extent(grid, mode)?;
    let grads = [CavityField::DphiDx, CavityField::DphiDy, CavityField::DphiDz];
    let grad_phi = Axis::ALL
        .map(|a| sample(grid, Family::Edge(a), |p| eval_cavity(mode, grads[a.index()], p[0], p[1], p[2], 0.0)));
    let dphi_dt = sample(grid, Family::Node, |p| eval_cavity(mode, CavityField::DphiDt, p[0], p[1], p[2], -0.5 * dt));
    Ok(ScalarState { grad_phi, dphi_dt, step: 0 })
}

/// Vector state with `[∂tA]` at `t = 0` and `B`, `κ` at `t = −Δt/2`.
pub fn cavity_initial_vector(grid: &GridIndex, mode: &CavityMode, dt: f64) -> Result<VectorState> {
    check_extent(grid, mode)?;
    let th = -0.5 * dt;
    let mut s = VectorState::zeros(grid);
    s.da_dt[0] = sample(grid, Family::Edge(Axis::X), |p| eval_cavity(mode, CavityField::DaxDt, p[0], p[1], p[2], 0.0));
    s.b[1] = sample(grid, Family::Face(Axis::Y), |p| eval_cavity(mode, CavityField::By, p[0], p[1], p[2], th));
    s.b[2] = sample(grid, Family::Face(Axis::Z), |p| eval_cavity(mode, CavityField::Bz, p[0], p[1], p[2], th));
    s.kappa = sample(grid, Family::Node, |p| eval_cavity(mode, CavityField::Kappa, p[0], p[1], p[2], th));
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CavityState {
    Scalar(ScalarState),
    Vector(VectorState),
}

pub fn cavity_initial_state(grid: &GridIndex, mode: &CavityMode, which: SystemKind, dt: f64) -> Result<CavityState> {
    Ok(match which {
        SystemKind::Scalar => CavityState::Scalar(cavity_initial_scalar(grid, mode, dt)?),
        SystemKind::Vector => CavityState::Vector(cavity_initial_vector(grid, mode, dt)?),
    })
}

/// Exact hanging-variable values for step `n`, in the flat input order of
/// the chosen system. Normal samples are taken at `nΔt`, tangential `B` at
/// `(n+½)Δt`, each at the site's geometric position.
#[derive(Clone, Debug)]
pub struct CavityDrive {
    mode: CavityMode,
    which: SystemKind,
    dt: f64,
    /// (field, position) per input sample; `None` marks an identically zero sample.
    samples: Vec<(Option<CavityField>, [f64; 3])>,
    /// Samples from this index on are evaluated at half-integer times.
    half_from: usize,
}

impl CavityDrive {
    pub fn new(grid: &GridIndex, mode: &CavityMode, which: SystemKind, dt: f64) -> Result<Self> {
        check_extent(grid, mode)?;
        let mut samples = Vec::new();
        let perp_family = match which {
            SystemKind::Scalar => HangingFamily::ScalarGradPerp,
            SystemKind::Vector => HangingFamily::ADotPerp,
        };
        for s in grid.enumerate_hanging(perp_family) {
            let field = match (which, s.direction) {
                (SystemKind::Scalar, Axis::X) => Some(CavityField::DphiDx),
                (SystemKind::Scalar, Axis::Y) => Some(CavityField::DphiDy),
                (SystemKind::Scalar, Axis::Z) => Some(CavityField::DphiDz),
                (SystemKind::Vector, Axis::X) => Some(CavityField::DaxDt),
                (SystemKind::Vector, _) => None,
            };
            samples.push((field, grid.position(s.host, s.host_ijk)));
        }
        let half_from = samples.len();
        if which == SystemKind::Vector {
            for s in grid.enumerate_hanging(HangingFamily::BTan) {
                let field = match s.direction {
                    Axis::X => None,
                    Axis::Y => Some(CavityField::By),
                    Axis::Z => Some(CavityField::Bz),
                };
                samples.push((field, grid.position(s.host, s.host_ijk)));
            }
        }
        Ok(CavityDrive { mode: *mode, which, dt, samples, half_from })
    }

    pub fn which(&self) -> SystemKind {
        self.which
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn inputs(&self, n: u64) -> Vec<f64> {
        let t_int = n as f64 * self.dt;
        let t_half = (n as f64 + 0.5) * self.dt;
        self.samples
            .iter()
            .enumerate()
            .map(|(i, (field, p))| match field {
                Some(f) => {
                    let t = if i < self.half_from { t_int } else { t_half };
                    eval_cavity(&self.mode, *f, p[0], p[1], p[2], t)
                }
                None => 0.0,
            })
            .collect()
    }
}

impl crate::dissipation::Drive for CavityDrive {
    fn input(&mut self, n: u64, len: usize) -> Result<Vec<f64>> {
        crate::error::check_len("cavity drive", self.samples.len(), len)?;
        Ok(self.inputs(n))
    }
}

/// One-shot form of [`CavityDrive::inputs`].
pub fn cavity_boundary_drive(
    grid: &GridIndex,
    mode: &CavityMode,
    which: SystemKind,
    n: u64,
    dt: f64,
) -> Result<Vec<f64>> {
    Ok(CavityDrive::new(grid, mode, which, dt)?.inputs(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Face, GridSpec, Side};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference_mode() -> CavityMode {
        cavity_params(0.1, 1e-9).unwrap()
    }

    #[test]
    fn parameters() {
        let m = reference_mode();
        assert!((m.kx - 94.2478).abs() < 1e-4);
        assert!((m.ky - 31.4159).abs() < 1e-4);
        assert_eq!(m.ky, m.kz);
        assert!((m.omega - 3.1237e10).abs() < 1e6, "{}", m.omega);
        let c = crate::materials::light_speed();
        let expect = -m.c_a * c * 3.0 / 11f64.sqrt();
        assert!((m.c_phi - expect).abs() <= 1e-14 * expect.abs(), "{}", m.c_phi);
        assert!((m.c_phi + 0.27116).abs() < 2e-5, "{}", m.c_phi);
        let k = (m.kx * m.kx + m.ky * m.ky + m.kz * m.kz).sqrt();
        assert!((m.omega - c * k).abs() <= 1e-12 * m.omega);
        assert!(cavity_params(0.0, 1e-9).is_err());
        assert!(cavity_params(0.1, 0.0).is_err());
    }

    #[test]
    fn energies() {
        let (e_phi, e_a) = exact_energies(&reference_mode());
        assert!((e_a - 5.400e-13).abs() < 1e-16, "{e_a}");
        assert!((e_phi - 4.418e-13).abs() < 1e-16, "{e_phi}");
        assert!((e_phi / e_a - 9.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn phi_vanishes_on_boundary() {
        let m = reference_mode();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut p = [rng.gen::<f64>() * m.a, rng.gen::<f64>() * m.a, rng.gen::<f64>() * m.a];
            let axis = rng.gen_range(0..3);
            p[axis] = if rng.gen() { 0.0 } else { m.a };
            let t = rng.gen::<f64>() * 1e-9;
            assert!(eval_cavity(&m, CavityField::Phi, p[0], p[1], p[2], t).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_on_x_minus() {
        let m = reference_mode();
        let (y, z, t) = (0.03, 0.07, 2e-11);
        let v = eval_cavity(&m, CavityField::DphiDx, 0.0, y, z, t);
        let expect = m.c_phi * m.kx * (m.ky * y).sin() * (m.kz * z).sin() * (m.omega * t + PI / 3.0).cos();
        assert!((v - expect).abs() <= 1e-15 * expect.abs());
    }

    #[test]
    fn gauge_identity_pointwise() {
        let m = reference_mode();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (x, y, z) = (rng.gen::<f64>() * m.a, rng.gen::<f64>() * m.a, rng.gen::<f64>() * m.a);
            let t = rng.gen::<f64>() * 5e-10;
            let k = eval_cavity(&m, CavityField::Kappa, x, y, z, t);
            let d = eval_cavity(&m, CavityField::DphiDt, x, y, z, t);
            assert!((k - d).abs() <= 1e-12 * k.abs().max(d.abs()).max(1e-30), "{k} {d}");
        }
    }

    /// Central differences of the closed forms: derivatives are consistent and
    /// both potentials satisfy their wave equations.
    #[test]
    fn finite_difference_consistency() {
        let m = reference_mode();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = 1e-6 * m.a;
        let ht = h / crate::materials::light_speed();
        let f = |fd: CavityField, p: [f64; 4]| eval_cavity(&m, fd, p[0], p[1], p[2], p[3]);
        for _ in 0..50 {
            let p = [
                (0.1 + 0.8 * rng.gen::<f64>()) * m.a,
                (0.1 + 0.8 * rng.gen::<f64>()) * m.a,
                (0.1 + 0.8 * rng.gen::<f64>()) * m.a,
                rng.gen::<f64>() * 1e-9,
            ];
            let shift = |axis: usize, d: f64| {
                let mut q = p;
                q[axis] += d;
                q
            };
            let d1 = |fd, axis, step| (f(fd, shift(axis, step)) - f(fd, shift(axis, -step))) / (2.0 * step);
            let d2 = |fd, axis, step| {
                (f(fd, shift(axis, step)) - 2.0 * f(fd, p) + f(fd, shift(axis, -step))) / (step * step)
            };
            let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale;

            let sx = m.c_phi.abs() * m.kx;
            assert!(rel(d1(CavityField::Phi, 0, h), f(CavityField::DphiDx, p), sx) < 1e-6);
            assert!(rel(d1(CavityField::Phi, 1, h), f(CavityField::DphiDy, p), sx) < 1e-6);
            assert!(rel(d1(CavityField::Phi, 2, h), f(CavityField::DphiDz, p), sx) < 1e-6);
            assert!(rel(d1(CavityField::Phi, 3, ht), f(CavityField::DphiDt, p), m.c_phi.abs() * m.omega) < 1e-6);
            assert!(rel(d1(CavityField::Ax, 3, ht), f(CavityField::DaxDt, p), m.c_a * m.omega) < 1e-6);
            assert!(rel(d1(CavityField::Ax, 2, h), f(CavityField::By, p), m.c_a * m.kz) < 1e-6);
            assert!(rel(-d1(CavityField::Ax, 1, h), f(CavityField::Bz, p), m.c_a * m.ky) < 1e-6);

            // χ ∂ttφ − ε ∇²φ = 0, using a coarser step for second differences
            let h2 = 1e-4 * m.a;
            let ht2 = h2 / crate::materials::light_speed();
            let lap = d2(CavityField::Phi, 0, h2) + d2(CavityField::Phi, 1, h2) + d2(CavityField::Phi, 2, h2);
            let res = m.chi0 * d2(CavityField::Phi, 3, ht2) - m.eps0 * lap;
            let scale = m.eps0 * m.c_phi.abs() * (m.kx * m.kx + m.ky * m.ky + m.kz * m.kz);
            assert!(res.abs() / scale < 1e-6, "{}", res.abs() / scale);
        }
    }

    #[test]
    fn initial_state_boundary_samples_vanish() {
        let g = GridIndex::new(GridSpec::uniform(9, 3, 3, 0.1 / 9.0).unwrap());
        assert!(g.is_err() || true);
        let g = GridIndex::new(GridSpec::new(9, 3, 3, 0.1 / 9.0, 0.1 / 3.0, 0.1 / 3.0).unwrap()).unwrap();
        let m = reference_mode();
        let s = cavity_initial_scalar(&g, &m, 1e-12).unwrap();
        for id in 0..g.node_count() {
            let ijk = g.coords(Family::Node, id).unwrap();
            if Face::ALL.iter().any(|&f| g.on_face(f, ijk)) {
                assert!(s.dphi_dt[id].abs() < 1e-3, "{}", s.dphi_dt[id]);
            }
        }
        let bad = GridIndex::new(GridSpec::uniform(4, 4, 4, 0.01).unwrap()).unwrap();
        assert!(cavity_initial_scalar(&bad, &m, 1e-12).is_err());
    }

    #[test]
    fn drive_values() {
        let g = GridIndex::new(GridSpec::new(9, 3, 3, 0.1 / 9.0, 0.1 / 3.0, 0.1 / 3.0).unwrap()).unwrap();
        let m = reference_mode();
        let dt = 1e-12;
        let n = 7;
        let u = cavity_boundary_drive(&g, &m, SystemKind::Scalar, n, dt).unwrap();
        let sites = g.enumerate_hanging(HangingFamily::ScalarGradPerp);
        let xm = Face { axis: Axis::X, side: Side::Minus };
        for (s, v) in sites.iter().zip(&u) {
            if s.face == xm {
                let p = g.position(Family::Node, s.host_ijk);
                let expect = m.c_phi
                    * m.kx
                    * (m.ky * p[1]).sin()
                    * (m.kz * p[2]).sin()
                    * (m.omega * n as f64 * dt + PI / 3.0).cos();
                assert!((v - expect).abs() <= 1e-12 * expect.abs().max(1.0));
            }
        }

        let u = cavity_boundary_drive(&g, &m, SystemKind::Vector, n, dt).unwrap();
        let perp = g.enumerate_hanging(HangingFamily::ADotPerp);
        for (s, v) in perp.iter().zip(&u) {
            if s.face.axis != Axis::X {
                assert_eq!(*v, 0.0);
            }
        }
        let zm = Face { axis: Axis::Z, side: Side::Minus };
        let btan = g.enumerate_hanging(HangingFamily::BTan);
        for (s, v) in btan.iter().zip(&u[perp.len()..]) {
            if s.face == zm && s.direction == Axis::Y {
                let p = g.position(s.host, s.host_ijk);
                let expect = m.c_a
                    * m.kz
                    * (m.kx * p[0]).cos()
                    * (m.ky * p[1]).sin()
                    * (m.omega * (n as f64 + 0.5) * dt + PI / 3.0).sin();
                assert!((v - expect).abs() <= 1e-15 * expect.abs().max(1e-12));
            }
        }
        assert_eq!(u.len(), perp.len() + btan.len());
    }

    #[test]
    fn field_names_round_trip() {
        for f in CavityField::ALL {
            assert_eq!(f.name().parse::<CavityField>().unwrap(), f);
        }
        assert!("E_x".parse::<CavityField>().is_err());
    }
}
