//! Storage functions, supply rates and losslessness audits.
//!
//! Matrix-free storage lives on the simulators themselves
//! ([`crate::ScalarSim::storage`], [`crate::VectorSim::storage`]); this
//! module holds the CFL bound, supply rates, the per-step balance audit, and
//! the assembled state-space matrices used to cross-check all of it.

mod assembly;
mod dense;

pub use assembly::{assemble_system, SystemMatrices};
pub use dense::{check_positive_definite, dense_oracle_step, DenseOracle, PdMethod, PdVerdict, DENSE_LIMIT};

use crate::error::{check_len, Error, Result};
use crate::grid::{GridSpec, HangingSite};
use crate::materials::MaterialMaps;
use crate::scalar::ScalarSim;
use crate::system::{supply_rate, PotentialSystem};
use crate::vector::VectorSim;

/// Largest stable leapfrog step for a homogeneous medium,
/// `√(με) / √(Δx⁻² + Δy⁻² + Δz⁻²)`.
pub fn cfl_limit(spec: &GridSpec, eps: f64, mu: f64) -> Result<f64> {
    spec.validate()?;
    if !(eps.is_finite() && eps > 0.0 && mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidParameter(format!("eps and mu must be positive, got {eps}, {mu}")));
    }
    let inv2 = spec.dx.powi(-2) + spec.dy.powi(-2) + spec.dz.powi(-2);
    Ok((mu * eps).sqrt() / inv2.sqrt())
}

/// CFL estimate for inhomogeneous media using the smallest nodal `√(με)`.
///
/// Only a heuristic: the positive-definiteness check is authoritative.
pub fn cfl_limit_materials(spec: &GridSpec, materials: &MaterialMaps) -> Result<f64> {
    spec.validate()?;
    let s = materials.min_sqrt_mu_eps();
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidMaterial("no valid nodal coefficients".into()));
    }
    let inv2 = spec.dx.powi(-2) + spec.dy.powi(-2) + spec.dz.powi(-2);
    Ok(s / inv2.sqrt())
}

/// Scalar supply rate from hanging sites and their permittivities.
pub fn supply_scalar(
    sites: &[HangingSite],
    eps_site: &[f64],
    u: &[f64],
    y_minus: &[f64],
    y_plus: &[f64],
    dt: f64,
) -> Result<f64> {
    check_len("eps_site", sites.len(), eps_site.len())?;
    let w: Vec<f64> = sites.iter().zip(eps_site).map(|(s, e)| s.sign * s.area * e).collect();
    supply_rate(&w, u, y_minus, y_plus, dt)
}

/// Boundary samples for one step of the vector system.
#[derive(Clone, Copy, Debug)]
pub struct VectorSupplySample<'a> {
    /// `[∂tA]⊥` at `nΔt`.
    pub u_perp: &'a [f64],
    /// Tangential `B` at `(n+½)Δt`.
    pub u_btan: &'a [f64],
    /// `[∂tA]` on host edges at `nΔt` and `(n+1)Δt`.
    pub y_tan_n: &'a [f64],
    pub y_tan_np1: &'a [f64],
    /// `κ` at host nodes at `(n−½)Δt` and `(n+½)Δt`.
    pub y_kappa_minus: &'a [f64],
    pub y_kappa_plus: &'a [f64],
}

/// Vector supply rate: `Δt·[Σ⊥ ε κ̄ (∂tA·(−n̂)) area + Σ_tan (μ⁻¹B × ∂tA)·(−n̂) area]`
/// with time-averaged conjugate outputs.
pub fn supply_vector(
    perp_sites: &[HangingSite],
    eps_perp: &[f64],
    btan_sites: &[HangingSite],
    mu_inv_btan: &[f64],
    io: VectorSupplySample<'_>,
    dt: f64,
) -> Result<f64> {
    check_len("eps_perp", perp_sites.len(), eps_perp.len())?;
    check_len("mu_inv_btan", btan_sites.len(), mu_inv_btan.len())?;
    let wp: Vec<f64> = perp_sites.iter().zip(eps_perp).map(|(s, e)| -(s.sign * s.area * e)).collect();
    let wt: Vec<f64> = btan_sites.iter().zip(mu_inv_btan).map(|(s, m)| s.sign * s.area * m).collect();
    let perp = supply_rate(&wp, io.u_perp, io.y_kappa_minus, io.y_kappa_plus, dt)?;
    let tan = supply_rate(&wt, io.u_btan, io.y_tan_n, io.y_tan_np1, dt)?;
    Ok(perp + tan)
}

/// Storage of a scalar simulator (J).
pub fn storage_scalar(sim: &ScalarSim) -> f64 {
    sim.storage()
}

/// Storage of a vector simulator (J).
pub fn storage_vector(sim: &VectorSim) -> f64 {
    sim.storage()
}

/// One audited step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalanceStep {
    pub e_before: f64,
    pub e_after: f64,
    pub supply: f64,
    /// `e_after − e_before − supply`.
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BalanceReport {
    pub steps: Vec<BalanceStep>,
    pub max_abs_residual: f64,
    pub max_abs_storage: f64,
}

impl BalanceReport {
    pub fn push(&mut self, step: BalanceStep) {
        self.max_abs_residual = self.max_abs_residual.max(step.residual.abs());
        self.max_abs_storage = self.max_abs_storage.max(step.e_before.abs()).max(step.e_after.abs());
        self.steps.push(step);
    }

    /// Largest residual relative to the largest storage seen; zero when
    /// nothing was stored.
    pub fn relative_residual(&self) -> f64 {
        if self.max_abs_storage == 0.0 {
            self.max_abs_residual
        } else {
            self.max_abs_residual / self.max_abs_storage
        }
    }
}

/// Source of boundary inputs for step `n`.
pub trait Drive {
    fn input(&mut self, n: u64, len: usize) -> Result<Vec<f64>>;
}

impl<F> Drive for F
where
    F: FnMut(u64, usize) -> Result<Vec<f64>>,
{
    fn input(&mut self, n: u64, len: usize) -> Result<Vec<f64>> {
        self(n, len)
    }
}

/// All-zero inputs.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroDrive;

impl Drive for ZeroDrive {
    fn input(&mut self, _n: u64, len: usize) -> Result<Vec<f64>> {
        Ok(vec![0.0; len])
    }
}

/// Step `sim` `steps` times, recording the discrete energy balance of each step.
pub fn audit_balance<S: PotentialSystem + ?Sized>(
    sim: &mut S,
    drive: &mut dyn Drive,
    steps: usize,
) -> Result<BalanceReport> {
    let mut report = BalanceReport::default();
    let mut e_before = sim.storage();
    let mut y_minus = sim.outputs();
    for _ in 0..steps {
        let u = drive.input(sim.step_index(), sim.input_len())?;
        let y_plus = sim.advance(&u)?;
        let supply = sim.supply(&u, &y_minus, &y_plus)?;
        let e_after = sim.storage();
        report.push(BalanceStep { e_before, e_after, supply, residual: e_after - e_before - supply });
        e_before = e_after;
        y_minus = y_plus;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Face, GridIndex, HangingFamily, Side};
    use crate::materials::{EPS0, MU0};

    #[test]
    fn cfl_closed_forms() {
        let cube = GridSpec::uniform(4, 4, 4, 1e-3).unwrap();
        let c = crate::materials::light_speed();
        let dt = cfl_limit(&cube, EPS0, MU0).unwrap();
        assert!((dt - 1e-3 / (c * 3f64.sqrt())).abs() < 1e-24);
        assert!((dt - 1.9258e-12).abs() < 1e-16);

        let cavity = GridSpec::new(90, 30, 30, 0.1 / 90.0, 0.1 / 30.0, 0.1 / 30.0).unwrap();
        let dt = cfl_limit(&cavity, EPS0, MU0).unwrap();
        assert!((dt - 3.3524e-12).abs() < 1e-15, "{dt}");

        let dt4 = cfl_limit(&cube, 4.0 * EPS0, MU0).unwrap();
        assert!((dt4 / cfl_limit(&cube, EPS0, MU0).unwrap() - 2.0).abs() < 1e-15);
        assert!(cfl_limit(&cube, 0.0, MU0).is_err());
    }

    #[test]
    fn scalar_supply_single_site() {
        let g = GridIndex::new(GridSpec::uniform(1, 1, 1, 1.0).unwrap()).unwrap();
        let mut site = g.enumerate_hanging(HangingFamily::ScalarGradPerp)[0];
        assert_eq!(site.sign, -1.0);
        site.area = 1.0;
        let s = supply_scalar(&[site], &[EPS0], &[1.0], &[1.0], &[1.0], 1.0).unwrap();
        assert_eq!(s, -EPS0);
        assert_eq!(supply_scalar(&[site], &[EPS0], &[0.0], &[1.0], &[1.0], 1.0).unwrap(), 0.0);
        assert!(supply_scalar(&[site], &[EPS0], &[1.0, 2.0], &[1.0], &[1.0], 1.0).is_err());
    }

    #[test]
    fn vector_supply_single_btan_site() {
        let g = GridIndex::new(GridSpec::uniform(1, 1, 1, 1.0).unwrap()).unwrap();
        let zm = Face { axis: Axis::Z, side: Side::Minus };
        let mut site =
            *g.enumerate_hanging(HangingFamily::BTan).iter().find(|s| s.face == zm && s.direction == Axis::Y).unwrap();
        assert_eq!(site.sign, -1.0);
        site.area = 1.0;
        let io = VectorSupplySample {
            u_perp: &[],
            u_btan: &[1.0],
            y_tan_n: &[1.0],
            y_tan_np1: &[1.0],
            y_kappa_minus: &[],
            y_kappa_plus: &[],
        };
        let s = supply_vector(&[], &[], &[site], &[1.0 / MU0], io, 1.0).unwrap();
        assert_eq!(s, -1.0 / MU0);
        let zero = VectorSupplySample { u_btan: &[0.0], ..io };
        assert_eq!(supply_vector(&[], &[], &[site], &[1.0 / MU0], zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn audit_of_zero_system_is_zero() {
        let g = GridIndex::new(GridSpec::uniform(2, 2, 2, 1e-3).unwrap()).unwrap();
        let m = crate::materials::uniform_materials(&g, 1.0, 1.0).unwrap();
        let mut sim = crate::scalar::init_scalar(&g, &m, 1e-12, &crate::ScalarState::zeros(&g)).unwrap();
        let r = audit_balance(&mut sim, &mut ZeroDrive, 10).unwrap();
        assert_eq!(r.steps.len(), 10);
        assert!(r.steps.iter().all(|s| s.residual == 0.0 && s.e_after == 0.0));
        assert_eq!(r.relative_residual(), 0.0);
    }
}
