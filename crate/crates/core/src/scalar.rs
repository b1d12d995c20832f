//! Leapfrog stepper for the scalar-potential system.
//!
//! Unknowns are `[∇φ]` on primary edges (integer times) and `[∂tφ]` on
//! primary nodes (half-integer times). Each step first advances the nodes
//! from the discrete flux of `ε[∇φ]` through their secondary cells, then
//! advances the edges from the new node values.

use rayon::prelude::*;

use crate::error::{check_finite, check_len, Error, Result};
use crate::grid::{Axis, GridIndex, HangingFamily, HangingSite};
use crate::materials::MaterialMaps;
use crate::stencil::{Dims, Stencil};
use crate::sum::CompensatedSum;
use crate::system::{PotentialSystem, SystemKind};

/// `x^{n−½} = ([∇φ]^n, [∂tφ]^{n−½})`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarState {
    /// `[∂xφ]`, `[∂yφ]`, `[∂zφ]` on primary edges (V/m).
    pub grad_phi: [Vec<f64>; 3],
    /// `[∂tφ]` on primary nodes (V/s).
    pub dphi_dt: Vec<f64>,
    pub step: u64,
}

impl ScalarState {
    pub fn zeros(grid: &GridIndex) -> Self {
        ScalarState {
            grad_phi: Axis::ALL.map(|a| vec![0.0; grid.edge_count(a)]),
            dphi_dt: vec![0.0; grid.node_count()],
            step: 0,
        }
    }

    /// Length of the assembled state vector.
    pub fn dim(grid: &GridIndex) -> usize {
        grid.total_edges() + grid.node_count()
    }

    pub fn validate(&self, grid: &GridIndex) -> Result<()> {
        for a in Axis::ALL {
            check_len("grad_phi", grid.edge_count(a), self.grad_phi[a.index()].len())?;
        }
        check_len("dphi_dt", grid.node_count(), self.dphi_dt.len())
    }

    /// Flatten as `[∂xφ | ∂yφ | ∂zφ | ∂tφ]`.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.grad_phi.iter().map(Vec::len).sum::<usize>() + self.dphi_dt.len());
        for g in &self.grad_phi {
            x.extend_from_slice(g);
        }
        x.extend_from_slice(&self.dphi_dt);
        x
    }

    pub fn from_vector(grid: &GridIndex, x: &[f64]) -> Result<Self> {
        check_len("state vector", Self::dim(grid), x.len())?;
        let mut off = 0;
        let grad_phi = Axis::ALL.map(|a| {
            let n = grid.edge_count(a);
            let v = x[off..off + n].to_vec();
            off += n;
            v
        });
        Ok(ScalarState { grad_phi, dphi_dt: x[off..].to_vec(), step: 0 })
    }
}

#[derive(Clone, Debug)]
pub struct ScalarSim {
    grid: GridIndex,
    stencil: Stencil,
    dt: f64,
    state: ScalarState,
    /// `ε S''` per edge.
    flux_w: [Vec<f64>; 3],
    /// `Δt / (ε S'' l')` per edge.
    edge_coef: [Vec<f64>; 3],
    /// `ε S'' l'` per edge.
    edge_energy_w: [Vec<f64>; 3],
    /// `Δt / (χ V'')` per node.
    node_coef: Vec<f64>,
    /// `χ V''` per node.
    node_energy_w: Vec<f64>,
    sites: Vec<HangingSite>,
    /// `sign · area · ε` per site.
    weights: Vec<f64>,
    hang: Vec<f64>,
}

/// Build a scalar simulator. The initial state is copied and its step
/// counter reset to zero.
pub fn init_scalar(grid: &GridIndex, materials: &MaterialMaps, dt: f64, state0: &ScalarState) -> Result<ScalarSim> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    materials.validate(grid)?;
    state0.validate(grid)?;
    let stencil = Stencil::new(grid);

    let mut flux_w: [Vec<f64>; 3] = Default::default();
    let mut edge_coef: [Vec<f64>; 3] = Default::default();
    let mut edge_energy_w: [Vec<f64>; 3] = Default::default();
    for a in Axis::ALL {
        let ai = a.index();
        let d = stencil.edge[ai];
        let len = grid.edge_length(a);
        let (mut fw, mut ec, mut ew) =
            (Vec::with_capacity(d.len()), Vec::with_capacity(d.len()), Vec::with_capacity(d.len()));
        for id in 0..d.len() {
            let ijk = Stencil::dims_coords(d, id);
            let eps = materials.eps_edge[ai][id];
            let w = eps * grid.edge_dual_area(a, ijk);
            fw.push(w);
            ew.push(w * len);
            ec.push(dt / (w * len));
        }
        flux_w[ai] = fw;
        edge_coef[ai] = ec;
        edge_energy_w[ai] = ew;
    }

    let mut node_coef = Vec::with_capacity(stencil.node.len());
    let mut node_energy_w = Vec::with_capacity(stencil.node.len());
    for id in 0..stencil.node.len() {
        let w = materials.chi_node[id] * grid.node_volume(stencil.node_coords(id));
        node_energy_w.push(w);
        node_coef.push(dt / w);
    }

    let sites = grid.enumerate_hanging(HangingFamily::ScalarGradPerp);
    let weights = sites.iter().zip(&materials.eps_perp).map(|(s, eps)| s.sign * s.area * eps).collect();

    let mut state = state0.clone();
    state.step = 0;
    Ok(ScalarSim {
        grid: grid.clone(),
        hang: vec![0.0; sites.len()],
        stencil,
        dt,
        state,
        flux_w,
        edge_coef,
        edge_energy_w,
        node_coef,
        node_energy_w,
        sites,
        weights,
    })
}

impl ScalarSim {
    pub fn state(&self) -> &ScalarState {
        &self.state
    }

    pub fn sites(&self) -> &[HangingSite] {
        &self.sites
    }

    /// One leapfrog step with hanging `[∇φ]⊥` samples at `t = nΔt`.
    /// Returns the boundary `[∂tφ]` samples at `t = (n+½)Δt`.
    pub fn step(&mut self, u: &[f64]) -> Result<Vec<f64>> {
        check_len("scalar input", self.sites.len(), u.len())?;
        check_finite("scalar input", u)?;
        for ((h, w), x) in self.hang.iter_mut().zip(&self.weights).zip(u) {
            *h = w * x;
        }

        // nodes: χV''/Δt (p⁺ − p⁻) = flux(ε S'' g) + hanging
        let st = &self.stencil;
        let plane = st.node.plane();
        let (flux_w, grad, hang, node_coef) = (&self.flux_w, &self.state.grad_phi, &self.hang, &self.node_coef);
        self.state.dphi_dt.par_chunks_mut(plane).enumerate().for_each(|(i, chunk)| {
            let d = st.node.0;
            for j in 0..d[1] {
                for k in 0..d[2] {
                    let ijk = [i, j, k];
                    let local = j * d[2] + k;
                    let flux = st.node_flux(ijk, flux_w, grad, Some(hang));
                    chunk[local] += node_coef[i * plane + local] * flux;
                }
            }
        });

        // edges: ε S'' l'/Δt (g⁺ − g) = ε S'' (p(end) − p(start))
        let p = &self.state.dphi_dt;
        for a in 0..3 {
            let d: Dims = st.edge[a];
            let ep = d.plane();
            let (fw, ec) = (&self.flux_w[a], &self.edge_coef[a]);
            self.state.grad_phi[a].par_chunks_mut(ep).enumerate().for_each(|(i, chunk)| {
                for j in 0..d.0[1] {
                    for k in 0..d.0[2] {
                        let local = j * d.0[2] + k;
                        let id = i * ep + local;
                        let diff = st.edge_difference(a, [i, j, k], p);
                        chunk[local] += ec[id] * (fw[id] * diff);
                    }
                }
            });
        }
        self.state.step += 1;
        Ok(self.outputs())
    }

    /// Boundary `[∂tφ]` at each site's host node (`y = Lᵀx`).
    pub fn outputs(&self) -> Vec<f64> {
        self.sites.iter().map(|s| self.state.dphi_dt[s.host_id]).collect()
    }

    /// Matrix-free storage function.
    pub fn storage(&self) -> f64 {
        let st = &self.stencil;
        let mut acc = CompensatedSum::new();
        for a in 0..3 {
            for (w, g) in self.edge_energy_w[a].iter().zip(&self.state.grad_phi[a]) {
                acc.add(0.5 * w * g * g);
            }
        }
        let p = &self.state.dphi_dt;
        for (id, (w, pv)) in self.node_energy_w.iter().zip(p).enumerate() {
            acc.add(0.5 * w * pv * pv);
            let flux = st.node_flux(st.node_coords(id), &self.flux_w, &self.state.grad_phi, None);
            acc.add(0.5 * self.dt * pv * flux);
        }
        acc.value()
    }

    /// Largest `|[∂tφ]|` over the nodes.
    pub fn max_abs_dphi_dt(&self) -> f64 {
        self.state.dphi_dt.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_grad_phi(&self) -> f64 {
        self.state.grad_phi.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl PotentialSystem for ScalarSim {
    fn kind(&self) -> SystemKind {
        SystemKind::Scalar
    }

    fn grid(&self) -> &GridIndex {
        &self.grid
    }

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step_index(&self) -> u64 {
        self.state.step
    }

    fn input_weights(&self) -> &[f64] {
        &self.weights
    }

    fn outputs(&self) -> Vec<f64> {
        ScalarSim::outputs(self)
    }

    fn advance(&mut self, u: &[f64]) -> Result<Vec<f64>> {
        self.step(u)
    }

    fn storage(&self) -> f64 {
        ScalarSim::storage(self)
    }

    fn state_vector(&self) -> Vec<f64> {
        self.state.to_vector()
    }

    fn max_abs_state(&self) -> f64 {
        self.max_abs_dphi_dt()
    }
}

/// Alias matching the operation name used elsewhere.
pub fn step_scalar(sim: &mut ScalarSim, u: &[f64]) -> Result<Vec<f64>> {
    sim.step(u)
}

pub fn scalar_outputs(sim: &ScalarSim) -> Vec<f64> {
    sim.outputs()
}

/// Rectangle-rule update `φ ← φ_prev + Δt·[∂tφ]` on the nodes.
pub fn reconstruct_phi(sim: &ScalarSim, phi_prev: &[f64], dt: f64) -> Result<Vec<f64>> {
    check_len("phi_prev", sim.state.dphi_dt.len(), phi_prev.len())?;
    Ok(phi_prev.iter().zip(&sim.state.dphi_dt).map(|(p, d)| p + dt * d).collect())
}
