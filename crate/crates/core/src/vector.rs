//! Leapfrog stepper for the vector-potential system.
//!
//! `[∂tA]` lives on primary edges at integer times; `B` on secondary edges
//! and `κ` on primary nodes at half-integer times. A step advances `B` from
//! the face circulations of `[∂tA]`, then `κ` from the divergence of
//! `ε[∂tA]`, then `[∂tA]` from the curl of `μ⁻¹B` and the gradient of `κ`.
//!
//! Inputs are ordered `[∂tA]⊥` sites first, then tangential-B sites; the
//! outputs `κ` and `[∂tA]` follow the same order.

use rayon::prelude::*;

use crate::error::{check_finite, check_len, Error, Result};
use crate::grid::{Axis, GridIndex, HangingFamily, HangingSite};
use crate::materials::MaterialMaps;
use crate::stencil::Stencil;
use crate::sum::CompensatedSum;
use crate::system::{PotentialSystem, SystemKind};

/// `x^{n−½} = ([∂tA]^n, B^{n−½}, κ^{n−½})`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorState {
    /// `[∂tA]` components on primary edges (V/m).
    pub da_dt: [Vec<f64>; 3],
    /// `B` components on secondary edges, indexed like primary faces (T).
    pub b: [Vec<f64>; 3],
    /// `κ` on primary nodes (V/s).
    pub kappa: Vec<f64>,
    pub step: u64,
}

impl VectorState {
    pub fn zeros(grid: &GridIndex) -> Self {
        VectorState {
            da_dt: Axis::ALL.map(|a| vec![0.0; grid.edge_count(a)]),
            b: Axis::ALL.map(|a| vec![0.0; grid.face_count(a)]),
            kappa: vec![0.0; grid.node_count()],
            step: 0,
        }
    }

    pub fn dim(grid: &GridIndex) -> usize {
        grid.total_edges() + grid.total_faces() + grid.node_count()
    }

    pub fn validate(&self, grid: &GridIndex) -> Result<()> {
        for a in Axis::ALL {
            check_len("da_dt", grid.edge_count(a), self.da_dt[a.index()].len())?;
            check_len("b", grid.face_count(a), self.b[a.index()].len())?;
        }
        check_len("kappa", grid.node_count(), self.kappa.len())
    }

    /// Flatten as `[∂tAx | ∂tAy | ∂tAz | Bx | By | Bz | κ]`.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut x = Vec::new();
        for v in self.da_dt.iter().chain(self.b.iter()) {
            x.extend_from_slice(v);
        }
        x.extend_from_slice(&self.kappa);
        x
    }

    pub fn from_vector(grid: &GridIndex, x: &[f64]) -> Result<Self> {
        check_len("state vector", Self::dim(grid), x.len())?;
        let mut off = 0;
        let mut take = |n: usize| {
            let v = x[off..off + n].to_vec();
            off += n;
            v
        };
        let da_dt = Axis::ALL.map(|a| take(grid.edge_count(a)));
        let b = Axis::ALL.map(|a| take(grid.face_count(a)));
        let kappa = take(grid.node_count());
        Ok(VectorState { da_dt, b, kappa, step: 0 })
    }
}

#[derive(Clone, Debug)]
pub struct VectorSim {
    grid: GridIndex,
    stencil: Stencil,
    dt: f64,
    state: VectorState,
    /// `ε S''` per edge.
    flux_w: [Vec<f64>; 3],
    /// `Δt / (ε S'' l')`.
    edge_coef: [Vec<f64>; 3],
    edge_energy_w: [Vec<f64>; 3],
    /// `μ⁻¹ l''` per secondary edge.
    face_w: [Vec<f64>; 3],
    /// `Δt / (μ⁻¹ S' l'')`.
    face_coef: [Vec<f64>; 3],
    face_energy_w: [Vec<f64>; 3],
    node_coef: Vec<f64>,
    node_energy_w: Vec<f64>,
    perp_sites: Vec<HangingSite>,
    btan_sites: Vec<HangingSite>,
    /// Diagonal of S: `−sign·area·ε` for normal sites, `sign·area·μ⁻¹` for
    /// tangential-B sites.
    weights: Vec<f64>,
    hang_perp: Vec<f64>,
    hang_btan: Vec<f64>,
}

pub fn init_vector(grid: &GridIndex, materials: &MaterialMaps, dt: f64, state0: &VectorState) -> Result<VectorSim> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    materials.validate(grid)?;
    state0.validate(grid)?;
    let st = Stencil::new(grid);

    let mut flux_w: [Vec<f64>; 3] = Default::default();
    let mut edge_coef: [Vec<f64>; 3] = Default::default();
    let mut edge_energy_w: [Vec<f64>; 3] = Default::default();
    let mut face_w: [Vec<f64>; 3] = Default::default();
    let mut face_coef: [Vec<f64>; 3] = Default::default();
    let mut face_energy_w: [Vec<f64>; 3] = Default::default();
    for a in Axis::ALL {
        let ai = a.index();
        let len = grid.edge_length(a);
        for id in 0..st.edge[ai].len() {
            let ijk = Stencil::dims_coords(st.edge[ai], id);
            let w = materials.eps_edge[ai][id] * grid.edge_dual_area(a, ijk);
            flux_w[ai].push(w);
            edge_energy_w[ai].push(w * len);
            edge_coef[ai].push(dt / (w * len));
        }
        let area = grid.face_area(a);
        for id in 0..st.face[ai].len() {
            let ijk = Stencil::dims_coords(st.face[ai], id);
            let w = materials.mu_inv_face[ai][id] * grid.face_dual_length(a, ijk);
            face_w[ai].push(w);
            face_energy_w[ai].push(w * area);
            face_coef[ai].push(dt / (w * area));
        }
    }
    let mut node_coef = Vec::with_capacity(st.node.len());
    let mut node_energy_w = Vec::with_capacity(st.node.len());
    for id in 0..st.node.len() {
        let w = materials.chi_node[id] * grid.node_volume(st.node_coords(id));
        node_energy_w.push(w);
        node_coef.push(dt / w);
    }

    let perp_sites = grid.enumerate_hanging(HangingFamily::ADotPerp);
    let btan_sites = grid.enumerate_hanging(HangingFamily::BTan);
    let weights = perp_sites
        .iter()
        .zip(&materials.eps_perp)
        .map(|(s, eps)| -(s.sign * s.area * eps))
        .chain(btan_sites.iter().zip(&materials.mu_inv_btan).map(|(s, mi)| s.sign * s.area * mi))
        .collect();

    let mut state = state0.clone();
    state.step = 0;
    Ok(VectorSim {
        grid: grid.clone(),
        hang_perp: vec![0.0; perp_sites.len()],
        hang_btan: vec![0.0; btan_sites.len()],
        stencil: st,
        dt,
        state,
        flux_w,
        edge_coef,
        edge_energy_w,
        face_w,
        face_coef,
        face_energy_w,
        node_coef,
        node_energy_w,
        perp_sites,
        btan_sites,
        weights,
    })
}

impl VectorSim {
    pub fn state(&self) -> &VectorState {
        &self.state
    }

    pub fn perp_sites(&self) -> &[HangingSite] {
        &self.perp_sites
    }

    pub fn btan_sites(&self) -> &[HangingSite] {
        &self.btan_sites
    }

    /// Split a flat input or output vector into its normal and tangential parts.
    pub fn split<'a>(&self, v: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        v.split_at(self.perp_sites.len())
    }

    /// One step with `[∂tA]⊥` at `t = nΔt` and tangential `B` at
    /// `t = (n+½)Δt`. Returns the flat outputs after the step.
    pub fn step(&mut self, u: &[f64]) -> Result<Vec<f64>> {
        check_len("vector input", self.weights.len(), u.len())?;
        check_finite("vector input", u)?;
        let (u_perp, u_btan) = u.split_at(self.perp_sites.len());
        // flux sense for the divergence: sign·area·ε·u = −S·u
        for (i, h) in self.hang_perp.iter_mut().enumerate() {
            *h = -(self.weights[i] * u_perp[i]);
        }
        let off = self.perp_sites.len();
        for (i, h) in self.hang_btan.iter_mut().enumerate() {
            *h = self.weights[off + i] * u_btan[i];
        }

        let st = &self.stencil;

        // B: μ⁻¹S'l''/Δt (B⁺ − B⁻) = μ⁻¹ l'' · circulation([∂tA])
        {
            let a = &self.state.da_dt;
            for n in 0..3 {
                let d = st.face[n];
                let plane = d.plane();
                let (fw, fc) = (&self.face_w[n], &self.face_coef[n]);
                self.state.b[n].par_chunks_mut(plane).enumerate().for_each(|(i, chunk)| {
                    for j in 0..d.0[1] {
                        for k in 0..d.0[2] {
                            let local = j * d.0[2] + k;
                            let id = i * plane + local;
                            let circ = st.face_circulation(n, [i, j, k], a);
                            chunk[local] += fc[id] * (fw[id] * circ);
                        }
                    }
                });
            }
        }

        // κ: χV''/Δt (κ⁺ − κ⁻) = −[flux(ε S'' [∂tA]) + hanging]
        {
            let plane = st.node.plane();
            let (fw, a, hang, nc) = (&self.flux_w, &self.state.da_dt, &self.hang_perp, &self.node_coef);
            self.state.kappa.par_chunks_mut(plane).enumerate().for_each(|(i, chunk)| {
                let d = st.node.0;
                for j in 0..d[1] {
                    for k in 0..d[2] {
                        let local = j * d[2] + k;
                        let flux = st.node_flux([i, j, k], fw, a, Some(hang));
                        chunk[local] += nc[i * plane + local] * (-flux);
                    }
                }
            });
        }

        // [∂tA]: εS''l'/Δt (a⁺ − a) = −l'·curlᵀ(μ⁻¹l''B) + hanging B − εS''(κ(end) − κ(start))
        {
            let (b, kappa, fw_face, hang) = (&self.state.b, &self.state.kappa, &self.face_w, &self.hang_btan);
            for e in 0..3 {
                let d = st.edge[e];
                let plane = d.plane();
                let (fw, ec) = (&self.flux_w[e], &self.edge_coef[e]);
                self.state.da_dt[e].par_chunks_mut(plane).enumerate().for_each(|(i, chunk)| {
                    for j in 0..d.0[1] {
                        for k in 0..d.0[2] {
                            let ijk = [i, j, k];
                            let local = j * d.0[2] + k;
                            let id = i * plane + local;
                            let magnetic = st.edge_curl_rhs(e, ijk, fw_face, b, Some(hang));
                            let grad = fw[id] * st.edge_difference(e, ijk, kappa);
                            chunk[local] += ec[id] * (magnetic - grad);
                        }
                    }
                });
            }
        }

        self.state.step += 1;
        Ok(self.outputs())
    }

    /// Flat outputs: `κ` at normal-site host nodes, then `[∂tA]` on
    /// tangential-site host edges.
    pub fn outputs(&self) -> Vec<f64> {
        let (y_tan, y_kappa) = self.typed_outputs();
        let mut y = y_kappa;
        y.extend(y_tan);
        y
    }

    /// `(y_tan, y_kappa)`.
    pub fn typed_outputs(&self) -> (Vec<f64>, Vec<f64>) {
        let y_kappa = self.perp_sites.iter().map(|s| self.state.kappa[s.host_id]).collect();
        let y_tan = self
            .btan_sites
            .iter()
            .map(|s| match s.host {
                crate::grid::Family::Edge(e) => self.state.da_dt[e.index()][s.host_id],
                _ => unreachable!("tangential sites are hosted by edges"),
            })
            .collect();
        (y_tan, y_kappa)
    }

    pub fn storage(&self) -> f64 {
        let st = &self.stencil;
        let s = &self.state;
        let mut acc = CompensatedSum::new();
        for a in 0..3 {
            for (w, v) in self.edge_energy_w[a].iter().zip(&s.da_dt[a]) {
                acc.add(0.5 * w * v * v);
            }
            for (w, v) in self.face_energy_w[a].iter().zip(&s.b[a]) {
                acc.add(0.5 * w * v * v);
            }
        }
        for (w, v) in self.node_energy_w.iter().zip(&s.kappa) {
            acc.add(0.5 * w * v * v);
        }
        let half_dt = 0.5 * self.dt;
        for n in 0..3 {
            let d = st.face[n];
            for (id, bv) in s.b[n].iter().enumerate() {
                let circ = st.face_circulation(n, Stencil::dims_coords(d, id), &s.da_dt);
                acc.add(half_dt * bv * (self.face_w[n][id] * circ));
            }
        }
        for (id, kv) in s.kappa.iter().enumerate() {
            let flux = st.node_flux(st.node_coords(id), &self.flux_w, &s.da_dt, None);
            acc.add(-half_dt * kv * flux);
        }
        acc.value()
    }

    pub fn max_abs_da_dt(&self) -> f64 {
        self.state.da_dt.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl PotentialSystem for VectorSim {
    fn kind(&self) -> SystemKind {
        SystemKind::Vector
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
        VectorSim::outputs(self)
    }

    fn advance(&mut self, u: &[f64]) -> Result<Vec<f64>> {
        self.step(u)
    }

    fn storage(&self) -> f64 {
        VectorSim::storage(self)
    }

    fn state_vector(&self) -> Vec<f64> {
        self.state.to_vector()
    }

    fn max_abs_state(&self) -> f64 {
        self.max_abs_da_dt()
    }
}

/// Typed step: returns `(y_tan at (n+1)Δt, y_kappa at (n+½)Δt)`.
pub fn step_vector(sim: &mut VectorSim, u_perp: &[f64], u_btan: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len("u_perp", sim.perp_sites.len(), u_perp.len())?;
    check_len("u_btan", sim.btan_sites.len(), u_btan.len())?;
    let mut u = Vec::with_capacity(u_perp.len() + u_btan.len());
    u.extend_from_slice(u_perp);
    u.extend_from_slice(u_btan);
    sim.step(&u)?;
    Ok(sim.typed_outputs())
}

/// `(y_tan at nΔt, y_kappa at (n−½)Δt)`.
pub fn vector_outputs(sim: &VectorSim) -> (Vec<f64>, Vec<f64>) {
    sim.typed_outputs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Face, Family, GridSpec, Side};
    use crate::materials::{uniform_materials, MU0};

    fn setup(n: usize, h: f64) -> (GridIndex, MaterialMaps) {
        let g = GridIndex::new(GridSpec::uniform(n, n, n, h).unwrap()).unwrap();
        let m = uniform_materials(&g, 1.0, 1.0).unwrap();
        (g, m)
    }

    #[test]
    fn zero_state_is_fixed_point() {
        let (g, m) = setup(2, 1e-3);
        let mut sim = init_vector(&g, &m, 1e-12, &VectorState::zeros(&g)).unwrap();
        assert_eq!(sim.storage(), 0.0);
        let (np, nb) = (sim.perp_sites().len(), sim.btan_sites().len());
        let (yt, yk) = step_vector(&mut sim, &vec![0.0; np], &vec![0.0; nb]).unwrap();
        assert!(yt.iter().chain(&yk).all(|&v| v == 0.0));
        assert_eq!(sim.state().to_vector(), VectorState::zeros(&g).to_vector());
    }

    #[test]
    fn size_errors() {
        let (g, m) = setup(2, 1e-3);
        let mut bad = VectorState::zeros(&g);
        bad.b[1].push(0.0);
        assert!(init_vector(&g, &m, 1e-12, &bad).is_err());
        let mut sim = init_vector(&g, &m, 1e-12, &VectorState::zeros(&g)).unwrap();
        assert!(step_vector(&mut sim, &[0.0], &[]).is_err());
    }

    #[test]
    fn pure_b_storage() {
        let (g, m) = setup(3, 1.0);
        let mut s = VectorState::zeros(&g);
        let f = g.id(Family::Face(Axis::X), [1, 1, 1]).unwrap();
        s.b[0][f] = 1.0;
        let sim = init_vector(&g, &m, 1e-9, &s).unwrap();
        let expect = 0.5 / MU0;
        assert!((sim.storage() - expect).abs() <= 1e-14 * expect);
        assert!((expect - 3.9789e5).abs() < 5.0);
    }

    /// A single hanging B sample on face z− drives the host edge's `[∂tA]`
    /// with coefficient `sign·area·μ⁻¹`: −dx·dy·μ⁻¹ for B_y on x-edges,
    /// +dx·dy·μ⁻¹ for B_x on y-edges.
    #[test]
    fn hanging_b_coefficients_on_z_minus() {
        let (g, m) = setup(2, 1e-3);
        let dt = 1e-13;
        let zm = Face { axis: Axis::Z, side: Side::Minus };
        let base = init_vector(&g, &m, dt, &VectorState::zeros(&g)).unwrap();
        let np = base.perp_sites().len();
        for (host_axis, expected_sign) in [(Axis::X, -1.0), (Axis::Y, 1.0)] {
            let idx = base.btan_sites().iter().position(|s| s.face == zm && s.host == Family::Edge(host_axis)).unwrap();
            let site = base.btan_sites()[idx];
            let mut sim = base.clone();
            let mut u = vec![0.0; sim.input_len()];
            u[np + idx] = 1.0;
            sim.step(&u).unwrap();
            let e = host_axis.index();
            let a = sim.state().da_dt[e][site.host_id];
            let ijk = site.host_ijk;
            let lhs = m.eps_edge[e][site.host_id] * g.edge_dual_area(host_axis, ijk) * g.edge_length(host_axis) / dt;
            let b_axis = site.direction;
            let area = g.edge_length(host_axis) * g.dual_step(b_axis, ijk[b_axis.index()]);
            let expect = expected_sign * area / MU0 / lhs;
            assert!((a - expect).abs() <= 1e-14 * expect.abs(), "{a} vs {expect}");
        }
    }
}
