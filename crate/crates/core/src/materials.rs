//! Coefficient maps for inhomogeneous isotropic lossless media.
//!
//! ε lives on primary edges, χ = με² on primary nodes and μ⁻¹ on secondary
//! edges. Boundary hanging samples carry their own coefficients.

use crate::error::{check_len, Error, Result};
use crate::grid::{Axis, Family, GridIndex, HangingFamily};

/// Vacuum permittivity (F/m), CODATA 2018.
pub const EPS0: f64 = 8.8541878128e-12;
/// Vacuum permeability (H/m), CODATA 2018.
pub const MU0: f64 = 1.25663706212e-6;

/// Speed of light derived from [`EPS0`] and [`MU0`].
pub fn light_speed() -> f64 {
    1.0 / (MU0 * EPS0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialMaps {
    /// ε per primary edge, indexed by axis then edge id.
    pub eps_edge: [Vec<f64>; 3],
    /// ε averaged at each node; used for hanging ⊥ coefficients and CFL.
    pub eps_node: Vec<f64>,
    /// χ = με² per node.
    pub chi_node: Vec<f64>,
    /// μ⁻¹ per secondary edge (indexed like primary faces).
    pub mu_inv_face: [Vec<f64>; 3],
    /// ε at each normal hanging site, in `enumerate_hanging` order. Both
    /// normal families share the same ordering.
    pub eps_perp: Vec<f64>,
    /// μ⁻¹ at each tangential-B hanging site.
    pub mu_inv_btan: Vec<f64>,
}

impl MaterialMaps {
    /// Check sizes against `grid` and that every entry is positive and finite.
    pub fn validate(&self, grid: &GridIndex) -> Result<()> {
        for a in Axis::ALL {
            check_len("eps_edge", grid.edge_count(a), self.eps_edge[a.index()].len())?;
            check_len("mu_inv_face", grid.face_count(a), self.mu_inv_face[a.index()].len())?;
        }
        check_len("eps_node", grid.node_count(), self.eps_node.len())?;
        check_len("chi_node", grid.node_count(), self.chi_node.len())?;
        let perp = perp_site_count(grid);
        let btan = btan_site_count(grid);
        check_len("eps_perp", perp, self.eps_perp.len())?;
        check_len("mu_inv_btan", btan, self.mu_inv_btan.len())?;

        let all = self.eps_edge.iter().chain(self.mu_inv_face.iter()).chain([
            &self.eps_node,
            &self.chi_node,
            &self.eps_perp,
            &self.mu_inv_btan,
        ]);
        for v in all {
            if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::InvalidMaterial(format!("coefficient {bad} is not positive and finite")));
            }
        }
        Ok(())
    }

    /// Smallest √(με) over the nodes, the conservative speed bound used for
    /// an inhomogeneous CFL estimate.
    pub fn min_sqrt_mu_eps(&self) -> f64 {
        self.chi_node.iter().zip(&self.eps_node).map(|(chi, eps)| (chi / eps).sqrt()).fold(f64::INFINITY, f64::min)
    }

    /// Whether every map is constant.
    pub fn is_homogeneous(&self) -> bool {
        fn constant(v: &[f64]) -> bool {
            v.windows(2).all(|w| w[0] == w[1])
        }
        let first_eps = self.eps_node.first().copied();
        self.eps_edge.iter().all(|v| constant(v) && v.first().copied() == first_eps)
            && constant(&self.eps_node)
            && constant(&self.chi_node)
            && self.mu_inv_face.iter().all(|v| constant(v))
            && constant(&self.eps_perp)
            && constant(&self.mu_inv_btan)
    }
}

fn perp_site_count(grid: &GridIndex) -> usize {
    crate::grid::Face::ALL.iter().map(|&f| grid.hanging_count_on_face(HangingFamily::ScalarGradPerp, f)).sum()
}

fn btan_site_count(grid: &GridIndex) -> usize {
    crate::grid::Face::ALL.iter().map(|&f| grid.hanging_count_on_face(HangingFamily::BTan, f)).sum()
}

/// Homogeneous medium with relative constants `eps_r`, `mu_r`.
pub fn uniform_materials(grid: &GridIndex, eps_r: f64, mu_r: f64) -> Result<MaterialMaps> {
    if !(eps_r.is_finite() && eps_r > 0.0 && mu_r.is_finite() && mu_r > 0.0) {
        return Err(Error::InvalidMaterial(format!(
            "relative constants must be positive, got eps_r={eps_r}, mu_r={mu_r}"
        )));
    }
    let eps = eps_r * EPS0;
    let mu = mu_r * MU0;
    Ok(MaterialMaps {
        eps_edge: Axis::ALL.map(|a| vec![eps; grid.edge_count(a)]),
        eps_node: vec![eps; grid.node_count()],
        chi_node: vec![mu * eps * eps; grid.node_count()],
        mu_inv_face: Axis::ALL.map(|a| vec![1.0 / mu; grid.face_count(a)]),
        eps_perp: vec![eps; perp_site_count(grid)],
        mu_inv_btan: vec![1.0 / mu; btan_site_count(grid)],
    })
}

/// Per-cell field with neighbourhood averaging.
struct CellField<'a> {
    values: &'a [f64],
    n: [usize; 3],
}

impl CellField<'_> {
    #[inline]
    fn at(&self, c: [usize; 3]) -> f64 {
        self.values[(c[0] * self.n[1] + c[1]) * self.n[2] + c[2]]
    }

    /// Cell index ranges adjacent to a grid coordinate along one axis.
    ///
    /// `centered` means the coordinate lies inside a cell (half-integer
    /// position), otherwise it is a node plane shared by up to two cells.
    fn adjacent(&self, axis: usize, idx: usize, centered: bool) -> (usize, usize) {
        if centered {
            (idx, idx)
        } else {
            let lo = idx.saturating_sub(1);
            let hi = idx.min(self.n[axis] - 1);
            (lo, hi)
        }
    }

    /// Arithmetic mean over the adjacent cells.
    ///
    /// Averages one axis at a time so that a constant field maps to itself
    /// bit for bit.
    fn mean(&self, ijk: [usize; 3], centered: [bool; 3]) -> f64 {
        let r: [(usize, usize); 3] = std::array::from_fn(|a| self.adjacent(a, ijk[a], centered[a]));
        let avg = |a: f64, b: f64, two: bool| if two { 0.5 * (a + b) } else { a };
        let mut acc_x = [0.0; 2];
        for (slot, ci) in [r[0].0, r[0].1].into_iter().enumerate() {
            let mut acc_y = [0.0; 2];
            for (sy, cj) in [r[1].0, r[1].1].into_iter().enumerate() {
                let lo = self.at([ci, cj, r[2].0]);
                let hi = self.at([ci, cj, r[2].1]);
                acc_y[sy] = avg(lo, hi, r[2].0 != r[2].1);
            }
            acc_x[slot] = avg(acc_y[0], acc_y[1], r[1].0 != r[1].1);
        }
        avg(acc_x[0], acc_x[1], r[0].0 != r[0].1)
    }
}

/// Build coefficient maps from absolute per-cell ε (F/m) and μ (H/m).
///
/// Cells are row-major with `k` fastest. Edge ε is the mean over the cells
/// sharing the edge, node ε and μ the mean over the cells sharing the node
/// (with χ formed from those means), and secondary-edge μ⁻¹ the reciprocal
/// of the mean μ of the one or two cells it crosses. Hanging sites take the
/// coefficients of their host entity.
pub fn materials_from_cells(grid: &GridIndex, cell_eps: &[f64], cell_mu: &[f64]) -> Result<MaterialMaps> {
    let spec = grid.spec();
    let ncell = spec.cell_count();
    check_len("cell_eps", ncell, cell_eps.len())?;
    check_len("cell_mu", ncell, cell_mu.len())?;
    for (name, v) in [("eps", cell_eps), ("mu", cell_mu)] {
        if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidMaterial(format!("cell {name} {bad} is not positive and finite")));
        }
    }
    let n = [spec.nx, spec.ny, spec.nz];
    let eps = CellField { values: cell_eps, n };
    let mu = CellField { values: cell_mu, n };

    let map_family = |family: Family, centered: [bool; 3], field: &CellField, f: &dyn Fn(f64) -> f64| {
        (0..grid.count(family))
            .map(|id| f(field.mean(grid.coords(family, id).unwrap(), centered)))
            .collect::<Vec<f64>>()
    };
    let ident = |x: f64| x;
    let recip = |x: f64| 1.0 / x;

    let eps_edge = Axis::ALL.map(|a| {
        let mut c = [false; 3];
        c[a.index()] = true;
        map_family(Family::Edge(a), c, &eps, &ident)
    });
    let mu_inv_face = Axis::ALL.map(|a| {
        let mut c = [true; 3];
        c[a.index()] = false;
        map_family(Family::Face(a), c, &mu, &recip)
    });
    let eps_node = map_family(Family::Node, [false; 3], &eps, &ident);
    let mu_node = map_family(Family::Node, [false; 3], &mu, &ident);
    let chi_node = mu_node.iter().zip(&eps_node).map(|(m, e)| m * e * e).collect();

    let eps_perp = grid.enumerate_hanging(HangingFamily::ScalarGradPerp).iter().map(|s| eps_node[s.host_id]).collect();
    let mu_inv_btan = grid
        .enumerate_hanging(HangingFamily::BTan)
        .iter()
        .map(|s| {
            let Family::Edge(e) = s.host else { unreachable!() };
            let mut c = [false; 3];
            c[e.index()] = true;
            1.0 / mu.mean(s.host_ijk, c)
        })
        .collect();

    Ok(MaterialMaps { eps_edge, eps_node, chi_node, mu_inv_face, eps_perp, mu_inv_btan })
}

/// Same as [`materials_from_cells`] with relative constants.
pub fn materials_from_relative(grid: &GridIndex, cell_eps_r: &[f64], cell_mu_r: &[f64]) -> Result<MaterialMaps> {
    let eps: Vec<f64> = cell_eps_r.iter().map(|e| e * EPS0).collect();
    let mu: Vec<f64> = cell_mu_r.iter().map(|m| m * MU0).collect();
    materials_from_cells(grid, &eps, &mu)
}
