//! Explicit sparse assembly of `R`, `F`, `B`, `L` and `S`.
//!
//! Assembly walks entity incidences directly and never calls into the
//! solvers' stencils, so it serves as an independent route to the update
//! equations and the storage function.

use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::grid::{Axis, Family, GridIndex, HangingFamily};
use crate::materials::MaterialMaps;
use crate::scalar::ScalarState;
use crate::sum::CompensatedSum;
use crate::system::SystemKind;
use crate::vector::VectorState;

/// Assembly refuses state dimensions beyond this.
pub const ASSEMBLY_LIMIT: usize = 200_000;

#[derive(Clone, Debug)]
pub struct SystemMatrices {
    pub which: SystemKind,
    pub dt: f64,
    /// Length of the integer-time block of the state.
    pub first_block: usize,
    pub r: CsMat<f64>,
    pub f: CsMat<f64>,
    pub b_in: CsMat<f64>,
    pub l_out: CsMat<f64>,
    /// Diagonal of `S`.
    pub s: Vec<f64>,
}

impl SystemMatrices {
    pub fn state_dim(&self) -> usize {
        self.r.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.s.len()
    }

    /// `S` as a sparse diagonal matrix.
    pub fn s_matrix(&self) -> CsMat<f64> {
        let n = self.s.len();
        let mut t = TriMat::new((n, n));
        for (i, v) in self.s.iter().enumerate() {
            t.add_triplet(i, i, *v);
        }
        t.to_csr()
    }

    /// `(Δt/2) xᵀ R x` with compensated summation.
    pub fn storage(&self, x: &[f64]) -> f64 {
        let mut acc = CompensatedSum::new();
        for (row, vec) in self.r.outer_iterator().enumerate() {
            for (col, v) in vec.iter() {
                acc.add(x[row] * v * x[col]);
            }
        }
        0.5 * self.dt * acc.value()
    }

    /// `y = Lᵀ x`.
    pub fn outputs(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.l_out.cols()];
        for (row, vec) in self.l_out.outer_iterator().enumerate() {
            for (col, v) in vec.iter() {
                y[col] += v * x[row];
            }
        }
        y
    }

    /// Supply rate `Δt (y⁻ + y⁺)ᵀ S u / 2`.
    pub fn supply(&self, u: &[f64], y_minus: &[f64], y_plus: &[f64]) -> Result<f64> {
        crate::system::supply_rate(&self.s, u, y_minus, y_plus, self.dt)
    }

    /// Write the matrices as `row col value` triplets, one per line,
    /// preceded by a `# name rows cols nnz` header per matrix.
    pub fn write_triplets<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let s = self.s_matrix();
        for (name, m) in [("R", &self.r), ("F", &self.f), ("B", &self.b_in), ("L", &self.l_out), ("S", &s)] {
            writeln!(w, "# {name} {} {} {}", m.rows(), m.cols(), m.nnz())?;
            for (v, (r, c)) in m.iter() {
                writeln!(w, "{r} {c} {v:e}")?;
            }
        }
        Ok(())
    }
}

/// Builder that keeps `R` and `F` exactly symmetric and antisymmetric by
/// inserting mirrored entries together.
struct Blocks {
    r: TriMat<f64>,
    f: TriMat<f64>,
}

impl Blocks {
    fn new(n: usize) -> Self {
        Blocks { r: TriMat::new((n, n)), f: TriMat::new((n, n)) }
    }

    fn diag(&mut self, i: usize, v: f64) {
        self.r.add_triplet(i, i, v);
    }

    /// Coupling `Z[row, col]` between a second-block row and a first-block
    /// column: `R21 = Z/2` below the diagonal and mirrored above; `F` carries
    /// `R21ᵀ` above and `−R21` below.
    fn coupling(&mut self, row: usize, col: usize, z: f64) {
        let half = 0.5 * z;
        self.r.add_triplet(row, col, half);
        self.r.add_triplet(col, row, half);
        self.f.add_triplet(col, row, half);
        self.f.add_triplet(row, col, -half);
    }
}

pub fn assemble_system(
    grid: &GridIndex,
    materials: &MaterialMaps,
    dt: f64,
    which: SystemKind,
) -> Result<SystemMatrices> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    materials.validate(grid)?;
    let dim = match which {
        SystemKind::Scalar => ScalarState::dim(grid),
        SystemKind::Vector => VectorState::dim(grid),
    };
    if dim > ASSEMBLY_LIMIT {
        return Err(Error::TooLarge { dim, limit: ASSEMBLY_LIMIT });
    }
    match which {
        SystemKind::Scalar => Ok(assemble_scalar(grid, materials, dt, dim)),
        SystemKind::Vector => Ok(assemble_vector(grid, materials, dt, dim)),
    }
}

fn edge_offsets(grid: &GridIndex) -> [usize; 3] {
    let mut off = [0; 3];
    let mut acc = 0;
    for a in Axis::ALL {
        off[a.index()] = acc;
        acc += grid.edge_count(a);
    }
    off
}

fn face_offsets(grid: &GridIndex, base: usize) -> [usize; 3] {
    let mut off = [0; 3];
    let mut acc = base;
    for a in Axis::ALL {
        off[a.index()] = acc;
        acc += grid.face_count(a);
    }
    off
}

/// Endpoints of a primary edge as node ids.
fn edge_nodes(grid: &GridIndex, a: Axis, ijk: [usize; 3]) -> (usize, usize) {
    let mut end = ijk;
    end[a.index()] += 1;
    (grid.id(Family::Node, ijk).unwrap(), grid.id(Family::Node, end).unwrap())
}

/// Add the diagonal `R11 = εS''l'/Δt` and the divergence coupling
/// `D S'' ε` (sign `sign`) of every primary edge against the node block.
fn edges_and_divergence(grid: &GridIndex, m: &MaterialMaps, dt: f64, node_base: usize, sign: f64, blk: &mut Blocks) {
    let eoff = edge_offsets(grid);
    for a in Axis::ALL {
        let fam = Family::Edge(a);
        for id in 0..grid.count(fam) {
            let ijk = grid.coords(fam, id).unwrap();
            let es = m.eps_edge[a.index()][id] * grid.edge_dual_area(a, ijk);
            let col = eoff[a.index()] + id;
            blk.diag(col, es * grid.edge_length(a) / dt);
            let (start, end) = edge_nodes(grid, a, ijk);
            // outward flux of the edge quantity: leaves `start`, enters `end`
            blk.coupling(node_base + start, col, sign * es);
            blk.coupling(node_base + end, col, -sign * es);
        }
    }
}

fn node_diagonal(grid: &GridIndex, m: &MaterialMaps, dt: f64, node_base: usize, blk: &mut Blocks) {
    for id in 0..grid.node_count() {
        let ijk = grid.coords(Family::Node, id).unwrap();
        blk.diag(node_base + id, m.chi_node[id] * grid.node_volume(ijk) / dt);
    }
}

fn assemble_scalar(grid: &GridIndex, m: &MaterialMaps, dt: f64, dim: usize) -> SystemMatrices {
    let node_base = grid.total_edges();
    let mut blk = Blocks::new(dim);
    edges_and_divergence(grid, m, dt, node_base, 1.0, &mut blk);
    node_diagonal(grid, m, dt, node_base, &mut blk);

    let sites = grid.enumerate_hanging(HangingFamily::ScalarGradPerp);
    let mut l = TriMat::new((dim, sites.len()));
    let mut b = TriMat::new((dim, sites.len()));
    let mut s = Vec::with_capacity(sites.len());
    for (i, site) in sites.iter().enumerate() {
        let w = site.sign * site.area * m.eps_perp[i];
        l.add_triplet(node_base + site.host_id, i, 1.0);
        b.add_triplet(node_base + site.host_id, i, w);
        s.push(w);
    }
    SystemMatrices {
        which: SystemKind::Scalar,
        dt,
        first_block: node_base,
        r: blk.r.to_csr(),
        f: blk.f.to_csr(),
        b_in: b.to_csr(),
        l_out: l.to_csr(),
        s,
    }
}

fn assemble_vector(grid: &GridIndex, m: &MaterialMaps, dt: f64, dim: usize) -> SystemMatrices {
    let n_edges = grid.total_edges();
    let eoff = edge_offsets(grid);
    let foff = face_offsets(grid, n_edges);
    let node_base = n_edges + grid.total_faces();
    let mut blk = Blocks::new(dim);

    // κ block couples through −D S'' ε
    edges_and_divergence(grid, m, dt, node_base, -1.0, &mut blk);
    node_diagonal(grid, m, dt, node_base, &mut blk);

    // B block: diagonal μ⁻¹S'l''/Δt, coupling μ⁻¹ l'' C l'
    for n in Axis::ALL {
        let fam = Family::Face(n);
        let p = n.next();
        let q = n.prev();
        for id in 0..grid.count(fam) {
            let ijk = grid.coords(fam, id).unwrap();
            let ml = m.mu_inv_face[n.index()][id] * grid.face_dual_length(n, ijk);
            let row = foff[n.index()] + id;
            blk.diag(row, ml * grid.face_area(n) / dt);
            let mut up_p = ijk;
            up_p[p.index()] += 1;
            let mut up_q = ijk;
            up_q[q.index()] += 1;
            // right-hand circulation about n: +p edge at ijk, +q edge at ijk+p̂,
            // −p edge at ijk+q̂, −q edge at ijk
            let boundary = [(p, ijk, 1.0), (q, up_p, 1.0), (p, up_q, -1.0), (q, ijk, -1.0)];
            for (axis, at, c) in boundary {
                let e = grid.id(Family::Edge(axis), at).unwrap();
                blk.coupling(row, eoff[axis.index()] + e, ml * c * grid.edge_length(axis));
            }
        }
    }

    let perp = grid.enumerate_hanging(HangingFamily::ADotPerp);
    let btan = grid.enumerate_hanging(HangingFamily::BTan);
    let ninp = perp.len() + btan.len();
    let mut l = TriMat::new((dim, ninp));
    let mut b = TriMat::new((dim, ninp));
    let mut s = Vec::with_capacity(ninp);
    for (i, site) in perp.iter().enumerate() {
        // κ row: −(flux + sign·area·ε·u)
        let w = -(site.sign * site.area * m.eps_perp[i]);
        l.add_triplet(node_base + site.host_id, i, 1.0);
        b.add_triplet(node_base + site.host_id, i, w);
        s.push(w);
    }
    for (j, site) in btan.iter().enumerate() {
        let Family::Edge(e) = site.host else { unreachable!() };
        let col = perp.len() + j;
        let row = eoff[e.index()] + site.host_id;
        let w = site.sign * site.area * m.mu_inv_btan[j];
        l.add_triplet(row, col, 1.0);
        b.add_triplet(row, col, w);
        s.push(w);
    }
    SystemMatrices {
        which: SystemKind::Vector,
        dt,
        first_block: n_edges,
        r: blk.r.to_csr(),
        f: blk.f.to_csr(),
        b_in: b.to_csr(),
        l_out: l.to_csr(),
        s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::materials::uniform_materials;

    fn sys(which: SystemKind, n: usize) -> SystemMatrices {
        let g = GridIndex::new(GridSpec::uniform(n, n, n, 1e-3).unwrap()).unwrap();
        let m = uniform_materials(&g, 1.0, 1.0).unwrap();
        assemble_system(&g, &m, 1e-12, which).unwrap()
    }

    #[test]
    fn scalar_dimensions() {
        let s = sys(SystemKind::Scalar, 2);
        assert_eq!(s.state_dim(), 81);
        assert_eq!(s.first_block, 54);
        assert_eq!(s.input_dim(), 54);
        let v = sys(SystemKind::Vector, 2);
        assert_eq!(v.state_dim(), 54 + 36 + 27);
        assert_eq!(v.input_dim(), 54 + 72);
    }

    #[test]
    fn symmetry_is_exact() {
        for which in [SystemKind::Scalar, SystemKind::Vector] {
            let s = sys(which, 3);
            let rt: CsMat<f64> = s.r.transpose_view().to_csr();
            assert_eq!(s.r, rt);
            let ft: CsMat<f64> = s.f.transpose_view().to_csr();
            let neg = ft.map(|v| -v);
            assert_eq!(s.f, neg);
        }
    }

    #[test]
    fn input_matrix_factorizes() {
        for which in [SystemKind::Scalar, SystemKind::Vector] {
            let s = sys(which, 2);
            let ls: CsMat<f64> = &s.l_out * &s.s_matrix();
            assert_eq!(ls, s.b_in);
        }
    }

    #[test]
    fn rejects_huge_grids() {
        let g = GridIndex::new(GridSpec::uniform(60, 60, 60, 1e-3).unwrap()).unwrap();
        let m = uniform_materials(&g, 1.0, 1.0).unwrap();
        assert!(matches!(assemble_system(&g, &m, 1e-12, SystemKind::Vector), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn triplet_dump_has_headers() {
        let s = sys(SystemKind::Scalar, 1);
        let mut buf = Vec::new();
        s.write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let headers: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
        assert_eq!(headers.len(), 5);
        assert!(headers[0].starts_with("# R 20 20"));
        let entries = text.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(entries, s.r.nnz() + s.f.nnz() + s.b_in.nnz() + s.l_out.nnz() + s.s.len());
    }
}
