//! Index arithmetic and local difference operators shared by the solvers.

use crate::grid::{Axis, Face, Family, GridIndex};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Dims(pub [usize; 3]);

impl Dims {
    #[inline(always)]
    pub fn at(&self, ijk: [usize; 3]) -> usize {
        (ijk[0] * self.0[1] + ijk[1]) * self.0[2] + ijk[2]
    }

    #[inline]
    pub fn plane(&self) -> usize {
        self.0[1] * self.0[2]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0[0] * self.0[1] * self.0[2]
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Stencil {
    pub n: [usize; 3],
    pub h: [f64; 3],
    pub node: Dims,
    pub edge: [Dims; 3],
    pub face: [Dims; 3],
    perp_offset: [usize; 6],
    /// Offset of the tangential-B block for (face ordinal, host edge axis).
    btan_offset: [[usize; 3]; 6],
    #[allow(dead_code)]
    pub perp_len: usize,
    #[allow(dead_code)]
    pub btan_len: usize,
}

#[inline(always)]
fn shifted(mut ijk: [usize; 3], axis: usize, up: bool) -> [usize; 3] {
    if up {
        ijk[axis] += 1;
    } else {
        ijk[axis] -= 1;
    }
    ijk
}

#[inline(always)]
fn face_ordinal(axis: usize, plus: bool) -> usize {
    2 * axis + plus as usize
}

impl Stencil {
    pub fn new(grid: &GridIndex) -> Self {
        let s = grid.spec();
        let n = [s.nx, s.ny, s.nz];
        let h = [s.dx, s.dy, s.dz];
        let node = Dims(grid.dims(Family::Node));
        let edge = Axis::ALL.map(|a| Dims(grid.dims(Family::Edge(a))));
        let face = Axis::ALL.map(|a| Dims(grid.dims(Family::Face(a))));

        let mut perp_offset = [0; 6];
        let mut btan_offset = [[usize::MAX; 3]; 6];
        let (mut po, mut bo) = (0, 0);
        for f in Face::ALL {
            let o = f.ordinal();
            perp_offset[o] = po;
            let (a, b) = Self::free_axes(f.axis.index());
            po += node.0[a] * node.0[b];
            let mut tang = [f.axis.next(), f.axis.prev()];
            tang.sort();
            for e in tang {
                btan_offset[o][e.index()] = bo;
                let d = edge[e.index()].0;
                let (a, b) = Self::free_axes(f.axis.index());
                bo += d[a] * d[b];
            }
        }
        Stencil { n, h, node, edge, face, perp_offset, btan_offset, perp_len: po, btan_len: bo }
    }

    /// The two axes other than `normal`, in increasing order.
    #[inline(always)]
    fn free_axes(normal: usize) -> (usize, usize) {
        match normal {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    /// Index of the normal hanging site at boundary node `ijk` on a face.
    #[inline(always)]
    pub fn perp_index(&self, axis: usize, plus: bool, ijk: [usize; 3]) -> usize {
        let (a, b) = Self::free_axes(axis);
        self.perp_offset[face_ordinal(axis, plus)] + ijk[a] * self.node.0[b] + ijk[b]
    }

    /// Index of the tangential-B hanging site hosted by edge `(e, ijk)` on a face.
    #[inline(always)]
    pub fn btan_index(&self, axis: usize, plus: bool, e: usize, ijk: [usize; 3]) -> usize {
        let (a, b) = Self::free_axes(axis);
        let d = self.edge[e].0;
        self.btan_offset[face_ordinal(axis, plus)][e] + ijk[a] * d[b] + ijk[b]
    }

    /// Net outward flux `Σ ±w·v` of an edge field through the secondary cell
    /// of node `ijk`, in x−, x+, y−, y+, z−, z+ order. Missing edges outside
    /// the region are replaced by the hanging contribution `hang[site]`, or
    /// skipped when `hang` is `None`.
    #[inline(always)]
    pub fn node_flux(&self, ijk: [usize; 3], w: &[Vec<f64>; 3], v: &[Vec<f64>; 3], hang: Option<&[f64]>) -> f64 {
        let mut acc = 0.0;
        for ax in 0..3 {
            if ijk[ax] == 0 {
                if let Some(hg) = hang {
                    acc += hg[self.perp_index(ax, false, ijk)];
                }
            } else {
                let e = self.edge[ax].at(shifted(ijk, ax, false));
                acc -= w[ax][e] * v[ax][e];
            }
            if ijk[ax] == self.n[ax] {
                if let Some(hg) = hang {
                    acc += hg[self.perp_index(ax, true, ijk)];
                }
            } else {
                let e = self.edge[ax].at(ijk);
                acc += w[ax][e] * v[ax][e];
            }
        }
        acc
    }

    /// Difference of a node field along edge `(axis, ijk)`: end minus start.
    #[inline(always)]
    pub fn edge_difference(&self, axis: usize, ijk: [usize; 3], p: &[f64]) -> f64 {
        p[self.node.at(shifted(ijk, axis, true))] - p[self.node.at(ijk)]
    }

    /// Circulation of an edge field around primary face `(normal, ijk)`,
    /// oriented by the right-hand rule about the normal.
    #[inline(always)]
    pub fn face_circulation(&self, normal: usize, ijk: [usize; 3], a: &[Vec<f64>; 3]) -> f64 {
        let p = (normal + 1) % 3;
        let q = (normal + 2) % 3;
        let aq = &a[q];
        let ap = &a[p];
        let dq = (aq[self.edge[q].at(shifted(ijk, p, true))] - aq[self.edge[q].at(ijk)]) * self.h[q];
        let dp = (ap[self.edge[p].at(shifted(ijk, q, true))] - ap[self.edge[p].at(ijk)]) * self.h[p];
        dq - dp
    }

    /// Magnetic part of the right-hand side of the `[∂tA]` update on edge
    /// `(e, ijk)`: `−l'·Σ c·(μ⁻¹l''B)` over the four primary faces sharing the
    /// edge, with faces outside the region replaced by `hang[site]`.
    #[inline(always)]
    pub fn edge_curl_rhs(
        &self,
        e: usize,
        ijk: [usize; 3],
        wf: &[Vec<f64>; 3],
        b: &[Vec<f64>; 3],
        hang: Option<&[f64]>,
    ) -> f64 {
        let p = (e + 1) % 3;
        let q = (e + 2) % 3;
        let le = self.h[e];
        let mut acc = 0.0;
        // faces normal to q at p+½ (+1) and p−½ (−1)
        // faces normal to p at q+½ (−1) and q−½ (+1)
        for (normal, along, incidence_up) in [(q, p, 1.0), (p, q, -1.0)] {
            if ijk[along] == self.n[along] {
                if let Some(hg) = hang {
                    acc += hg[self.btan_index(along, true, e, ijk)];
                }
            } else {
                let f = self.face[normal].at(ijk);
                acc -= le * incidence_up * (wf[normal][f] * b[normal][f]);
            }
            if ijk[along] == 0 {
                if let Some(hg) = hang {
                    acc += hg[self.btan_index(along, false, e, ijk)];
                }
            } else {
                let f = self.face[normal].at(shifted(ijk, along, false));
                acc += le * incidence_up * (wf[normal][f] * b[normal][f]);
            }
        }
        acc
    }

    /// Inverse of the flat node id.
    #[inline(always)]
    pub fn node_coords(&self, id: usize) -> [usize; 3] {
        let d = self.node.0;
        [id / (d[1] * d[2]), (id / d[2]) % d[1], id % d[2]]
    }

    #[inline(always)]
    pub fn dims_coords(d: Dims, id: usize) -> [usize; 3] {
        let d = d.0;
        [id / (d[1] * d[2]), (id / d[2]) % d[1], id % d[2]]
    }
}
