//! Staggered primary/secondary grid geometry.
//!
//! Primary nodes sit at `(i·dx, j·dy, k·dz)` for `i ∈ 0..=nx` (and likewise
//! for `j`, `k`). A primary edge along axis `e` is labelled by the index of
//! its lower endpoint; a primary face normal to axis `n` by the index of its
//! lower corner. Primary faces are pierced by secondary edges of the same
//! axis, so both share one index family.
//!
//! Secondary cells are centred on primary nodes. Cells touching the region
//! boundary are cut in half once per incident boundary face, which is where
//! all the `h/2` factors below come from.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    /// Next axis in cyclic order (x → y → z → x).
    #[inline]
    pub fn next(self) -> Axis {
        Axis::from_index(self.index() + 1)
    }

    #[inline]
    pub fn prev(self) -> Axis {
        Axis::from_index(self.index() + 2)
    }

    /// The axis orthogonal to two distinct axes.
    pub fn third(a: Axis, b: Axis) -> Axis {
        debug_assert_ne!(a, b);
        Axis::from_index(3 - a.index() - b.index())
    }

    pub fn unit(self) -> [f64; 3] {
        let mut u = [0.0; 3];
        u[self.index()] = 1.0;
        u
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Minus,
    Plus,
}

/// One of the six boundary faces of the rectangular region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub axis: Axis,
    pub side: Side,
}

impl Face {
    /// Canonical face order: x−, x+, y−, y+, z−, z+.
    pub const ALL: [Face; 6] = [
        Face { axis: Axis::X, side: Side::Minus },
        Face { axis: Axis::X, side: Side::Plus },
        Face { axis: Axis::Y, side: Side::Minus },
        Face { axis: Axis::Y, side: Side::Plus },
        Face { axis: Axis::Z, side: Side::Minus },
        Face { axis: Axis::Z, side: Side::Plus },
    ];

    /// Component of the outward normal along `self.axis`.
    #[inline]
    pub fn normal_sign(self) -> f64 {
        match self.side {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }

    pub fn outward_normal(self) -> [f64; 3] {
        let mut n = [0.0; 3];
        n[self.axis.index()] = self.normal_sign();
        n
    }

    pub fn ordinal(self) -> usize {
        2 * self.axis.index() + (self.side == Side::Plus) as usize
    }

    pub fn name(self) -> &'static str {
        match (self.axis, self.side) {
            (Axis::X, Side::Minus) => "x-",
            (Axis::X, Side::Plus) => "x+",
            (Axis::Y, Side::Minus) => "y-",
            (Axis::Y, Side::Plus) => "y+",
            (Axis::Z, Side::Minus) => "z-",
            (Axis::Z, Side::Plus) => "z+",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, nz: usize, dx: f64, dy: f64, dz: f64) -> Result<Self> {
        let spec = GridSpec { nx, ny, nz, dx, dy, dz };
        spec.validate()?;
        Ok(spec)
    }

    /// Cubic cells of side `h`.
    pub fn uniform(nx: usize, ny: usize, nz: usize, h: f64) -> Result<Self> {
        Self::new(nx, ny, nz, h, h, h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.nz == 0 {
            return Err(Error::InvalidSpec(format!(
                "cell counts must be positive, got {}x{}x{}",
                self.nx, self.ny, self.nz
            )));
        }
        for (name, d) in [("dx", self.dx), ("dy", self.dy), ("dz", self.dz)] {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {d}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn cells(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.nx,
            Axis::Y => self.ny,
            Axis::Z => self.nz,
        }
    }

    #[inline]
    pub fn step(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
            Axis::Z => self.dz,
        }
    }

    pub fn extent(&self, axis: Axis) -> f64 {
        self.cells(axis) as f64 * self.step(axis)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy * self.dz
    }
}

/// Index family of a grid entity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Node,
    /// Primary edge directed along the axis.
    Edge(Axis),
    /// Primary face normal to the axis, equivalently the secondary edge
    /// along the axis that pierces it.
    Face(Axis),
}

/// A concrete entity: family plus integer label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Entity {
    pub family: Family,
    pub ijk: [usize; 3],
}

/// Entity counts and index maps of a staggered grid.
///
/// Flat ids are row-major with `k` fastest: `id = (i·d1 + j)·d2 + k` where
/// `(d0, d1, d2)` are the per-family dimensions.
#[derive(Clone, Debug)]
pub struct GridIndex {
    spec: GridSpec,
}

impl GridIndex {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        Ok(GridIndex { spec })
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Per-axis index ranges for a family.
    pub fn dims(&self, family: Family) -> [usize; 3] {
        let n = [self.spec.nx, self.spec.ny, self.spec.nz];
        let mut d = [n[0] + 1, n[1] + 1, n[2] + 1];
        match family {
            Family::Node => {}
            Family::Edge(a) => d[a.index()] = n[a.index()],
            Family::Face(a) => {
                for b in Axis::ALL {
                    if b != a {
                        d[b.index()] = n[b.index()];
                    }
                }
            }
        }
        d
    }

    pub fn count(&self, family: Family) -> usize {
        self.dims(family).iter().product()
    }

    pub fn node_count(&self) -> usize {
        self.count(Family::Node)
    }

    pub fn edge_count(&self, axis: Axis) -> usize {
        self.count(Family::Edge(axis))
    }

    pub fn face_count(&self, axis: Axis) -> usize {
        self.count(Family::Face(axis))
    }

    pub fn total_edges(&self) -> usize {
        Axis::ALL.iter().map(|&a| self.edge_count(a)).sum()
    }

    pub fn total_faces(&self) -> usize {
        Axis::ALL.iter().map(|&a| self.face_count(a)).sum()
    }

    /// Flat id, or `None` when out of range.
    #[inline]
    pub fn id(&self, family: Family, ijk: [usize; 3]) -> Option<usize> {
        let d = self.dims(family);
        if ijk[0] < d[0] && ijk[1] < d[1] && ijk[2] < d[2] {
            Some((ijk[0] * d[1] + ijk[1]) * d[2] + ijk[2])
        } else {
            None
        }
    }

    /// Inverse of [`GridIndex::id`].
    pub fn coords(&self, family: Family, id: usize) -> Option<[usize; 3]> {
        let d = self.dims(family);
        if id >= d[0] * d[1] * d[2] {
            return None;
        }
        let k = id % d[2];
        let j = (id / d[2]) % d[1];
        let i = id / (d[1] * d[2]);
        Some([i, j, k])
    }

    /// Extent of the secondary cell around node index `idx` along `axis`:
    /// `h` inside, `h/2` on the two boundary planes.
    #[inline]
    pub fn dual_step(&self, axis: Axis, idx: usize) -> f64 {
        let h = self.spec.step(axis);
        if idx == 0 || idx == self.spec.cells(axis) {
            0.5 * h
        } else {
            h
        }
    }

    /// Secondary cell volume V'' around a node.
    pub fn node_volume(&self, ijk: [usize; 3]) -> f64 {
        self.dual_step(Axis::X, ijk[0]) * self.dual_step(Axis::Y, ijk[1]) * self.dual_step(Axis::Z, ijk[2])
    }

    /// Primary edge length l'.
    #[inline]
    pub fn edge_length(&self, axis: Axis) -> f64 {
        self.spec.step(axis)
    }

    /// Area S'' of the secondary face pierced by a primary edge.
    pub fn edge_dual_area(&self, axis: Axis, ijk: [usize; 3]) -> f64 {
        let p = axis.next();
        let q = axis.prev();
        self.dual_step(p, ijk[p.index()]) * self.dual_step(q, ijk[q.index()])
    }

    /// Primary face area S'.
    pub fn face_area(&self, axis: Axis) -> f64 {
        self.spec.step(axis.next()) * self.spec.step(axis.prev())
    }

    /// Length l'' of the secondary edge piercing a primary face.
    pub fn face_dual_length(&self, axis: Axis, ijk: [usize; 3]) -> f64 {
        self.dual_step(axis, ijk[axis.index()])
    }

    /// Dual weight of an entity: V'' for nodes, S'' for primary edges and
    /// l'' for primary faces (secondary edges).
    pub fn dual_weight(&self, entity: Entity) -> Result<f64> {
        if self.id(entity.family, entity.ijk).is_none() {
            return Err(Error::OutOfRange(format!("{:?} at {:?}", entity.family, entity.ijk)));
        }
        Ok(match entity.family {
            Family::Node => self.node_volume(entity.ijk),
            Family::Edge(a) => self.edge_dual_area(a, entity.ijk),
            Family::Face(a) => self.face_dual_length(a, entity.ijk),
        })
    }

    /// Geometric centre of an entity (m).
    pub fn position(&self, family: Family, ijk: [usize; 3]) -> [f64; 3] {
        let mut off = [0.0; 3];
        match family {
            Family::Node => {}
            Family::Edge(a) => off[a.index()] = 0.5,
            Family::Face(a) => {
                for b in Axis::ALL {
                    if b != a {
                        off[b.index()] = 0.5;
                    }
                }
            }
        }
        let s = &self.spec;
        [(ijk[0] as f64 + off[0]) * s.dx, (ijk[1] as f64 + off[1]) * s.dy, (ijk[2] as f64 + off[2]) * s.dz]
    }

    /// Node index of `face` along its normal axis (0 or n).
    #[inline]
    pub fn face_plane(&self, face: Face) -> usize {
        match face.side {
            Side::Minus => 0,
            Side::Plus => self.spec.cells(face.axis),
        }
    }

    /// Whether a node index lies on `face`.
    #[inline]
    pub fn on_face(&self, face: Face, ijk: [usize; 3]) -> bool {
        ijk[face.axis.index()] == self.face_plane(face)
    }

    /// Boundary hanging sites of one family, in canonical order.
    pub fn enumerate_hanging(&self, family: HangingFamily) -> Vec<HangingSite> {
        let mut out = Vec::new();
        for face in Face::ALL {
            match family {
                HangingFamily::ScalarGradPerp | HangingFamily::ADotPerp => self.push_perp_sites(family, face, &mut out),
                HangingFamily::BTan => self.push_btan_sites(face, &mut out),
            }
        }
        out
    }

    /// Number of sites of a family on the given face without materialising them.
    pub fn hanging_count_on_face(&self, family: HangingFamily, face: Face) -> usize {
        let n = face.axis;
        let p = n.next();
        let q = n.prev();
        let c = |a: Axis| self.spec.cells(a);
        match family {
            HangingFamily::ScalarGradPerp | HangingFamily::ADotPerp => (c(p) + 1) * (c(q) + 1),
            HangingFamily::BTan => c(p) * (c(q) + 1) + (c(p) + 1) * c(q),
        }
    }

    fn push_perp_sites(&self, family: HangingFamily, face: Face, out: &mut Vec<HangingSite>) {
        let n = face.axis;
        let d = self.dims(Family::Node);
        let plane = self.face_plane(face);
        for i in 0..d[0] {
            for j in 0..d[1] {
                for k in 0..d[2] {
                    let ijk = [i, j, k];
                    if ijk[n.index()] != plane {
                        continue;
                    }
                    let area = self.dual_step(n.next(), ijk[n.next().index()])
                        * self.dual_step(n.prev(), ijk[n.prev().index()]);
                    out.push(HangingSite {
                        family,
                        face,
                        host: Family::Node,
                        host_ijk: ijk,
                        host_id: self.id(Family::Node, ijk).unwrap(),
                        direction: n,
                        sign: face.normal_sign(),
                        area,
                    });
                }
            }
        }
    }

    fn push_btan_sites(&self, face: Face, out: &mut Vec<HangingSite>) {
        let n = face.axis;
        let plane = self.face_plane(face);
        let minus_n = {
            let mut v = face.outward_normal();
            v.iter_mut().for_each(|c| *c = -*c);
            v
        };
        let mut tangential = [n.next(), n.prev()];
        tangential.sort();
        for e in tangential {
            let b_axis = Axis::third(n, e);
            let sign = dot(cross(b_axis.unit(), e.unit()), minus_n);
            let fam = Family::Edge(e);
            let d = self.dims(fam);
            for i in 0..d[0] {
                for j in 0..d[1] {
                    for k in 0..d[2] {
                        let ijk = [i, j, k];
                        if ijk[n.index()] != plane {
                            continue;
                        }
                        let area = self.edge_length(e) * self.dual_step(b_axis, ijk[b_axis.index()]);
                        out.push(HangingSite {
                            family: HangingFamily::BTan,
                            face,
                            host: fam,
                            host_ijk: ijk,
                            host_id: self.id(fam, ijk).unwrap(),
                            direction: b_axis,
                            sign,
                            area,
                        });
                    }
                }
            }
        }
    }
}

/// Convenience constructor.
pub fn build_grid(spec: GridSpec) -> Result<GridIndex> {
    GridIndex::new(spec)
}

/// Kind of boundary hanging variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HangingFamily {
    /// Normal derivative of φ at a boundary node (scalar system input).
    ScalarGradPerp,
    /// Normal component of ∂A/∂t at a boundary node (vector system input).
    ADotPerp,
    /// Tangential B just outside a boundary-tangential primary edge.
    BTan,
}

/// One boundary input sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HangingSite {
    pub family: HangingFamily,
    pub face: Face,
    /// Host family: `Node` for the normal families, `Edge(e)` for `BTan`.
    pub host: Family,
    pub host_ijk: [usize; 3],
    pub host_id: usize,
    /// Axis of the sampled component: face normal for the normal families,
    /// the B component for `BTan`.
    pub direction: Axis,
    /// `n̂·û` for normal families; `(û_B × û_E)·(−n̂)` for `BTan`.
    pub sign: f64,
    /// Dual boundary area attributed to the sample (m²).
    pub area: f64,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
