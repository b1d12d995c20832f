#![allow(dead_code)]

use pfdtd_core::{
    cfl_limit_materials, init_scalar, init_vector, materials_from_cells, uniform_materials, Axis, Family, GridIndex,
    GridSpec, MaterialMaps, ScalarSim, ScalarState, SystemKind, VectorSim, VectorState, EPS0, MU0,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cube(n: usize, h: f64) -> GridIndex {
    GridIndex::new(GridSpec::uniform(n, n, n, h).unwrap()).unwrap()
}

pub fn vacuum(g: &GridIndex) -> MaterialMaps {
    uniform_materials(g, 1.0, 1.0).unwrap()
}

/// Independent random ε ∈ [ε₀, 4ε₀] per cell, vacuum μ.
pub fn random_eps(g: &GridIndex, r: &mut ChaCha8Rng) -> MaterialMaps {
    let n = g.spec().cell_count();
    let eps: Vec<f64> = (0..n).map(|_| EPS0 * r.gen_range(1.0..4.0)).collect();
    materials_from_cells(g, &eps, &vec![MU0; n]).unwrap()
}

pub fn safe_dt(g: &GridIndex, m: &MaterialMaps, factor: f64) -> f64 {
    factor * cfl_limit_materials(g.spec(), m).unwrap()
}

/// Random state with each field family scaled to its natural magnitude.
pub fn random_scalar_state(g: &GridIndex, r: &mut ChaCha8Rng) -> ScalarState {
    let mut s = ScalarState::zeros(g);
    for v in s.grad_phi.iter_mut().flatten() {
        *v = r.gen_range(-1.0..1.0);
    }
    for v in s.dphi_dt.iter_mut() {
        *v = 3e8 * r.gen_range(-1.0..1.0);
    }
    s
}

pub fn random_vector_state(g: &GridIndex, r: &mut ChaCha8Rng) -> VectorState {
    let mut s = VectorState::zeros(g);
    for v in s.da_dt.iter_mut().flatten() {
        *v = r.gen_range(-1.0..1.0);
    }
    for v in s.b.iter_mut().flatten() {
        *v = r.gen_range(-1.0..1.0) / 3e8;
    }
    for v in s.kappa.iter_mut() {
        *v = 3e8 * r.gen_range(-1.0..1.0);
    }
    s
}

pub fn scalar_sim(g: &GridIndex, m: &MaterialMaps, dt: f64, s: &ScalarState) -> ScalarSim {
    init_scalar(g, m, dt, s).unwrap()
}

pub fn vector_sim(g: &GridIndex, m: &MaterialMaps, dt: f64, s: &VectorState) -> VectorSim {
    init_vector(g, m, dt, s).unwrap()
}

/// Index ranges of the homogeneous-unit segments of the assembled state.
pub fn segments(g: &GridIndex, which: SystemKind) -> Vec<std::ops::Range<usize>> {
    let mut sizes: Vec<usize> = Axis::ALL.iter().map(|&a| g.count(Family::Edge(a))).collect();
    if which == SystemKind::Vector {
        sizes.extend(Axis::ALL.iter().map(|&a| g.count(Family::Face(a))));
    }
    sizes.push(g.node_count());
    let mut out = Vec::new();
    let mut start = 0;
    for s in sizes {
        out.push(start..start + s);
        start += s;
    }
    out
}

/// Worst per-segment relative max-norm difference.
pub fn segment_rel_err(a: &[f64], b: &[f64], segs: &[std::ops::Range<usize>]) -> f64 {
    segs.iter()
        .map(|r| {
            let scale = b[r.clone()].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = a[r.clone()].iter().zip(&b[r.clone()]).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            if scale == 0.0 {
                diff
            } else {
                diff / scale
            }
        })
        .fold(0.0, f64::max)
}

pub fn random_inputs(len: usize, scale: &[f64], r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|i| scale[i] * r.gen_range(-1.0..1.0)).collect()
}
