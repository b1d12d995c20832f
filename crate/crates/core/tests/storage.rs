//! Matrix-free storage, outputs and input weights against the assembled matrices.

mod common;

use common::*;
use pfdtd_core::{assemble_system, PotentialSystem, SystemKind};

fn check<S: PotentialSystem>(sim: &S, m: &pfdtd_core::MaterialMaps) {
    let sys = assemble_system(sim.grid(), m, sim.dt(), sim.kind()).unwrap();
    let x = sim.state_vector();
    let a = sim.storage();
    let b = sys.storage(&x);
    assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{}: {a:e} vs {b:e}", sim.kind());
    assert_eq!(sim.outputs(), sys.outputs(&x));
    let w = sim.input_weights();
    assert_eq!(w.len(), sys.s.len());
    for (p, q) in w.iter().zip(&sys.s) {
        assert!((p - q).abs() <= 1e-15 * q.abs(), "{p:e} vs {q:e}");
    }
}

#[test]
fn storage_matches_assembly() {
    let mut r = rng(1);
    for (n, inhom) in [(1, false), (2, false), (3, true), (4, true)] {
        let g = cube(n, 2e-3);
        let m = if inhom { random_eps(&g, &mut r) } else { vacuum(&g) };
        let dt = safe_dt(&g, &m, 0.7);
        check(&scalar_sim(&g, &m, dt, &random_scalar_state(&g, &mut r)), &m);
        check(&vector_sim(&g, &m, dt, &random_vector_state(&g, &mut r)), &m);
    }
}

#[test]
fn anisotropic_spacing() {
    let g = pfdtd_core::GridIndex::new(pfdtd_core::GridSpec::new(3, 2, 4, 1e-3, 3e-3, 0.5e-3).unwrap()).unwrap();
    let mut r = rng(2);
    let m = random_eps(&g, &mut r);
    let dt = safe_dt(&g, &m, 0.5);
    check(&scalar_sim(&g, &m, dt, &random_scalar_state(&g, &mut r)), &m);
    check(&vector_sim(&g, &m, dt, &random_vector_state(&g, &mut r)), &m);
    assert_eq!(assemble_system(&g, &m, dt, SystemKind::Scalar).unwrap().first_block, g.total_edges());
}
