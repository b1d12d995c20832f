//! Zero-input runs conserve storage in inhomogeneous media.

mod common;

use common::*;
use pfdtd_core::{
    assemble_system, audit_balance, check_positive_definite, materials_from_cells, GridIndex, GridSpec, MaterialMaps,
    PdMethod, PotentialSystem, SystemKind, ZeroDrive, EPS0, MU0,
};

/// Smooth ε bump, 1 to 4 ε₀.
fn smooth_eps(g: &GridIndex) -> MaterialMaps {
    let s = g.spec();
    let mut eps = Vec::with_capacity(s.cell_count());
    for i in 0..s.nx {
        for j in 0..s.ny {
            for k in 0..s.nz {
                let x = (i as f64 + 0.5) / s.nx as f64;
                let y = (j as f64 + 0.5) / s.ny as f64;
                let z = (k as f64 + 0.5) / s.nz as f64;
                let r2 = (x - 0.4).powi(2) + (y - 0.6).powi(2) + (z - 0.5).powi(2);
                eps.push(EPS0 * (1.0 + 3.0 * (-8.0 * r2).exp()));
            }
        }
    }
    materials_from_cells(g, &eps, &vec![MU0; eps.len()]).unwrap()
}

fn constant_storage<S: PotentialSystem>(sim: &mut S) {
    let e0 = sim.storage();
    assert!(e0 > 0.0);
    let report = audit_balance(sim, &mut ZeroDrive, 1000).unwrap();
    let drift = report.steps.iter().map(|s| (s.e_after - e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-12 * e0, "{}: drift {:e}", sim.kind(), drift / e0);
    assert!(report.steps.iter().all(|s| s.supply == 0.0));
}

#[test]
fn zero_input_conserves_storage() {
    let g = GridIndex::new(GridSpec::new(5, 4, 4, 1e-3, 1.2e-3, 0.9e-3).unwrap()).unwrap();
    let m = smooth_eps(&g);
    let dt = safe_dt(&g, &m, 0.98);
    let mut r = rng(7);
    for which in [SystemKind::Scalar, SystemKind::Vector] {
        let sys = assemble_system(&g, &m, dt, which).unwrap();
        assert!(check_positive_definite(&sys, PdMethod::DenseEigen).unwrap().pd);
    }
    constant_storage(&mut scalar_sim(&g, &m, dt, &random_scalar_state(&g, &mut r)));
    constant_storage(&mut vector_sim(&g, &m, dt, &random_vector_state(&g, &mut r)));
}
