//! Potentials-based finite-difference time-domain solvers for the scalar
//! (`φ`) and vector (`A`) systems on a rectilinear Yee-type grid, with
//! storage and supply auditing for open subdomains.
//!
//! Both systems are leapfrog schemes whose boundary is described by
//! "hanging" variables: field samples that would lie outside the
//! subdomain are taken as inputs, and their conjugates are reported as
//! outputs, so that subdomains can be coupled through the ports alone.

pub mod cavity;
pub mod dissipation;
pub mod error;
pub mod grid;
pub mod materials;
pub mod scalar;
mod stencil;
pub mod sum;
pub mod system;
pub mod vector;

pub use cavity::{
    cavity_boundary_drive, cavity_initial_scalar, cavity_initial_state, cavity_initial_vector, cavity_params,
    cavity_params_with_modes, eval_cavity, exact_energies, CavityDrive, CavityField, CavityMode, CavityState,
};
pub use dissipation::{
    assemble_system, audit_balance, cfl_limit, cfl_limit_materials, check_positive_definite, dense_oracle_step,
    storage_scalar, storage_vector, supply_scalar, supply_vector, BalanceReport, BalanceStep, DenseOracle, Drive,
    PdMethod, PdVerdict, SystemMatrices, VectorSupplySample, ZeroDrive,
};
pub use error::{Error, Result};
pub use grid::{build_grid, Axis, Entity, Face, Family, GridIndex, GridSpec, HangingFamily, HangingSite, Side};
pub use materials::{materials_from_cells, materials_from_relative, uniform_materials, MaterialMaps, EPS0, MU0};
pub use scalar::{init_scalar, reconstruct_phi, scalar_outputs, step_scalar, ScalarSim, ScalarState};
pub use sum::{compensated_sum, CompensatedSum};
pub use system::{supply_rate, PotentialSystem, SystemKind};
pub use vector::{init_vector, step_vector, vector_outputs, VectorSim, VectorState};
