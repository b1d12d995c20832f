//! Dense implicit-step oracle and positive-definiteness certification.

use nalgebra::{DMatrix, DVector, SymmetricEigen, LU};
use sprs::CsMat;

use super::assembly::SystemMatrices;
use crate::error::{check_len, Error, Result};

/// Largest state dimension handled by dense routines.
pub const DENSE_LIMIT: usize = 6_000;

fn to_dense(m: &CsMat<f64>) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.rows(), m.cols());
    for (v, (r, c)) in m.iter() {
        d[(r, c)] += *v;
    }
    d
}

fn guard(dim: usize) -> Result<()> {
    if dim > DENSE_LIMIT {
        return Err(Error::TooLarge { dim, limit: DENSE_LIMIT });
    }
    Ok(())
}

/// Pre-factorized `(R + F) x⁺ = (R − F) x⁻ + B u`.
pub struct DenseOracle {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    rhs: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl DenseOracle {
    pub fn new(sys: &SystemMatrices) -> Result<Self> {
        guard(sys.state_dim())?;
        let r = to_dense(&sys.r);
        let f = to_dense(&sys.f);
        let lu = (&r + &f).lu();
        if !lu.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(DenseOracle { lu, rhs: &r - &f, b: to_dense(&sys.b_in) })
    }

    pub fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        check_len("oracle state", self.rhs.ncols(), x.len())?;
        check_len("oracle input", self.b.ncols(), u.len())?;
        let rhs = &self.rhs * DVector::from_column_slice(x) + &self.b * DVector::from_column_slice(u);
        let sol = self.lu.solve(&rhs).ok_or(Error::Singular)?;
        Ok(sol.as_slice().to_vec())
    }
}

/// Single oracle step; factorizes on every call.
pub fn dense_oracle_step(sys: &SystemMatrices, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    DenseOracle::new(sys)?.step(x, u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdMethod {
    DenseEigen,
    Factorization,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdVerdict {
    pub pd: bool,
    /// Smallest eigenvalue of the Jacobi-scaled `R` (dense-eigen only).
    pub smallest_eigenvalue: Option<f64>,
    /// Acceptance threshold used: eigenvalues above `-tolerance` count as
    /// positive.
    pub tolerance: f64,
}

/// Relative asymmetry allowed before `R` is rejected.
const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalue floor relative to `‖R‖`.
const PD_TOL: f64 = 1e-12;

/// Certify `R` positive definite.
///
/// `R` is first scaled as `D^{-½} R D^{-½}` with `D = diag(R)`. The blocks of
/// `R` differ by many orders of magnitude in SI units, and a congruence
/// preserves definiteness while making the `‖R‖`-relative tolerance
/// meaningful for every block.
pub fn check_positive_definite(sys: &SystemMatrices, method: PdMethod) -> Result<PdVerdict> {
    let n = sys.state_dim();
    guard(n)?;
    let r = to_dense(&sys.r);
    let max_abs = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let asym = (&r - r.transpose()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if asym > SYMMETRY_TOL * max_abs {
        return Err(Error::NotSymmetric(asym / max_abs));
    }
    let d: Vec<f64> = (0..n).map(|i| r[(i, i)]).collect();
    if let Some(i) = d.iter().position(|v| v.is_nan() || *v <= 0.0) {
        // a non-positive diagonal entry already rules out definiteness
        return Ok(PdVerdict { pd: false, smallest_eigenvalue: Some(d[i]), tolerance: 0.0 });
    }
    let scale: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| {
        let v = 0.5 * (r[(i, j)] + r[(j, i)]);
        v * scale[i] * scale[j]
    });
    match method {
        PdMethod::DenseEigen => {
            let eig = SymmetricEigen::new(scaled);
            let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            let norm = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let tolerance = PD_TOL * norm;
            Ok(PdVerdict { pd: min > -tolerance, smallest_eigenvalue: Some(min), tolerance })
        }
        PdMethod::Factorization => {
            // infinity norm bounds the spectral norm from above
            let norm = (0..n).map(|i| scaled.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
            let tolerance = PD_TOL * norm;
            let shifted = scaled + DMatrix::identity(n, n) * tolerance;
            let pd = shifted.cholesky().is_some();
            Ok(PdVerdict { pd, smallest_eigenvalue: None, tolerance })
        }
    }
}
