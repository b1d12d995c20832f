//! Common interface of the two leapfrog systems.
//!
//! Both systems have the generalized state-space form
//! `(R + F) x⁺ = (R − F) x⁻ + B u`, `y = Lᵀ x` with `B = L S`. Inputs, outputs
//! and the diagonal of `S` are exposed as flat vectors whose entries line up
//! one-to-one, so the supply rate is the same expression for both systems.

use std::fmt;

use crate::error::Result;
use crate::grid::GridIndex;
use crate::sum::CompensatedSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Scalar,
    Vector,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Scalar => "scalar",
            SystemKind::Vector => "vector",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub trait PotentialSystem {
    fn kind(&self) -> SystemKind;

    fn grid(&self) -> &GridIndex;

    /// Time step (s).
    fn dt(&self) -> f64;

    /// Number of completed steps.
    fn step_index(&self) -> u64;

    /// Diagonal of `S`, one entry per input sample.
    fn input_weights(&self) -> &[f64];

    fn input_len(&self) -> usize {
        self.input_weights().len()
    }

    /// `y = Lᵀ x` for the current state.
    fn outputs(&self) -> Vec<f64>;

    /// Advance one step with input `u` and return the new outputs.
    fn advance(&mut self, u: &[f64]) -> Result<Vec<f64>>;

    /// Storage function `(Δt/2) xᵀ R x` (J), evaluated matrix-free.
    fn storage(&self) -> f64;

    /// State vector `x` in assembly order.
    fn state_vector(&self) -> Vec<f64>;

    /// Largest magnitude of the integer-time state block's dominant field
    /// (`[∂tφ]` for the scalar system, `[∂tA]` for the vector system).
    fn max_abs_state(&self) -> f64;

    /// Supply rate `Δt (y⁻ + y⁺)ᵀ S u / 2` (J) for one step.
    fn supply(&self, u: &[f64], y_minus: &[f64], y_plus: &[f64]) -> Result<f64> {
        supply_rate(self.input_weights(), u, y_minus, y_plus, self.dt())
    }
}

/// `Δt · Σ S_i u_i (y⁻_i + y⁺_i)/2` with compensated summation.
pub fn supply_rate(weights: &[f64], u: &[f64], y_minus: &[f64], y_plus: &[f64], dt: f64) -> Result<f64> {
    use crate::error::check_len;
    check_len("u", weights.len(), u.len())?;
    check_len("y_minus", weights.len(), y_minus.len())?;
    check_len("y_plus", weights.len(), y_plus.len())?;
    let mut acc = CompensatedSum::new();
    for i in 0..weights.len() {
        acc.add(weights[i] * u[i] * (0.5 * (y_minus[i] + y_plus[i])));
    }
    Ok(dt * acc.value())
}
