//! Komatu–Loewner evolutions on the annulus.
//!
//! * [`evolve_outer_slit`]: a slit grows from the unit circle; tracked points
//!   follow `∂_t φ = φ K_{r_t}(φ/α(t))`.
//! * [`evolve_inner_slit`]: a slit grows from the inner circle; the marked
//!   point follows `∂_t log y = P(r_t, y, β(t))` and tracked points follow
//!   `∂_t log Φ = Q(r_t, y_t, β(t), Φ)`.
//! * [`evolve_three_slit`] / [`solve_balancing_schedule`]: one slit grows
//!   while two others shrink, at total modulus fixed, with the split of the
//!   shrink rate chosen to keep the two shrinking tips symmetric.
//!
//! In all runs `r_t = r₀ eᵗ` is updated in closed form and the remaining
//! quantities are integrated with classical fixed-step RK4.

mod driving;
mod export;
mod multi;
mod single;

pub use driving::DrivingFunction;
pub use export::{format_number, read_trajectory_csv, write_trajectory_csv, TrajectoryRow, TRAJECTORY_COLUMNS};
pub use multi::{
    evolve_three_slit, key_monotonicity_experiment, solve_balancing_schedule, KeyExperiment, MultiSlitSchedule,
    MultiSlitState, ThreeSlitInit, ThreeSlitTrajectory,
};
pub use single::{evolve_inner_slit, evolve_outer_slit, Absorption, LoewnerState, Trajectory};

use crate::{Error, Result};

/// Distance to a slit tip (in units of the step) at which a tracked point is absorbed.
pub const ABSORPTION_STEPS: f64 = 10.0;

/// Step count and uniform step for a run of length `horizon` with nominal step `dt`.
pub(crate) fn step_plan(horizon: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("step size {dt} must be positive")));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon {horizon} must be finite and ≥ 0")));
    }
    if horizon == 0.0 {
        return Ok((0, 0.0));
    }
    let n = (horizon / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((n, horizon / n as f64))
}

/// Default step `10⁻³·T`.
pub fn default_step(horizon: f64) -> f64 {
    if horizon > 0.0 {
        1e-3 * horizon
    } else {
        1e-3
    }
}

/// Stage times and weights of classical RK4.
pub(crate) const RK4_NODES: [f64; 4] = [0.0, 0.5, 0.5, 1.0];
pub(crate) const RK4_WEIGHTS: [f64; 4] = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
