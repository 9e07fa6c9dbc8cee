//! Three-slit evolution at fixed total modulus.
//!
//! Slit 1 (tip angle `xi_1`, driven by β) grows at unit rate while the two
//! slits with tips `xi_plus`, `xi_minus` shrink at rates `1 − λ` and `λ`,
//! `λ = a'(s)`. With `r = r_T` fixed,
//!
//! ```text
//! d log y/ds = P(β) − (1 − λ) P(ξ₊) − λ P(ξ₋)
//! ```
//!
//! and the tip angles move on the inner circle with the angular velocity
//! `I(θ; r e^{iφ})` induced by the other slits. A shrinking slit's own term
//! is singular at its tip and is left out; the growing slit additionally
//! follows its own driving rate β'(s).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{step_plan, DrivingFunction, ABSORPTION_STEPS, RK4_NODES, RK4_WEIGHTS};
use crate::kernels::{kernel_h, kernel_i, kernel_p, KernelPoint};
use crate::{AnnulusGeometry, Error, Result, TruncationControl, TWO_PI};

/// Bisection depth for λ on each step.
pub const BISECTION_ITERATIONS: usize = 40;

/// Lag of the tip-preimage diagnostics, in steps.
pub const TIP_LAG_STEPS: f64 = 5.0;

/// Balancing function `a(s)` on `[0, T]`, piecewise linear with slope
/// `λ_k ∈ [0, 1]` on the k-th step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSlitSchedule {
    total: f64,
    step: f64,
    lambdas: Vec<f64>,
}

impl MultiSlitSchedule {
    /// Schedule with the given per-step slopes; the step is `T / lambdas.len()`.
    pub fn new(total: f64, lambdas: Vec<f64>) -> Result<Self> {
        if !(total >= 0.0 && total.is_finite()) {
            return Err(Error::Domain(format!("schedule horizon T = {total} must be ≥ 0")));
        }
        if total > 0.0 && lambdas.is_empty() {
            return Err(Error::Domain("a schedule with T > 0 needs at least one step".into()));
        }
        if let Some(bad) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::Domain(format!("schedule slope a'(s) = {bad} not in [0, 1]")));
        }
        let step = if lambdas.is_empty() { 0.0 } else { total / lambdas.len() as f64 };
        Ok(MultiSlitSchedule { total, step, lambdas })
    }

    /// Constant slope λ with nominal step `ds`.
    pub fn constant(total: f64, ds: f64, lambda: f64) -> Result<Self> {
        let (n, _) = step_plan(total, ds)?;
        Self::new(total, vec![lambda; n])
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    fn index(&self, s: f64) -> usize {
        if self.lambdas.is_empty() {
            return 0;
        }
        ((s / self.step).floor().max(0.0) as usize).min(self.lambdas.len() - 1)
    }

    /// Slope `a'(s)` (right-continuous).
    pub fn lambda(&self, s: f64) -> f64 {
        self.lambdas.get(self.index(s)).copied().unwrap_or(0.0)
    }

    pub fn a(&self, s: f64) -> f64 {
        if self.lambdas.is_empty() {
            return 0.0;
        }
        let s = s.clamp(0.0, self.total);
        let k = self.index(s);
        let done: f64 = self.lambdas[..k].iter().sum::<f64>() * self.step;
        done + self.lambdas[k] * (s - k as f64 * self.step)
    }

    /// `t₊(s) = (T − a(T)) − (s − a(s))`.
    pub fn t_plus(&self, s: f64) -> f64 {
        (self.total - self.a(self.total)) - (s - self.a(s))
    }

    /// `t₋(s) = a(T) − a(s)`.
    pub fn t_minus(&self, s: f64) -> f64 {
        self.a(self.total) - self.a(s)
    }

    /// `τ(s) = (s, t₊(s), t₋(s))`.
    pub fn tau(&self, s: f64) -> (f64, f64, f64) {
        (s, self.t_plus(s), self.t_minus(s))
    }
}

/// Initial data of a three-slit run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeSlitInit {
    /// Driving of the growing slit, as a function of s.
    pub beta: DrivingFunction,
    pub xi_plus: f64,
    pub xi_minus: f64,
}

impl ThreeSlitInit {
    /// Default auxiliary arc: `ξ± = π ± π/2`.
    pub fn symmetric(beta: DrivingFunction, half_gap: f64) -> Self {
        ThreeSlitInit {
            beta,
            xi_plus: std::f64::consts::PI + half_gap,
            xi_minus: std::f64::consts::PI - half_gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSlitState {
    pub s: f64,
    pub r_t: f64,
    pub y_tau: f64,
    /// Tip angles, unwrapped (continuous in s).
    pub xi_1: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
    /// Slope a'(s) used on the step starting here (`None` at the last state).
    pub lambda: Option<f64>,
    pub a: f64,
    pub t_plus: f64,
    pub t_minus: f64,
    /// Signed symmetry defect `(2π − ξ₊) − ξ₋`.
    pub defect: f64,
    /// `d log y/ds` at this state with the slope of the coming step.
    pub dlogy_ds: Option<f64>,
    /// Lagged tip preimages `u = ξ₊ − ε`, `v = ξ₋ + ε` and H at them.
    pub u: f64,
    pub v: f64,
    pub h_u: Option<f64>,
    pub h_v: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeSlitTrajectory {
    pub ds: f64,
    pub states: Vec<MultiSlitState>,
}

impl ThreeSlitTrajectory {
    pub fn final_state(&self) -> &MultiSlitState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    /// Largest `|defect|` along the run.
    pub fn max_defect(&self) -> f64 {
        self.states.iter().map(|s| s.defect.abs()).fold(0.0, f64::max)
    }
}

/// `[log y, ξ₁, ξ₊, ξ₋]`
type Vars = [f64; 4];

struct Ctx<'a> {
    geom: AnnulusGeometry,
    beta: &'a DrivingFunction,
    trunc: &'a TruncationControl,
}

fn signed_defect(x: &Vars) -> f64 {
    (TWO_PI - x[2]) - x[3]
}

impl Ctx<'_> {
    fn point(&self, s: f64, y: f64, theta: f64) -> Result<KernelPoint> {
        KernelPoint::with_geometry(self.geom, y, theta).map_err(|_| Error::BlowUp { t: s, y, r_t: self.geom.r() })
    }

    fn angular(&self, kp: &KernelPoint, at: f64) -> Result<f64> {
        kernel_i(kp, Complex64::from_polar(self.geom.r(), at), self.trunc)
    }

    fn rates(&self, s: f64, x: &Vars, lambda: f64) -> Result<Vars> {
        let y = x[0].exp();
        let k1 = self.point(s, y, x[1])?;
        let kp = self.point(s, y, x[2])?;
        let km = self.point(s, y, x[3])?;
        let p = [kernel_p(&k1, self.trunc)?, kernel_p(&kp, self.trunc)?, kernel_p(&km, self.trunc)?];
        let (wp, wm) = (1.0 - lambda, lambda);
        let d_log_y = p[0] - wp * p[1] - wm * p[2];
        let d1 = self.beta.slope(s)? - wp * self.angular(&kp, x[1])? - wm * self.angular(&km, x[1])?;
        let dp = self.angular(&k1, x[2])? - wm * self.angular(&km, x[2])?;
        let dm = self.angular(&k1, x[3])? - wp * self.angular(&kp, x[3])?;
        Ok([d_log_y, d1, dp, dm])
    }

    fn rk4(&self, s: f64, x: &Vars, h: f64, lambda: f64) -> Result<Vars> {
        let mut k = [[0.0; 4]; 4];
        for i in 0..4 {
            let xi = if i == 0 {
                *x
            } else {
                std::array::from_fn(|c| x[c] + h * RK4_NODES[i] * k[i - 1][c])
            };
            k[i] = self.rates(s + RK4_NODES[i] * h, &xi, lambda)?;
        }
        Ok(std::array::from_fn(|c| x[c] + h * (0..4).map(|i| RK4_WEIGHTS[i] * k[i][c]).sum::<f64>()))
    }

    fn check_tips(&self, step: usize, s: f64, x: &Vars, guard: f64) -> Result<()> {
        let gap = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(TWO_PI);
            d.min(TWO_PI - d)
        };
        let min_gap = gap(x[1], x[2]).min(gap(x[1], x[3])).min(gap(x[2], x[3]));
        if min_gap < guard {
            return Err(Error::InvariantViolated {
                step,
                s,
                what: format!("slit tips collided (closest pair {min_gap:e} apart)"),
            });
        }
        let y = x[0].exp();
        if !(y > self.geom.r() && y < 1.0) {
            return Err(Error::BlowUp { t: s, y, r_t: self.geom.r() });
        }
        Ok(())
    }

    fn state(&self, s: f64, x: &Vars, sched: &MultiSlitSchedule, lambda: Option<f64>, lag: f64) -> Result<MultiSlitState> {
        let y = x[0].exp();
        let (u, v) = (x[2] - lag, x[3] + lag);
        let (dlogy, h_u, h_v) = match lambda {
            Some(l) => {
                let thetas = (x[1], x[2], x[3]);
                let h = |w: f64| kernel_h(self.geom.r(), y, Complex64::from_polar(self.geom.r(), w), thetas, l, self.trunc);
                (Some(self.rates(s, x, l)?[0]), Some(h(u)?), Some(h(v)?))
            }
            None => (None, None, None),
        };
        Ok(MultiSlitState {
            s,
            r_t: self.geom.r(),
            y_tau: y,
            xi_1: x[1],
            xi_plus: x[2],
            xi_minus: x[3],
            lambda,
            a: sched.a(s),
            t_plus: sched.t_plus(s),
            t_minus: sched.t_minus(s),
            defect: signed_defect(x),
            dlogy_ds: dlogy,
            u,
            v,
            h_u,
            h_v,
        })
    }
}

fn setup<'a>(
    init: &'a ThreeSlitInit,
    y0: f64,
    geom: &AnnulusGeometry,
    total: f64,
    trunc: &'a TruncationControl,
) -> Result<(Ctx<'a>, Vars)> {
    if init.beta.horizon() + 1e-12 < total {
        return Err(Error::Domain(format!(
            "driving ends at s = {}, before T = {total}",
            init.beta.horizon()
        )));
    }
    if total >= geom.p() {
        return Err(Error::Domain(format!("T = {total} reaches the modulus p = {}", geom.p())));
    }
    let geom_t = geom.evolved(total)?;
    if !(y0 > geom_t.r() && y0 < 1.0) {
        return Err(Error::Domain(format!("y0 = {y0} must lie in (r_T, 1) = ({}, 1)", geom_t.r())));
    }
    let x = [y0.ln(), init.beta.unwrapped(0.0)?, init.xi_plus, init.xi_minus];
    Ok((Ctx { geom: geom_t, beta: &init.beta, trunc }, x))
}

/// Three-slit run with a prescribed schedule; `r = r₀ e^T` throughout.
pub fn evolve_three_slit(
    schedule: &MultiSlitSchedule,
    init: &ThreeSlitInit,
    y0: f64,
    geom: &AnnulusGeometry,
    ds: f64,
    trunc: &TruncationControl,
) -> Result<ThreeSlitTrajectory> {
    let total = schedule.total();
    let (ctx, mut x) = setup(init, y0, geom, total, trunc)?;
    let (n, h) = step_plan(total, ds)?;
    let lag = TIP_LAG_STEPS * h;
    let mut states = Vec::with_capacity(n + 1);
    for step in 0..n {
        let s = step as f64 * h;
        ctx.check_tips(step, s, &x, ABSORPTION_STEPS * h)?;
        let lambda = schedule.lambda(s + 0.5 * h);
        states.push(ctx.state(s, &x, schedule, Some(lambda), lag)?);
        x = ctx.rk4(s, &x, h, lambda)?;
    }
    ctx.check_tips(n, total, &x, ABSORPTION_STEPS * h.max(f64::MIN_POSITIVE))?;
    states.push(ctx.state(total, &x, schedule, None, lag)?);
    Ok(ThreeSlitTrajectory { ds: h, states })
}

/// Per-step λ chosen by bisection so the one-step symmetry defect vanishes.
fn balance(init: &ThreeSlitInit, y0: f64, geom: &AnnulusGeometry, total: f64, ds: f64, trunc: &TruncationControl) -> Result<MultiSlitSchedule> {
    if (init.xi_plus - (TWO_PI - init.xi_minus)).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "balancing needs symmetric initial tips, got ξ₊ = {}, ξ₋ = {}",
            init.xi_plus, init.xi_minus
        )));
    }
    let (ctx, mut x) = setup(init, y0, geom, total, trunc)?;
    let (n, h) = step_plan(total, ds)?;
    let mut lambdas = Vec::with_capacity(n);
    for step in 0..n {
        let s = step as f64 * h;
        ctx.check_tips(step, s, &x, ABSORPTION_STEPS * h)?;
        let defect = |l: f64| -> Result<(f64, Vars)> {
            let next = ctx.rk4(s, &x, h, l)?;
            Ok((signed_defect(&next), next))
        };
        let (d_lo, x_lo) = defect(0.0)?;
        let (d_hi, x_hi) = defect(1.0)?;
        let (lambda, next) = if d_lo == 0.0 {
            (0.0, x_lo)
        } else if d_hi == 0.0 {
            (1.0, x_hi)
        } else if (d_lo > 0.0) == (d_hi > 0.0) {
            return Err(Error::ScheduleInfeasible { step, s, defect_lo: d_lo, defect_hi: d_hi });
        } else {
            let (mut lo, mut hi) = (0.0, 1.0);
            let mut best = if d_lo.abs() < d_hi.abs() { (0.0, d_lo, x_lo) } else { (1.0, d_hi, x_hi) };
            for _ in 0..BISECTION_ITERATIONS {
                let mid = 0.5 * (lo + hi);
                let (d, xm) = defect(mid)?;
                if d.abs() < best.1.abs() {
                    best = (mid, d, xm);
                }
                if d == 0.0 {
                    break;
                }
                if (d > 0.0) == (d_lo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (best.0, best.2)
        };
        lambdas.push(lambda);
        x = next;
    }
    MultiSlitSchedule::new(total, lambdas)
}

/// Balancing schedule `a(s)` keeping `2π − ξ₊ = ξ₋` along the run.
pub fn solve_balancing_schedule(
    init: &ThreeSlitInit,
    y0: f64,
    geom: &AnnulusGeometry,
    total: f64,
    ds: f64,
    trunc: &TruncationControl,
) -> Result<MultiSlitSchedule> {
    balance(init, y0, geom, total, ds, trunc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyExperiment {
    pub y_t: f64,
    pub schedule: MultiSlitSchedule,
    pub trajectory: ThreeSlitTrajectory,
}

/// Balanced three-slit run checking `d log y/ds ≥ −tol` at every step.
pub fn key_monotonicity_experiment(
    init: &ThreeSlitInit,
    y0: f64,
    geom: &AnnulusGeometry,
    total: f64,
    ds: f64,
    trunc: &TruncationControl,
) -> Result<KeyExperiment> {
    const SLACK: f64 = 1e-12;
    let schedule = balance(init, y0, geom, total, ds, trunc)?;
    let trajectory = evolve_three_slit(&schedule, init, y0, geom, ds, trunc)?;
    for (step, st) in trajectory.states.iter().enumerate() {
        if let Some(d) = st.dlogy_ds {
            if d < -SLACK {
                let pi = std::f64::consts::PI;
                let dist = |a: f64| (a.rem_euclid(TWO_PI) - pi).abs();
                let ordered = dist(st.xi_1) <= dist(st.xi_plus).min(dist(st.xi_minus));
                return Err(Error::InvariantViolated {
                    step,
                    s: st.s,
                    what: format!(
                        "d log y/ds = {d:e} < 0 (growing tip {} the shrinking tips to π)",
                        if ordered { "closer than" } else { "not closer than" }
                    ),
                });
            }
        }
    }
    Ok(KeyExperiment {
        y_t: trajectory.final_state().y_tau,
        schedule,
        trajectory,
    })
}
