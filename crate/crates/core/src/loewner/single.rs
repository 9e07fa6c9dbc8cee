use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{step_plan, DrivingFunction, ABSORPTION_STEPS, RK4_NODES, RK4_WEIGHTS};
use crate::kernels::{kernel_j, kernel_p, kernel_q_with_j, villat, KernelPoint};
use crate::{check_finite, AnnulusGeometry, ComplexPoint, Error, Result, TruncationControl};

/// Snapshot of a single-slit run at time t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoewnerState {
    pub t: f64,
    pub r_t: f64,
    /// Driving angle β(t) in `[0, 2π)`.
    pub driving: f64,
    /// The marked point y_t (inner-slit runs only).
    pub y_t: Option<f64>,
    /// Imaginary part of `log y_t` integrated through `Q` (inner-slit runs only).
    pub im_log_y: Option<f64>,
    pub tracked_points: Vec<(String, ComplexPoint)>,
    /// `exp(i ∫ J)`, the accumulated normalising rotation (1 for outer runs).
    pub rotation_accumulator: ComplexPoint,
}

/// A tracked point that reached the slit tip and was dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Absorption {
    pub label: String,
    pub step: usize,
    pub t: f64,
    pub last_position: ComplexPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<LoewnerState>,
    pub absorptions: Vec<Absorption>,
}

impl Trajectory {
    pub fn final_state(&self) -> &LoewnerState {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

struct Tracked {
    label: String,
    log: Complex64,
}

fn check_horizon_fits(geom: &AnnulusGeometry, horizon: f64) -> Result<()> {
    if horizon >= geom.p() {
        return Err(Error::Domain(format!(
            "horizon T = {horizon} reaches the modulus p = {}; r_T would be ≥ 1",
            geom.p()
        )));
    }
    Ok(())
}

fn start_points(points: &[(String, ComplexPoint)], geom: &AnnulusGeometry, seed: ComplexPoint, guard: f64) -> Result<Vec<Tracked>> {
    points
        .iter()
        .map(|(label, z)| {
            check_finite(label, *z)?;
            if !geom.contains(*z) {
                return Err(Error::Domain(format!("tracked point {label} = {z} is not in the annulus")));
            }
            if (*z - seed).norm() < guard {
                return Err(Error::Domain(format!("tracked point {label} = {z} sits on the slit seed {seed}")));
            }
            Ok(Tracked { label: label.clone(), log: z.ln() })
        })
        .collect()
}

/// Advance every tracked point one RK4 step with rate `rate(stage, point)`;
/// points whose stage evaluation hits a pole, or which end within the
/// absorption radius of `tip`, are removed and reported.
fn advance_points<F>(
    points: &mut Vec<Tracked>,
    h: f64,
    tip: ComplexPoint,
    step: usize,
    t_next: f64,
    absorptions: &mut Vec<Absorption>,
    rate: F,
) -> Result<()>
where
    F: Fn(usize, Complex64) -> Result<Complex64>,
{
    let mut kept = Vec::with_capacity(points.len());
    for pt in points.drain(..) {
        let mut k = [Complex64::new(0.0, 0.0); 4];
        let mut hit_pole = false;
        for i in 0..4 {
            let stage = if i == 0 { pt.log } else { pt.log + k[i - 1] * (h * RK4_NODES[i]) };
            match rate(i, stage.exp()) {
                Ok(v) => k[i] = v,
                Err(Error::Singularity(_)) => {
                    hit_pole = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let next = pt.log + (0..4).map(|i| k[i] * RK4_WEIGHTS[i]).sum::<Complex64>() * h;
        let w = next.exp();
        if hit_pole || !w.re.is_finite() || !w.im.is_finite() || (w - tip).norm() < ABSORPTION_STEPS * h {
            absorptions.push(Absorption {
                label: pt.label,
                step,
                t: t_next,
                last_position: pt.log.exp(),
            });
        } else {
            kept.push(Tracked { label: pt.label, log: next });
        }
    }
    *points = kept;
    Ok(())
}

fn snapshot(points: &[Tracked]) -> Vec<(String, ComplexPoint)> {
    points.iter().map(|p| (p.label.clone(), p.log.exp())).collect()
}

/// Slit growing from the unit circle: `∂_t log φ = K_{r_t}(φ/α(t))`, `α = e^{iβ}`.
///
/// The run length is the driving horizon; the step is `T/⌈T/dt⌉`.
pub fn evolve_outer_slit(
    beta: &DrivingFunction,
    initial_points: &[(String, ComplexPoint)],
    geom: &AnnulusGeometry,
    dt: f64,
    trunc: &TruncationControl,
) -> Result<Trajectory> {
    let horizon = beta.horizon();
    check_horizon_fits(geom, horizon)?;
    let (n_steps, h) = step_plan(horizon, dt)?;
    let alpha = |t: f64| -> Result<Complex64> { Ok(Complex64::from_polar(1.0, beta.eval(t)?)) };
    let mut points = start_points(initial_points, geom, alpha(0.0)?, ABSORPTION_STEPS * h)?;
    let mut absorptions = Vec::new();
    let state = |t: f64, points: &[Tracked]| -> Result<LoewnerState> {
        Ok(LoewnerState {
            t,
            r_t: geom.r() * t.exp(),
            driving: beta.eval(t)?,
            y_t: None,
            im_log_y: None,
            tracked_points: snapshot(points),
            rotation_accumulator: Complex64::new(1.0, 0.0),
        })
    };
    let mut states = vec![state(0.0, &points)?];

    for step in 0..n_steps {
        let t = step as f64 * h;
        let mut stage_geom = Vec::with_capacity(4);
        let mut stage_alpha = Vec::with_capacity(4);
        for c in RK4_NODES {
            let ts = t + c * h;
            stage_geom.push(geom.evolved(ts)?);
            stage_alpha.push(alpha(ts)?);
        }
        let t_next = (step + 1) as f64 * h;
        let tip = alpha(t_next)?;
        advance_points(&mut points, h, tip, step + 1, t_next, &mut absorptions, |i, w| {
            villat(w / stage_alpha[i], &stage_geom[i], trunc)
        })?;
        states.push(state(t_next, &points)?);
    }
    Ok(Trajectory { dt: h, states, absorptions })
}

/// Rates of the marked-point system at one stage.
struct MarkedRates {
    geom: AnnulusGeometry,
    beta: f64,
    j: f64,
    /// d/dt of (log y, log y through Q, ∫J)
    d: [Complex64; 3],
}

fn blow_up(t: f64, y: f64, r_t: f64) -> Error {
    Error::BlowUp { t, y, r_t }
}

fn marked_rates(
    t: f64,
    state: [Complex64; 3],
    geom0: &AnnulusGeometry,
    beta: &DrivingFunction,
    trunc: &TruncationControl,
) -> Result<MarkedRates> {
    let geom = geom0.evolved(t)?;
    let y = state[0].re.exp();
    let b = beta.eval(t)?;
    let kp = KernelPoint::with_geometry(geom, y, b).map_err(|_| blow_up(t, y, geom.r()))?;
    let p = kernel_p(&kp, trunc)?;
    let j = kernel_j(&kp, trunc)?;
    let q = kernel_q_with_j(&geom, b, state[1].exp(), j, trunc)?;
    Ok(MarkedRates {
        geom,
        beta: b,
        j,
        d: [Complex64::new(p, 0.0), q, Complex64::new(j, 0.0)],
    })
}

/// Slit growing from the inner circle with the marked point y kept real:
/// `∂_t log y = P(r_t, y_t, β)` and `∂_t log Φ = Q(r_t, y_t, β, Φ)`.
///
/// `log y` is also integrated a second time through `Q(·, w = y)`, whose
/// imaginary part should stay zero; it is reported as `im_log_y`.
pub fn evolve_inner_slit(
    beta: &DrivingFunction,
    y0: f64,
    initial_points: &[(String, ComplexPoint)],
    geom: &AnnulusGeometry,
    dt: f64,
    trunc: &TruncationControl,
) -> Result<Trajectory> {
    if !(y0 > geom.r() && y0 < 1.0) {
        return Err(Error::Domain(format!("y0 = {y0} must lie in (r, 1) = ({}, 1)", geom.r())));
    }
    let horizon = beta.horizon();
    check_horizon_fits(geom, horizon)?;
    let (n_steps, h) = step_plan(horizon, dt)?;
    let seed = Complex64::from_polar(geom.r(), beta.eval(0.0)?);
    let mut points = start_points(initial_points, geom, seed, ABSORPTION_STEPS * h)?;
    let mut absorptions = Vec::new();
    let ly0 = y0.ln();
    let mut marked = [Complex64::new(ly0, 0.0), Complex64::new(ly0, 0.0), Complex64::new(0.0, 0.0)];

    let state = |t: f64, marked: &[Complex64; 3], points: &[Tracked]| -> Result<LoewnerState> {
        Ok(LoewnerState {
            t,
            r_t: geom.r() * t.exp(),
            driving: beta.eval(t)?,
            y_t: Some(marked[0].re.exp()),
            im_log_y: Some(marked[1].im),
            tracked_points: snapshot(points),
            rotation_accumulator: Complex64::from_polar(1.0, marked[2].re),
        })
    };
    let mut states = vec![state(0.0, &marked, &points)?];

    for step in 0..n_steps {
        let t = step as f64 * h;
        let mut stages: Vec<MarkedRates> = Vec::with_capacity(4);
        for i in 0..4 {
            let x = if i == 0 {
                marked
            } else {
                let prev = &stages[i - 1].d;
                [0, 1, 2].map(|c| marked[c] + prev[c] * (h * RK4_NODES[i]))
            };
            stages.push(marked_rates(t + RK4_NODES[i] * h, x, geom, beta, trunc)?);
        }
        for c in 0..3 {
            marked[c] += (0..4).map(|i| stages[i].d[c] * RK4_WEIGHTS[i]).sum::<Complex64>() * h;
        }
        let t_next = (step + 1) as f64 * h;
        let r_next = geom.r() * t_next.exp();
        let y = marked[0].re.exp();
        if !(y > r_next && y < 1.0) {
            return Err(blow_up(t_next, y, r_next));
        }
        let tip = Complex64::from_polar(r_next, beta.eval(t_next)?);
        advance_points(&mut points, h, tip, step + 1, t_next, &mut absorptions, |i, w| {
            let s = &stages[i];
            kernel_q_with_j(&s.geom, s.beta, w, s.j, trunc)
        })?;
        states.push(state(t_next, &marked, &points)?);
    }
    Ok(Trajectory { dt: h, states, absorptions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn t() -> TruncationControl {
        TruncationControl::default()
    }

    #[test]
    fn zero_horizon_is_identity() {
        let g = AnnulusGeometry::from_radius(0.2).unwrap();
        let beta = DrivingFunction::constant(PI, 0.0).unwrap();
        let pts = vec![("a".to_string(), Complex64::new(0.5, 0.1))];
        let tr = evolve_inner_slit(&beta, 0.5, &pts, &g, 1e-3, &t()).unwrap();
        assert_eq!(tr.states.len(), 1);
        assert_eq!(tr.states[0].y_t, Some(0.5));
        assert!((tr.states[0].tracked_points[0].1 - pts[0].1).norm() < 1e-15);
        let tr = evolve_outer_slit(&beta, &pts, &g, 1e-3, &t()).unwrap();
        assert_eq!(tr.states.len(), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = AnnulusGeometry::from_radius(0.2).unwrap();
        let beta = DrivingFunction::constant(PI, 0.1).unwrap();
        assert!(evolve_inner_slit(&beta, 0.1, &[], &g, 1e-3, &t()).is_err());
        let long = DrivingFunction::constant(PI, 2.0).unwrap();
        assert!(evolve_inner_slit(&long, 0.5, &[], &g, 1e-3, &t()).is_err());
        let outside = vec![("o".to_string(), Complex64::new(0.1, 0.0))];
        assert!(evolve_outer_slit(&beta, &outside, &g, 1e-3, &t()).is_err());
    }

    #[test]
    fn inner_circle_point_stays_on_inner_circle() {
        let g = AnnulusGeometry::from_radius(0.3).unwrap();
        let beta = DrivingFunction::constant(1.0, 0.05).unwrap();
        let pts = vec![("c".to_string(), Complex64::from_polar(0.3 * (1.0 + 1e-12), 3.0))];
        let tr = evolve_inner_slit(&beta, 0.6, &pts, &g, 1e-3, &t()).unwrap();
        let last = tr.final_state();
        let w = last.tracked_points[0].1;
        assert!((w.norm() / last.r_t - 1.0).abs() < 1e-9, "{} vs {}", w.norm(), last.r_t);
    }
}
