//! Map of an annulus onto a circularly slit disk.
//!
//! For `y ∈ A_r` the map
//!
//! ```text
//! f(z, y) = ω(z, y) / (|y| ω(z, 1/ȳ))
//! ```
//!
//! sends y to 0, the unit circle onto itself and the inner circle `|z| = r`
//! onto an arc of the circle `|w| = |y|`, traversed twice.

use serde::{Deserialize, Serialize};

use crate::prime::{eval_prime, eval_prime_with_derivative};
use crate::{check_finite, reduce_angle, AnnulusGeometry, ComplexPoint, Error, Result, TruncationControl, TWO_PI};

/// Allowed deviation of sampled inner-boundary moduli from `|y|`.
pub const SLIT_MODULUS_TOL: f64 = 1e-8;

/// Default boundary sampling density.
pub const DEFAULT_SAMPLES: usize = 512;

const NEWTON_MAX_ITER: usize = 50;

/// A circularly slit disk together with the preimages of the slit endpoints.
///
/// The slit runs counterclockwise from `arc_start` to `arc_end` on the
/// circle of radius `slit_radius`; `preimage_start`/`preimage_end` are the
/// angles on `|z| = r` mapped to those endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitDiskDomain {
    pub slit_radius: f64,
    pub arc_start: f64,
    pub arc_end: f64,
    pub preimage_start: f64,
    pub preimage_end: f64,
}

impl SlitDiskDomain {
    /// Angular length of the slit, in `(0, 2π)`.
    pub fn arc_span(&self) -> f64 {
        reduce_angle(self.arc_end - self.arc_start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCircle {
    /// `|z| = r`
    Inner,
    /// `|z| = 1`
    Outer,
}

impl BoundaryCircle {
    pub fn radius(self, geom: &AnnulusGeometry) -> f64 {
        match self {
            BoundaryCircle::Inner => geom.r(),
            BoundaryCircle::Outer => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCircle::Inner => "inner",
            BoundaryCircle::Outer => "outer",
        }
    }
}

/// Images of uniformly spaced points of one boundary circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedBoundary {
    pub circle: BoundaryCircle,
    /// (source angle, image), angles strictly increasing in `[0, 2π)`.
    pub samples: Vec<(f64, ComplexPoint)>,
}

impl MappedBoundary {
    /// Largest deviation of `|image|` from `radius`.
    pub fn max_modulus_deviation(&self, radius: f64) -> f64 {
        self.samples
            .iter()
            .map(|(_, w)| (w.norm() - radius).abs())
            .fold(0.0, f64::max)
    }
}

fn check_pole(y: ComplexPoint, geom: &AnnulusGeometry) -> Result<()> {
    check_finite("y", y)?;
    if !geom.contains(y) {
        return Err(Error::Domain(format!(
            "y = {y} (|y| = {}) must lie in the open annulus r = {} < |y| < 1",
            y.norm(),
            geom.r()
        )));
    }
    Ok(())
}

/// The slit map `f(z, y) = ω(z, y)/(|y| ω(z, 1/ȳ))`.
pub fn crowdy_map(z: ComplexPoint, y: ComplexPoint, geom: &AnnulusGeometry, trunc: &TruncationControl) -> Result<ComplexPoint> {
    check_pole(y, geom)?;
    check_finite("z", z)?;
    geom.require_near_closure("z", z)?;
    let num = eval_prime(z, y, geom, trunc)?;
    let den = eval_prime(z, y.conj().inv(), geom, trunc)?;
    if den.norm() < 1e-300 {
        return Err(Error::Singularity(format!("slit map denominator vanishes at z = {z}")));
    }
    Ok(num / (y.norm() * den))
}

/// `f(z, y)` and `z f'(z)/f(z)`, whose real part is the angular velocity of
/// `arg f` along a circle centred at 0.
fn map_with_log_derivative(
    z: ComplexPoint,
    y: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
) -> Result<(ComplexPoint, ComplexPoint)> {
    let (num, dnum) = eval_prime_with_derivative(z, y, geom, trunc)?;
    let (den, dden) = eval_prime_with_derivative(z, y.conj().inv(), geom, trunc)?;
    if den.norm() < 1e-300 || num.norm() < 1e-300 {
        return Err(Error::Singularity(format!("slit map has a zero or pole at z = {z}")));
    }
    Ok((num / (y.norm() * den), z * (dnum / num - dden / den)))
}

/// Images of `n_samples` points `ρ e^{2πik/n}` of the chosen boundary circle.
pub fn map_boundary(
    circle: BoundaryCircle,
    y: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
    n_samples: usize,
) -> Result<MappedBoundary> {
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be positive".into()));
    }
    let rho = circle.radius(geom);
    let samples = (0..n_samples)
        .map(|k| {
            let theta = TWO_PI * k as f64 / n_samples as f64;
            crowdy_map(ComplexPoint::from_polar(rho, theta), y, geom, trunc).map(|w| (theta, w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MappedBoundary { circle, samples })
}

/// Angular velocity of `arg f(r e^{iθ}, y)` in θ.
fn inner_turn_rate(theta: f64, y: ComplexPoint, geom: &AnnulusGeometry, trunc: &TruncationControl) -> Result<f64> {
    let z = ComplexPoint::from_polar(geom.r(), theta);
    Ok(map_with_log_derivative(z, y, geom, trunc)?.1.re)
}

/// Zero of the turn rate in `[lo, hi]`, given opposite signs at the ends.
fn refine_turning_point(
    mut lo: f64,
    mut hi: f64,
    rate_lo: f64,
    y: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
) -> Result<f64> {
    let lo_positive = rate_lo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (inner_turn_rate(mid, y, geom, trunc)? > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Slit of `f(A_r, y)`: its radius, endpoint angles and their preimages on `|z| = r`.
///
/// The inner circle is sampled at `n_samples` points; the modulus of every
/// image must equal `|y|` to [`SLIT_MODULUS_TOL`]. The image argument turns
/// back exactly twice (once at each slit end); those turning points are
/// bracketed from the samples and refined to machine precision as zeros of
/// `Re[z f'(z)/f(z)]`.
pub fn slit_geometry(
    y: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
    n_samples: usize,
) -> Result<SlitDiskDomain> {
    check_pole(y, geom)?;
    if n_samples < 64 {
        return Err(Error::Domain(format!("n_samples = {n_samples} must be at least 64")));
    }
    let radius = y.norm();
    let boundary = map_boundary(BoundaryCircle::Inner, y, geom, trunc, n_samples)?;
    let deviation = boundary.max_modulus_deviation(radius);
    if !(deviation <= SLIT_MODULUS_TOL) {
        return Err(Error::TruncationTooCoarse {
            what: "inner boundary image modulus".into(),
            deviation,
            limit: SLIT_MODULUS_TOL,
        });
    }

    let thetas: Vec<f64> = boundary.samples.iter().map(|(t, _)| *t).collect();
    let rates = thetas
        .iter()
        .map(|&t| inner_turn_rate(t, y, geom, trunc))
        .collect::<Result<Vec<_>>>()?;

    let mut start = None;
    let mut end = None;
    let mut count = 0;
    for k in 0..n_samples {
        let k1 = (k + 1) % n_samples;
        let (a, b) = (rates[k], rates[k1]);
        if (a > 0.0) == (b > 0.0) {
            continue;
        }
        count += 1;
        let hi = if k1 == 0 { TWO_PI } else { thetas[k1] };
        let theta = reduce_angle(refine_turning_point(thetas[k], hi, a, y, geom, trunc)?);
        // argument stops increasing at the counterclockwise end of the slit
        if a > 0.0 {
            end = Some(theta);
        } else {
            start = Some(theta);
        }
    }
    let (preimage_start, preimage_end) = match (start, end, count) {
        (Some(s), Some(e), 2) => (s, e),
        _ => {
            return Err(Error::Geometry(format!(
                "expected two turning points of the inner boundary image, found {count}"
            )))
        }
    };
    let endpoint = |theta: f64| -> Result<f64> {
        let w = crowdy_map(ComplexPoint::from_polar(geom.r(), theta), y, geom, trunc)?;
        Ok(reduce_angle(w.arg()))
    };
    Ok(SlitDiskDomain {
        slit_radius: radius,
        arc_start: endpoint(preimage_start)?,
        arc_end: endpoint(preimage_end)?,
        preimage_start,
        preimage_end,
    })
}

/// The inversion `z ↦ r/z`, which swaps the two boundary circles of `A_r`.
pub fn invert_annulus(z: ComplexPoint, geom: &AnnulusGeometry) -> Result<ComplexPoint> {
    check_finite("z", z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("cannot invert z = 0".into()));
    }
    Ok(geom.r() / z)
}

/// The unit factor `e^{−i Arg v}` that rotates `v` onto the positive axis.
pub fn rotate_to_positive(value: ComplexPoint) -> Result<ComplexPoint> {
    check_finite("value", value)?;
    let m = value.norm();
    if m == 0.0 {
        return Err(Error::Domain("cannot normalise the argument of 0".into()));
    }
    Ok(value.conj() / m)
}

/// Zero of `f(·, y_target)` found by damped Newton from `w₀ = y_target`.
pub fn preimage_of_zero(y_target: f64, geom: &AnnulusGeometry, trunc: &TruncationControl) -> Result<ComplexPoint> {
    preimage_of_zero_from(y_target, ComplexPoint::new(y_target, 0.0), geom, trunc)
}

/// [`preimage_of_zero`] started from an arbitrary guess.
pub fn preimage_of_zero_from(
    y_target: f64,
    start: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
) -> Result<ComplexPoint> {
    if !(y_target > geom.r() && y_target < 1.0) {
        return Err(Error::Domain(format!(
            "y_target = {y_target} must lie in (r, 1) = ({}, 1)",
            geom.r()
        )));
    }
    check_finite("start", start)?;
    let y = ComplexPoint::new(y_target, 0.0);
    let residual = |w: ComplexPoint| -> Result<(ComplexPoint, ComplexPoint)> {
        let (num, dnum) = eval_prime_with_derivative(w, y, geom, trunc)?;
        let (den, dden) = eval_prime_with_derivative(w, y.inv(), geom, trunc)?;
        if den.norm() < 1e-300 {
            return Err(Error::Singularity(format!("slit map denominator vanishes at {w}")));
        }
        let f = num / (y_target * den);
        let df = (dnum * den - num * dden) / (y_target * den * den);
        Ok((f, df))
    };

    let mut w = start;
    let (mut f, mut df) = residual(w)?;
    for _ in 0..NEWTON_MAX_ITER {
        if f.norm() < 1e-15 {
            return Ok(w);
        }
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = w - step * damping;
            if geom.near_closure(trial) {
                let (ft, dft) = residual(trial)?;
                if ft.norm() < f.norm() {
                    w = trial;
                    f = ft;
                    df = dft;
                    accepted = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if !accepted || (step * damping).norm() < 1e-15 * w.norm() {
            break;
        }
    }
    if f.norm() < 1e-12 {
        Ok(w)
    } else {
        Err(Error::NonConvergence {
            what: format!("Newton for the zero of the slit map (|f| = {:e})", f.norm()),
            iterations: NEWTON_MAX_ITER,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    fn g(r: f64) -> AnnulusGeometry {
        AnnulusGeometry::from_radius(r).unwrap()
    }

    fn t() -> TruncationControl {
        TruncationControl::new(256, 1e-14).unwrap()
    }

    #[test]
    fn maps_y_to_zero() {
        let y = c(0.3, 0.4);
        assert_eq!(crowdy_map(y, y, &g(0.2), &t()).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn y_must_be_interior() {
        assert!(crowdy_map(c(0.5, 0.0), c(0.1, 0.0), &g(0.2), &t()).is_err());
        assert!(crowdy_map(c(0.5, 0.0), c(1.0, 0.0), &g(0.2), &t()).is_err());
        assert!(crowdy_map(c(3.0, 0.0), c(0.5, 0.0), &g(0.2), &t()).is_err());
    }

    #[test]
    fn inversion_swaps_circles() {
        let gm = g(0.3);
        assert!((invert_annulus(c(0.3, 0.0), &gm).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((invert_annulus(c(1.0, 0.0), &gm).unwrap() - c(0.3, 0.0)).norm() < 1e-15);
        let z = c(0.4, -0.5);
        let back = invert_annulus(invert_annulus(z, &gm).unwrap(), &gm).unwrap();
        assert!((back - z).norm() < 1e-15);
        assert!(invert_annulus(c(0.0, 0.0), &gm).is_err());
    }

    #[test]
    fn rotation_factors() {
        assert_eq!(rotate_to_positive(c(0.5, 0.0)).unwrap(), c(1.0, 0.0));
        assert!((rotate_to_positive(c(0.0, 0.3)).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        assert!((rotate_to_positive(c(-0.2, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(rotate_to_positive(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn slit_geometry_rejects_sparse_sampling() {
        assert!(slit_geometry(c(0.5, 0.0), &g(0.2), &t(), 32).is_err());
    }

    #[test]
    fn slit_span_is_proper() {
        let s = slit_geometry(c(0.5, 0.0), &g(0.2), &t(), 256).unwrap();
        assert!(s.arc_span() > 0.0 && s.arc_span() < TWO_PI);
        // real y: the slit is centred on the positive axis
        let mid = reduce_angle(s.arc_start + 0.5 * s.arc_span() + PI) - PI;
        assert!(mid.abs() < 1e-10, "{s:?}");
    }

    #[test]
    fn newton_from_offset_guess() {
        let w = preimage_of_zero_from(0.6, c(0.5, 0.1), &g(0.2), &t()).unwrap();
        assert!((w - c(0.6, 0.0)).norm() < 1e-12);
    }
}
