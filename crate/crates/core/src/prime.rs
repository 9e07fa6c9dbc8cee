//! Schottky–Klein prime function of the annulus `A_r`.
//!
//! ```text
//! ω(z, y) = (z − y) ∏_{n≥1} (z − r²ⁿy)(y − r²ⁿz) / ((z − r²ⁿz)(y − r²ⁿy))
//! ```
//!
//! The n-th factor equals `(1 − r²ⁿ y/z)(1 − r²ⁿ z/y)/(1 − r²ⁿ)²`, so it tends
//! to 1 geometrically for every fixed pair of nonzero points and the product
//! converges on all of `(ℂ∖{0})²`. Evaluation is therefore allowed anywhere
//! off the origin; the identity checks below need points well outside the
//! annulus (`1/z̄` and `r⁻²z`).

use crate::{check_finite, AnnulusGeometry, ComplexPoint, Error, Result, TruncationControl};

/// Bound on `|log factor_n| / r²ⁿ` at (z, y): the n-th factor is
/// `(1 − r²ⁿ y/z)(1 − r²ⁿ z/y)/(1 − r²ⁿ)²`.
fn tail_scale(z: ComplexPoint, y: ComplexPoint) -> f64 {
    let (mz, my) = (z.norm(), y.norm());
    let spread = 2.0 + mz / my + my / mz;
    [mz, my, mz.recip(), my.recip(), spread]
        .into_iter()
        .fold(1.0, f64::max)
}

fn check_args(z: ComplexPoint, y: ComplexPoint) -> Result<()> {
    check_finite("z", z)?;
    check_finite("y", y)?;
    if z == ComplexPoint::new(0.0, 0.0) || y == ComplexPoint::new(0.0, 0.0) {
        return Err(Error::Domain(format!(
            "prime function needs nonzero arguments (z = {z}, y = {y})"
        )));
    }
    Ok(())
}

/// Number of product factors the stopping rule uses at (z, y).
pub fn terms_used(z: ComplexPoint, y: ComplexPoint, geom: &AnnulusGeometry, trunc: &TruncationControl) -> usize {
    trunc.geometric_cutoff(geom.r() * geom.r(), tail_scale(z, y))
}

/// Truncated prime function ω(z, y).
pub fn eval_prime(
    z: ComplexPoint,
    y: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
) -> Result<ComplexPoint> {
    check_args(z, y)?;
    let r2 = geom.r() * geom.r();
    let n_terms = terms_used(z, y, geom, trunc);
    let mut value = z - y;
    let mut a = 1.0;
    for _ in 0..n_terms {
        a *= r2;
        value *= ((z - y * a) * (y - z * a)) / ((z - z * a) * (y - y * a));
    }
    Ok(value)
}

/// ω(z, y) together with ∂ω/∂z, from the term-wise logarithmic derivative.
///
/// Written as `ω = (z − y)·Π(z)` with `∂ω/∂z = Π·(1 + (z − y)·Π'/Π)`, which
/// stays finite at the zero z = y.
pub fn eval_prime_with_derivative(
    z: ComplexPoint,
    y: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
) -> Result<(ComplexPoint, ComplexPoint)> {
    check_args(z, y)?;
    let r2 = geom.r() * geom.r();
    let n_terms = terms_used(z, y, geom, trunc);
    let mut prod = ComplexPoint::new(1.0, 0.0);
    let mut log_deriv = ComplexPoint::new(0.0, 0.0);
    let mut a = 1.0;
    for _ in 0..n_terms {
        a *= r2;
        let f1 = z - y * a;
        let f2 = y - z * a;
        prod *= (f1 * f2) / ((z - z * a) * (y - y * a));
        // d/dz log of (z − a y)(y − a z)/(z(1−a)·y(1−a))
        log_deriv += f1.inv() - a / f2 - z.inv();
    }
    let diff = z - y;
    Ok((diff * prod, prod * (1.0 + diff * log_deriv)))
}

/// Both sides of the reflection identity `conj(ω(1/z̄, 1/ȳ)) = −ω(z, y)/(zy)`.
pub fn prime_identity_reflect(
    z: ComplexPoint,
    y: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
) -> Result<(ComplexPoint, ComplexPoint)> {
    check_args(z, y)?;
    let lhs = eval_prime(z.conj().inv(), y.conj().inv(), geom, trunc)?.conj();
    let rhs = -eval_prime(z, y, geom, trunc)? / (z * y);
    Ok((lhs, rhs))
}

/// Both sides of the quasi-periodicity identity `ω(r⁻²z, y) = −z·ω(z, y)/(r²y)`.
///
/// Replacing z by r⁻²z shifts both factor families of the product by one
/// index; the boundary terms collect into the multiplier `−z/(r²y)`.
/// Requires z ≠ y, where the right side vanishes but the left does not.
pub fn prime_identity_period(
    z: ComplexPoint,
    y: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
) -> Result<(ComplexPoint, ComplexPoint)> {
    check_args(z, y)?;
    if (z - y).norm() <= 1e-14 * z.norm().max(y.norm()) {
        return Err(Error::Domain(
            "quasi-periodicity check needs z ≠ y".to_string(),
        ));
    }
    let r2 = geom.r() * geom.r();
    let lhs = eval_prime(z / r2, y, geom, trunc)?;
    let rhs = -z * eval_prime(z, y, geom, trunc)? / (r2 * y);
    Ok((lhs, rhs))
}

/// Relative residual `|lhs − rhs| / max(|lhs|, |rhs|)` (0 when both vanish).
pub fn identity_residual((lhs, rhs): (ComplexPoint, ComplexPoint)) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}
