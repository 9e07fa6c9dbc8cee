//! Villat kernel and the Loewner kernels derived from it.
//!
//! The Villat kernel is the symmetric limit
//!
//! ```text
//! K_r(z) = lim_{N→∞} Σ_{n=−N}^{N} (r²ⁿ + z)/(r²ⁿ − z)
//! ```
//!
//! Individual terms tend to ∓1, so the sum is only conditionally
//! convergent. Grouping the `n` and `−n` terms gives
//!
//! ```text
//! (a + z)/(a − z) + (1 + az)/(1 − az) = 2a(1 − z²) / ((a − z)(1 − az)),   a = r²ⁿ
//! ```
//!
//! which decays like `r²ⁿ` and is what every kernel here sums.
//!
//! With `Q(r, y, θ, w) = 1 − K_r(r e^{iθ}/w) + i J(r, y, θ)` and
//! `J(r, y, θ) = Im K_r(r e^{iθ}/y)`, the remaining kernels are
//! `R = Re Q`, `I = Im Q` and `P(r, y, θ) = R(r, θ; y)`.

use num_complex::Complex64;

use crate::{check_finite, reduce_angle, AnnulusGeometry, ComplexPoint, Error, Result, TruncationControl, TWO_PI};

/// Relative distance to a pole below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-14;

/// A point (r, y, θ) of the Loewner kernels, with `0 < r < y < 1` and θ in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    geom: AnnulusGeometry,
    y: f64,
    theta: f64,
}

impl KernelPoint {
    pub fn new(r: f64, y: f64, theta: f64) -> Result<Self> {
        let geom = AnnulusGeometry::from_radius(r)?;
        Self::with_geometry(geom, y, theta)
    }

    pub fn with_geometry(geom: AnnulusGeometry, y: f64, theta: f64) -> Result<Self> {
        if !(y > geom.r() && y < 1.0) {
            return Err(Error::Domain(format!(
                "kernel point needs r < y < 1 (r = {}, y = {y})",
                geom.r()
            )));
        }
        if !theta.is_finite() {
            return Err(Error::Domain(format!("theta = {theta} is not finite")));
        }
        Ok(KernelPoint {
            geom,
            y,
            theta: reduce_angle(theta),
        })
    }

    pub fn r(&self) -> f64 {
        self.geom.r()
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn geometry(&self) -> &AnnulusGeometry {
        &self.geom
    }

    /// Same (r, y) at a different angle.
    pub fn at_angle(&self, theta: f64) -> Result<Self> {
        Self::with_geometry(self.geom, self.y, theta)
    }

    /// `θ + i ln y`, the point where the theta-function routes are evaluated.
    fn theta_argument(&self) -> Complex64 {
        Complex64::new(self.theta, self.y.ln())
    }
}

fn check_villat_poles(z: Complex64, r: f64) -> Result<()> {
    // poles sit at z = r^{2n}; only the two nearest in modulus can be close
    let n_star = (z.norm().ln() / (2.0 * r.ln())).round() as i32;
    for n in [n_star - 1, n_star, n_star + 1] {
        let pole = r.powi(2 * n);
        if (z - pole).norm() < POLE_GUARD * z.norm() {
            return Err(Error::Singularity(format!(
                "Villat kernel evaluated at {z}, on the pole r^{} = {pole}",
                2 * n
            )));
        }
    }
    Ok(())
}

/// Villat kernel `K_r(z)`, summed in (n, −n) pairs.
pub fn villat(z: ComplexPoint, geom: &AnnulusGeometry, trunc: &TruncationControl) -> Result<ComplexPoint> {
    check_finite("z", z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("Villat kernel diverges at z = 0".into()));
    }
    let r = geom.r();
    check_villat_poles(z, r)?;
    let r2 = r * r;
    // pair n is ≈ 2a(1 − z²)/(−z) once a ≪ |z| and a|z| ≪ 1
    let pairs = trunc.geometric_cutoff(r2, 2.0 * (z.norm() + z.norm().recip()));
    let one_minus_z2 = 1.0 - z * z;
    let mut sum = (1.0 + z) / (1.0 - z);
    let mut a = 1.0;
    for _ in 0..pairs {
        a *= r2;
        sum += 2.0 * a * one_minus_z2 / ((a - z) * (1.0 - a * z));
    }
    Ok(sum)
}

/// Directed kernel `K_r(z, α) = K_r(z/α)` for a unit direction α.
pub fn villat_directed(
    z: ComplexPoint,
    alpha: ComplexPoint,
    geom: &AnnulusGeometry,
    trunc: &TruncationControl,
) -> Result<ComplexPoint> {
    check_finite("alpha", alpha)?;
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "direction alpha = {alpha} is not unit modulus (|alpha| = {})",
            alpha.norm()
        )));
    }
    villat(z / alpha, geom, trunc)
}

/// Growth rate `P(r, y, θ) = Re[1 − K_r(r e^{iθ}/y)]` of the tracked point.
pub fn kernel_p(kp: &KernelPoint, trunc: &TruncationControl) -> Result<f64> {
    let z = Complex64::from_polar(kp.r() / kp.y, kp.theta);
    Ok(1.0 - villat(z, &kp.geom, trunc)?.re)
}

/// Rotation rate `J(r, y, θ) = Im K_r(r/y, e^{−iθ})` that keeps y_t real.
pub fn kernel_j(kp: &KernelPoint, trunc: &TruncationControl) -> Result<f64> {
    let z = Complex64::from_polar(kp.r() / kp.y, kp.theta);
    Ok(villat(z, &kp.geom, trunc)?.im)
}

/// `Q` with the rotation rate `j` already known.
pub(crate) fn kernel_q_with_j(
    geom: &AnnulusGeometry,
    theta: f64,
    w: ComplexPoint,
    j: f64,
    trunc: &TruncationControl,
) -> Result<ComplexPoint> {
    check_finite("w", w)?;
    if w.norm() == 0.0 {
        return Err(Error::Domain("Q evaluated at w = 0".into()));
    }
    geom.require_near_closure("w", w)?;
    let z = Complex64::from_polar(geom.r(), theta) / w;
    Ok(Complex64::new(1.0, j) - villat(z, geom, trunc)?)
}

/// Logarithmic velocity `Q(r, y, θ, w)` of a point w under slit growth at angle θ.
pub fn kernel_q(kp: &KernelPoint, w: ComplexPoint, trunc: &TruncationControl) -> Result<ComplexPoint> {
    let j = kernel_j(kp, trunc)?;
    kernel_q_with_j(&kp.geom, kp.theta, w, j, trunc)
}

/// `R(r, θ; w) = Re Q`; independent of y.
pub fn kernel_r(geom: &AnnulusGeometry, theta: f64, w: ComplexPoint, trunc: &TruncationControl) -> Result<f64> {
    Ok(kernel_q_with_j(geom, theta, w, 0.0, trunc)?.re)
}

/// `I(r, y, θ; w) = Im Q`.
pub fn kernel_i(kp: &KernelPoint, w: ComplexPoint, trunc: &TruncationControl) -> Result<f64> {
    Ok(kernel_q(kp, w, trunc)?.im)
}

/// `H(r, y, w, θ, λ) = I(θ₁) − (1 − λ) I(θ₂) − λ I(θ₃)`.
///
/// This is the angular velocity of w under the three-slit flow in which
/// slit 1 grows at unit rate while slits 2 and 3 shrink at rates `1 − λ`
/// and `λ`. Simple poles at `w = r e^{iθ₂}` (weight `1 − λ`) and
/// `w = r e^{iθ₃}` (weight `λ`).
pub fn kernel_h(
    r: f64,
    y: f64,
    w: ComplexPoint,
    thetas: (f64, f64, f64),
    lambda: f64,
    trunc: &TruncationControl,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda = {lambda} not in [0, 1]")));
    }
    let base = KernelPoint::new(r, y, thetas.0)?;
    let i1 = kernel_i(&base, w, trunc)?;
    let i2 = kernel_i(&base.at_angle(thetas.1)?, w, trunc)?;
    let i3 = kernel_i(&base.at_angle(thetas.2)?, w, trunc)?;
    Ok(i1 - (1.0 - lambda) * i2 - lambda * i3)
}

fn check_theta_args(z: Complex64, p: f64) -> Result<()> {
    check_finite("z", z)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("modulus p = {p} must be positive")));
    }
    if z.im.abs() >= p {
        return Err(Error::Domain(format!(
            "theta product needs |Im z| < p (Im z = {}, p = {p})",
            z.im
        )));
    }
    Ok(())
}

/// Number of triples the theta product needs: the log of the k-th triple is
/// bounded by about `3·e^{p + |Im z|}·e^{−2kp}`.
fn theta_terms(z: Complex64, p: f64, trunc: &TruncationControl) -> usize {
    trunc.geometric_cutoff((-2.0 * p).exp(), 3.0 * (p + z.im.abs()).exp())
}

/// Theta-type product
/// `A(z; p) = ∏_{k≥1} (1 − e^{−2kp})(1 − e^{−(2k−1)p + iz})(1 − e^{−(2k−1)p − iz})`.
pub fn theta_a(z: ComplexPoint, p: f64, trunc: &TruncationControl) -> Result<ComplexPoint> {
    check_theta_args(z, p)?;
    let iz = Complex64::i() * z;
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 1..=theta_terms(z, p, trunc) {
        let c = -(2.0 * k as f64 - 1.0) * p;
        acc *= (1.0 - (-2.0 * k as f64 * p).exp()) * (1.0 - (c + iz).exp()) * (1.0 - (c - iz).exp());
    }
    Ok(acc)
}

/// `A'(z; p)/A(z; p)` by term-wise differentiation of `log A`.
pub fn theta_a_log_derivative(z: ComplexPoint, p: f64, trunc: &TruncationControl) -> Result<ComplexPoint> {
    check_theta_args(z, p)?;
    let iz = Complex64::i() * z;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=theta_terms(z, p, trunc) {
        let c = -(2.0 * k as f64 - 1.0) * p;
        let plus = (c + iz).exp();
        let minus = (c - iz).exp();
        acc += minus / (1.0 - minus) - plus / (1.0 - plus);
    }
    Ok(Complex64::i() * acc)
}

/// `P(r, y, θ) = 2 Im(A'/A)(θ + i ln y; p)`, an independent route to [`kernel_p`].
pub fn kernel_p_via_theta(kp: &KernelPoint, trunc: &TruncationControl) -> Result<f64> {
    Ok(2.0 * theta_a_log_derivative(kp.theta_argument(), kp.geom.p(), trunc)?.im)
}

/// Weierstrass ℘ for the rectangular lattice with periods 2π and 2ip.
///
/// Summing the lattice over the real period first gives
/// `Σ_m (u − 2πm)⁻² = 1/(4 sin²(u/2))`, so
///
/// ```text
/// ℘(z) = 1/(4 sin²(z/2)) − 1/12
///        + Σ_{n≥1} [ 1/(4 sin²(z/2 − inp)) + 1/(4 sin²(z/2 + inp)) + 1/(2 sinh²(np)) ]
/// ```
///
/// whose rows decay like `e^{−2np}` once z is reduced to the fundamental cell.
pub fn weierstrass_p(z: ComplexPoint, p: f64, trunc: &TruncationControl) -> Result<ComplexPoint> {
    check_finite("z", z)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("modulus p = {p} must be positive")));
    }
    // reduce to Re ∈ [−π, π), Im ∈ [−p, p)
    let re = (z.re + std::f64::consts::PI).rem_euclid(TWO_PI) - std::f64::consts::PI;
    let im = (z.im + p).rem_euclid(2.0 * p) - p;
    let z = Complex64::new(re, im);
    for corner_re in [-TWO_PI, 0.0, TWO_PI] {
        for corner_im in [-2.0 * p, 0.0, 2.0 * p] {
            let w = Complex64::new(corner_re, corner_im);
            if (z - w).norm() < 1e-10 {
                return Err(Error::Singularity(format!("℘ evaluated on the lattice point {w}")));
            }
        }
    }
    let quarter_csc2 = |u: Complex64| {
        let s = u.sin();
        0.25 / (s * s)
    };
    // row n is bounded by about 4·e^{|Im z|}·e^{−2np}
    let rows = trunc.geometric_cutoff((-2.0 * p).exp(), 4.0 * z.im.abs().exp());
    let half = z / 2.0;
    let mut sum = quarter_csc2(half) - 1.0 / 12.0;
    for n in 1..=rows {
        let np = n as f64 * p;
        let shift = Complex64::new(0.0, np);
        let sh = np.sinh();
        sum += quarter_csc2(half - shift) + quarter_csc2(half + shift) + 0.5 / (sh * sh);
    }
    Ok(sum)
}

/// `∂θ P(r, y, θ) = −2 Im ℘(θ + i ln y + ip)`.
pub fn dp_dtheta(kp: &KernelPoint, trunc: &TruncationControl) -> Result<f64> {
    let p = kp.geom.p();
    let z = kp.theta_argument() + Complex64::new(0.0, p);
    Ok(-2.0 * weierstrass_p(z, p, trunc)?.im)
}
