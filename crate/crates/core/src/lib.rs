//! Numerical machinery for conformal maps on annuli.
//!
//! The crate is organised bottom-up:
//!
//! * [`prime`] evaluates the Schottky–Klein prime function of an annulus
//!   and its reflection / quasi-periodicity identities.
//! * [`kernels`] holds the Villat kernel and the Loewner kernels built on
//!   it (`P`, `Q`, `J`, `I`, `H`), together with the theta-product and
//!   Weierstrass ℘ routes used to cross-check `P` and `∂θP`.
//! * [`conformal`] builds the map of an annulus onto a circularly slit disk
//!   and extracts the slit geometry.
//! * [`loewner`] integrates the single- and three-slit Komatu–Loewner flows,
//!   including the balancing schedule for the three-slit system.
//! * [`squeezing`] collects the closed-form squeezing-function formulas.
//!
//! All functions are pure; evolutions own their state.

pub mod conformal;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod loewner;
pub mod prime;
pub mod squeezing;

pub use error::{Error, Result};
pub use geometry::{AnnulusGeometry, TruncationControl};

/// Complex numbers are plain `Complex64`; finiteness is checked at the API boundary.
pub type ComplexPoint = num_complex::Complex64;

pub(crate) const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Reduce an angle into `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TWO_PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if t >= TWO_PI {
        0.0
    } else {
        t
    }
}

pub(crate) fn check_finite(name: &str, z: ComplexPoint) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {z} is not finite")))
    }
}
