use serde::{Deserialize, Serialize};

use crate::{ComplexPoint, Error, Result};

/// The annulus `A_r = {r < |z| < 1}`, carried together with its modulus `p = −ln r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusGeometry {
    r: f64,
    p: f64,
}

/// Relative slack allowed for points just outside the closed annulus.
pub const ANNULUS_SLACK: f64 = 0.1;

impl AnnulusGeometry {
    pub fn from_radius(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Geometry(format!("inner radius r = {r} not in (0, 1)")));
        }
        Ok(AnnulusGeometry { r, p: -r.ln() })
    }

    pub fn from_modulus(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Geometry(format!("modulus p = {p} not in (0, ∞)")));
        }
        Self::from_radius((-p).exp())
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Strict membership in the open annulus.
    pub fn contains(&self, z: ComplexPoint) -> bool {
        let m = z.norm();
        m > self.r && m < 1.0
    }

    /// Membership in the closed annulus widened by [`ANNULUS_SLACK`].
    pub fn near_closure(&self, z: ComplexPoint) -> bool {
        let m = z.norm();
        m >= self.r * (1.0 - ANNULUS_SLACK) && m <= 1.0 + ANNULUS_SLACK
    }

    pub(crate) fn require_near_closure(&self, name: &str, z: ComplexPoint) -> Result<()> {
        if self.near_closure(z) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{name} = {z} (|{name}| = {}) is outside the closed annulus r = {} with {}% slack",
                z.norm(),
                self.r,
                ANNULUS_SLACK * 100.0
            )))
        }
    }

    /// The annulus after the slit has grown for time `t`: `r_t = e^{−p+t}`.
    pub fn evolved(&self, t: f64) -> Result<Self> {
        Self::from_modulus(self.p - t)
    }
}

/// Truncation policy shared by every infinite product and bilateral sum.
///
/// A product or sum over `n ≥ 1` whose `k`-th correction is bounded by
/// `scale·ratioᵏ` stops at the first `n` with the whole remaining tail
/// `scale·ratioⁿ⁺¹/(1 − ratio)` below `tol`, and never runs past `max_terms`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationControl {
    pub max_terms: usize,
    pub tol: f64,
}

impl TruncationControl {
    pub const DEFAULT_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_TERMS: usize = 256;

    pub fn new(max_terms: usize, tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Domain("max_terms must be positive".into()));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Domain(format!("tol = {tol} must be positive")));
        }
        Ok(TruncationControl { max_terms, tol })
    }

    pub fn with_tol(tol: f64) -> Result<Self> {
        Self::new(Self::DEFAULT_MAX_TERMS, tol)
    }

    /// Number of terms needed for a geometric tail `scale·ratioᵏ`, `0 < ratio < 1`.
    pub fn geometric_cutoff(&self, ratio: f64, scale: f64) -> usize {
        let mut bound = scale * ratio / (1.0 - ratio);
        for n in 1..=self.max_terms {
            bound *= ratio;
            if bound < self.tol {
                return n;
            }
        }
        self.max_terms
    }
}

impl Default for TruncationControl {
    fn default() -> Self {
        TruncationControl {
            max_terms: Self::DEFAULT_MAX_TERMS,
            tol: Self::DEFAULT_TOL,
        }
    }
}
