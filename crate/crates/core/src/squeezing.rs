//! Closed-form squeezing-function values on annuli and product bounds.
//!
//! On `A_r` the squeezing function depends only on `|z|`:
//! `S(z) = max(|z|, r/|z|)`, with the punctured disk as the case `r = 0`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point of `A_r` given by its modulus; `r = 0` is the punctured disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeQuery {
    r: f64,
    z_modulus: f64,
}

impl SqueezeQuery {
    pub fn new(r: f64, z_modulus: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Geometry(format!("inner radius r = {r} not in [0, 1)")));
        }
        if !(z_modulus > r && z_modulus < 1.0) {
            return Err(Error::Domain(format!("|z| = {z_modulus} not in (r, 1) = ({r}, 1)")));
        }
        Ok(SqueezeQuery { r, z_modulus })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn z_modulus(&self) -> f64 {
        self.z_modulus
    }

    /// The point `r/|z|` paired with this one by the inversion `z ↦ r/z`.
    /// Fails for `r = 0`, where the inversion does not exist.
    pub fn inverted(&self) -> Result<Self> {
        if self.r == 0.0 {
            return Err(Error::Domain("the punctured disk has no inversion".into()));
        }
        Self::new(self.r, self.r / self.z_modulus)
    }
}

/// Per-factor squeezing values of a product domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductQuery {
    factor_values: Vec<f64>,
}

impl ProductQuery {
    pub fn new(factor_values: Vec<f64>) -> Result<Self> {
        if factor_values.is_empty() {
            return Err(Error::Domain("product needs at least one factor".into()));
        }
        if let Some(bad) = factor_values.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
            return Err(Error::Domain(format!("factor squeezing value {bad} not in (0, 1]")));
        }
        Ok(ProductQuery { factor_values })
    }

    pub fn factor_values(&self) -> &[f64] {
        &self.factor_values
    }
}

/// `S_{A_r}(z) = max(|z|, r/|z|)`.
pub fn squeeze_annulus(q: &SqueezeQuery) -> f64 {
    q.z_modulus.max(q.r / q.z_modulus)
}

/// Squeezing function of the slit disk family, `S̃_r(z) = |z|`.
pub fn squeeze_tilde(q: &SqueezeQuery) -> f64 {
    q.z_modulus
}

/// The two branches `(S¹, S²) = (|z|, r/|z|)` whose maximum is [`squeeze_annulus`].
pub fn squeeze_s1_s2(q: &SqueezeQuery) -> (f64, f64) {
    (q.z_modulus, q.r / q.z_modulus)
}

/// `σ(s) = log((1 + s)/(1 − s))`.
pub fn sigma(s: f64) -> f64 {
    ((1.0 + s) / (1.0 - s)).ln()
}

/// Inverse of [`sigma`]: `σ⁻¹(x) = tanh(x/2)`.
pub fn sigma_inverse(x: f64) -> f64 {
    (0.5 * x).tanh()
}

/// Value of the conjectured formula, flagged when `|z| < √r` (outside the
/// range it was stated for).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjectureValue {
    pub value: f64,
    pub in_stated_range: bool,
}

/// `σ⁻¹(log[(1 + |z|)(1 − r) / ((1 − |z|)(1 + r))])`.
pub fn conjectured_dgz(q: &SqueezeQuery) -> ConjectureValue {
    let (r, m) = (q.r, q.z_modulus);
    let x = ((1.0 + m) * (1.0 - r) / ((1.0 - m) * (1.0 + r))).ln();
    ConjectureValue {
        value: sigma_inverse(x),
        in_stated_range: m >= r.sqrt(),
    }
}

/// Lower bound `(Σ sᵢ⁻²)^{−1/2}` for the squeezing function of a product.
pub fn product_lower_bound(pq: &ProductQuery) -> f64 {
    // scaled by the smallest factor so the sum is ≥ 1 and the bound never rounds above it
    let min = pq.factor_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let sum: f64 = pq.factor_values.iter().map(|s| (min / s).powi(2)).sum();
    min / sum.sqrt()
}

/// Product bound on `A_r × 𝔻` at `(z₁, 0)`:
/// `r/√(r² + |z₁|²)` for `|z₁| ≤ √r`, `|z₁|/√(1 + |z₁|²)` above.
pub fn annulus_times_disk_bound(r: f64, z1_modulus: f64) -> Result<f64> {
    let q = SqueezeQuery::new(r, z1_modulus)?;
    let m = q.z_modulus;
    Ok(if m <= r.sqrt() {
        r / (r * r + m * m).sqrt()
    } else {
        m / (1.0 + m * m).sqrt()
    })
}
