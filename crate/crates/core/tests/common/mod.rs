//! Independent brute-force oracles for the integration tests.
//!
//! Nothing here calls into the library's summation or product code: the
//! prime product and the Villat sum are evaluated factor by factor in
//! double-double arithmetic, and ℘ comes from a raw lattice sum.

#![allow(dead_code)]

use num_complex::Complex64;

/// Double-double real: value = hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn from(z: Complex64) -> CDd {
        CDd { re: Dd::from(z.re), im: Dd::from(z.im) }
    }

    pub fn real(x: Dd) -> CDd {
        CDd { re: x, im: Dd::ZERO }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(self, o: CDd) -> CDd {
        CDd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    pub fn sub(self, o: CDd) -> CDd {
        CDd { re: self.re.sub(o.re), im: self.im.sub(o.im) }
    }

    pub fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn scale(self, a: Dd) -> CDd {
        CDd { re: self.re.mul(a), im: self.im.mul(a) }
    }

    pub fn div(self, o: CDd) -> CDd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(CDd { re: o.re, im: o.im.neg() });
        CDd { re: num.re.div(den), im: num.im.div(den) }
    }
}

/// ω(z, y) as the raw product of `factors` factors, evaluated in double-double.
pub fn prime_oracle(z: Complex64, y: Complex64, r: f64, factors: usize) -> Complex64 {
    let z = CDd::from(z);
    let y = CDd::from(y);
    let r = Dd::from(r);
    let r2 = r.mul(r);
    let mut a = Dd::ONE;
    let mut acc = z.sub(y);
    for _ in 0..factors {
        a = a.mul(r2);
        let num = z.sub(y.scale(a)).mul(y.sub(z.scale(a)));
        let den = z.sub(z.scale(a)).mul(y.sub(y.scale(a)));
        acc = acc.mul(num.div(den));
    }
    acc.to_c64()
}

/// Symmetric partial sum Σ_{n=-N}^{N} (r^{2n}+z)/(r^{2n}−z) in double-double.
///
/// Negative-n terms are written as (1 + r^{2|n|} z)/(1 − r^{2|n|} z), the
/// same fraction with numerator and denominator scaled by r^{2|n|}.
pub fn villat_oracle(z: Complex64, r: f64, half_width: usize) -> Complex64 {
    let z = CDd::from(z);
    let one = CDd::real(Dd::ONE);
    let r = Dd::from(r);
    let r2 = r.mul(r);
    let mut sum = one.add(z).div(one.sub(z));
    let mut a = Dd::ONE;
    for _ in 1..=half_width {
        a = a.mul(r2);
        let ca = CDd::real(a);
        let pos = ca.add(z).div(ca.sub(z));
        let az = z.scale(a);
        let neg = one.add(az).div(one.sub(az));
        sum = sum.add(pos).add(neg);
    }
    sum.to_c64()
}

/// Loewner kernel P(r, y, θ) through the raw-sum oracle.
pub fn kernel_p_oracle(r: f64, y: f64, theta: f64) -> f64 {
    let z = Complex64::from_polar(r / y, theta);
    1.0 - villat_oracle(z, r, 500).re
}

/// J(r, y, θ) through the raw-sum oracle.
pub fn kernel_j_oracle(r: f64, y: f64, theta: f64) -> f64 {
    let z = Complex64::from_polar(r / y, theta);
    villat_oracle(z, r, 500).im
}

/// Q(r, y, θ, w) through the raw-sum oracle.
pub fn kernel_q_oracle(r: f64, y: f64, theta: f64, w: Complex64) -> Complex64 {
    let z = Complex64::from_polar(r, theta) / w;
    Complex64::new(1.0, kernel_j_oracle(r, y, theta)) - villat_oracle(z, r, 500)
}

/// A(z; p) as a raw product of `factors` triples in double-double.
pub fn theta_a_oracle(z: Complex64, p: f64, factors: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let mut acc = CDd::real(Dd::ONE);
    for k in 1..=factors {
        let kf = k as f64;
        let a = CDd::from(one - Complex64::new((-2.0 * kf * p).exp(), 0.0));
        let b = CDd::from(one - (-(2.0 * kf - 1.0) * p + i * z).exp());
        let c = CDd::from(one - (-(2.0 * kf - 1.0) * p - i * z).exp());
        acc = acc.mul(a).mul(b).mul(c);
    }
    acc.to_c64()
}

fn lattice_partial(z: Complex64, p: f64, m: i64) -> Complex64 {
    let w1 = Complex64::new(2.0 * std::f64::consts::PI, 0.0);
    let w2 = Complex64::new(0.0, 2.0 * p);
    let mut s = 1.0 / (z * z);
    for j in -m..=m {
        for k in -m..=m {
            if j == 0 && k == 0 {
                continue;
            }
            let w = w1 * j as f64 + w2 * k as f64;
            s += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w);
        }
    }
    s
}

/// Weierstrass ℘ with periods 2π, 2ip from the lattice sum over a
/// (2m+1)² square, Richardson-extrapolated against the m/2 square
/// (the symmetric truncation error decays like 1/m²).
pub fn wp_lattice_oracle(z: Complex64, p: f64, m: i64) -> Complex64 {
    let coarse = lattice_partial(z, p, m / 2);
    let fine = lattice_partial(z, p, m);
    (fine * 4.0 - coarse) / 3.0
}

/// Rectangular grid used by the kernel property suites:
/// r ∈ {0.1,0.2,0.4,0.6}, y at 5 log-spaced interior points of (r,1),
/// θ = 2πk/16 for k = 0..16 (so 0 and π are grid points).
pub fn kernel_grid() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for &r in &[0.1f64, 0.2, 0.4, 0.6] {
        for j in 1..=5 {
            let y = (r.ln() * (1.0 - j as f64 / 6.0)).exp();
            for k in 0..16 {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
                out.push((r, y, theta));
            }
        }
    }
    out
}

pub fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

#[test]
fn dd_arithmetic_is_extended() {
    // 1/3 * 3 - 1 vanishes to ~1e-32 in double-double
    let third = Dd::ONE.div(Dd::from(3.0));
    let back = third.mul(Dd::from(3.0)).sub(Dd::ONE);
    assert!(back.to_f64().abs() < 1e-30);
    let z = CDd::from(Complex64::new(0.3, -0.7));
    let w = CDd::from(Complex64::new(-1.1, 0.4));
    let q = z.div(w).mul(w).sub(z).to_c64();
    assert!(q.norm() < 1e-30);
}
