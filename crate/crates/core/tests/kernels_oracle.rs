mod common;

use common::{
    kernel_grid, kernel_j_oracle, kernel_p_oracle, kernel_q_oracle, rel_diff, theta_a_oracle, villat_oracle,
    wp_lattice_oracle,
};
use num_complex::Complex64;
use proptest::prelude::*;
use slitmap::kernels::{
    dp_dtheta, kernel_h, kernel_i, kernel_j, kernel_p, kernel_p_via_theta, kernel_q, theta_a, villat,
    villat_directed, weierstrass_p, KernelPoint,
};
use slitmap::{AnnulusGeometry, TruncationControl};
use std::f64::consts::PI;

fn fine() -> TruncationControl {
    TruncationControl::new(256, 1e-14).unwrap()
}

fn geom(r: f64) -> AnnulusGeometry {
    AnnulusGeometry::from_radius(r).unwrap()
}

fn kp(r: f64, y: f64, theta: f64) -> KernelPoint {
    KernelPoint::new(r, y, theta).unwrap()
}

// 50-digit reference values, computed once from the raw symmetric partial sums.
const VILLAT_R04: (f64, f64) = (1.048_127_377_011_463_789_7, 2.239_181_235_629_652_427_5);
const VILLAT_DIRECTED_R03: (f64, f64) = (0.509_102_758_202_960_913_82, -1.323_783_957_007_665_016_3);
const P_03_06_HALF_PI: f64 = 0.340_779_489_527_900_718_38;
const J_025_06_1: f64 = 1.327_779_626_477_577_519_3;
const Q_03_05_2: (f64, f64) = (0.233_046_962_900_066_116_79, -0.277_482_191_037_171_459_87);
const A_07_03_P12: (f64, f64) = (0.521_724_940_073_899_110_39, 0.107_884_593_830_877_057_67);

#[test]
fn oracles_reproduce_frozen_values() {
    let z = Complex64::from_polar(0.5, PI / 4.0);
    let v = villat_oracle(z, 0.4, 500);
    assert!((v - Complex64::new(VILLAT_R04.0, VILLAT_R04.1)).norm() < 1e-15);
    assert!((kernel_p_oracle(0.3, 0.6, PI / 2.0) - P_03_06_HALF_PI).abs() < 1e-15);
    assert!((kernel_j_oracle(0.25, 0.6, 1.0) - J_025_06_1).abs() < 1e-15);
    let a = theta_a_oracle(Complex64::new(0.7, 0.3), 1.2, 200);
    assert!((a - Complex64::new(A_07_03_P12.0, A_07_03_P12.1)).norm() < 1e-15);
}

#[test]
fn villat_matches_partial_sum() {
    let z = Complex64::from_polar(0.5, PI / 4.0);
    let v = villat(z, &geom(0.4), &fine()).unwrap();
    assert!(rel_diff(v, Complex64::new(VILLAT_R04.0, VILLAT_R04.1)) < 1e-14);
}

#[test]
fn villat_directed_matches_partial_sum() {
    let v = villat_directed(Complex64::new(0.6, 0.0), Complex64::i(), &geom(0.3), &fine()).unwrap();
    let expect = Complex64::new(VILLAT_DIRECTED_R03.0, VILLAT_DIRECTED_R03.1);
    assert!(rel_diff(v, expect) < 1e-14);
    assert!(rel_diff(expect, villat_oracle(Complex64::new(0.0, -0.6), 0.3, 500)) < 1e-15);
}

#[test]
fn villat_directed_rotation_covariance() {
    let g = geom(0.35);
    let w = Complex64::new(0.2, -0.45);
    for theta in [0.3, 2.0, 5.5] {
        let alpha = Complex64::from_polar(1.0, theta);
        let a = villat_directed(alpha * w, alpha, &g, &fine()).unwrap();
        let b = villat(w, &g, &fine()).unwrap();
        assert!((a - b).norm() < 1e-13 * b.norm());
    }
    assert!(villat_directed(w, Complex64::new(1.1, 0.0), &g, &fine()).is_err());
}

#[test]
fn p_j_q_match_partial_sums() {
    let p = kernel_p(&kp(0.3, 0.6, PI / 2.0), &fine()).unwrap();
    assert!((p - P_03_06_HALF_PI).abs() < 1e-13);
    let j = kernel_j(&kp(0.25, 0.6, 1.0), &fine()).unwrap();
    assert!((j - J_025_06_1).abs() < 1e-13);
    let w = Complex64::from_polar(0.7, 0.4);
    let q = kernel_q(&kp(0.3, 0.5, 2.0), w, &fine()).unwrap();
    let expect = Complex64::new(Q_03_05_2.0, Q_03_05_2.1);
    assert!(rel_diff(q, expect) < 1e-13);
    assert!(rel_diff(expect, kernel_q_oracle(0.3, 0.5, 2.0, w)) < 1e-15);
}

#[test]
fn theta_product_matches_oracle() {
    let a = theta_a(Complex64::new(0.7, 0.3), 1.2, &fine()).unwrap();
    assert!(rel_diff(a, Complex64::new(A_07_03_P12.0, A_07_03_P12.1)) < 1e-14);
}

#[test]
fn p_and_j_match_oracle_on_grid() {
    let t = fine();
    for (r, y, theta) in kernel_grid() {
        let k = kp(r, y, theta);
        let p = kernel_p(&k, &t).unwrap();
        let j = kernel_j(&k, &t).unwrap();
        let po = kernel_p_oracle(r, y, theta);
        let jo = kernel_j_oracle(r, y, theta);
        assert!((p - po).abs() < 1e-12 * po.abs().max(1.0), "P({r},{y},{theta}): {p} vs {po}");
        assert!((j - jo).abs() < 1e-12 * jo.abs().max(1.0), "J({r},{y},{theta}): {j} vs {jo}");
    }
}

#[test]
fn p_symmetric_under_reflection_on_grid() {
    let t = fine();
    for (r, y, theta) in kernel_grid() {
        let a = kernel_p(&kp(r, y, theta), &t).unwrap();
        let b = kernel_p(&kp(r, y, 2.0 * PI - theta), &t).unwrap();
        assert!((a - b).abs() < 1e-11, "({r},{y},{theta}): {a} vs {b}");
    }
}

#[test]
fn p_monotone_on_half_circles() {
    let t = fine();
    let h = 1e-5;
    for (r, y, theta) in kernel_grid() {
        let fd = (kernel_p(&kp(r, y, theta + h), &t).unwrap() - kernel_p(&kp(r, y, theta - h), &t).unwrap()) / (2.0 * h);
        let d = dp_dtheta(&kp(r, y, theta), &t).unwrap();
        let on_axis = theta == 0.0 || (theta - PI).abs() < 1e-12;
        if on_axis {
            assert!(fd.abs() < 1e-5 && d.abs() < 1e-9, "({r},{y},{theta}): fd {fd}, dP {d}");
        } else if theta < PI {
            assert!(fd > 0.0 && d > 0.0, "({r},{y},{theta}): fd {fd}, dP {d}");
        } else {
            assert!(fd < 0.0 && d < 0.0, "({r},{y},{theta}): fd {fd}, dP {d}");
        }
    }
}

#[test]
fn p_via_theta_agrees_on_grid() {
    let t = fine();
    for (r, y, theta) in kernel_grid() {
        let k = kp(r, y, theta);
        let a = kernel_p(&k, &t).unwrap();
        let b = kernel_p_via_theta(&k, &t).unwrap();
        assert!((a - b).abs() < 1e-9, "({r},{y},{theta}): {a} vs {b}");
    }
}

#[test]
fn p_via_theta_fixed_points() {
    let t = fine();
    for (r, y, theta) in [(0.2, 0.5, 1.3), (0.4, 0.7, 2.9)] {
        let k = kp(r, y, theta);
        let a = kernel_p(&k, &t).unwrap();
        assert!((a - kernel_p_via_theta(&k, &t).unwrap()).abs() < 1e-9);
    }
    // 50-digit values of the raw sum
    assert!((kernel_p(&kp(0.2, 0.5, 1.3), &t).unwrap() - 0.140_805_175_413_632_5).abs() < 1e-13);
    assert!((kernel_p(&kp(0.4, 0.7, 2.9), &t).unwrap() - 0.388_890_623_909_413_1).abs() < 1e-13);
}

#[test]
fn dp_dtheta_matches_difference_quotient_on_grid() {
    let t = fine();
    let h = 1e-5;
    for (r, y, theta) in kernel_grid() {
        let fd = (kernel_p(&kp(r, y, theta + h), &t).unwrap() - kernel_p(&kp(r, y, theta - h), &t).unwrap()) / (2.0 * h);
        let d = dp_dtheta(&kp(r, y, theta), &t).unwrap();
        assert!((d - fd).abs() < 1e-5, "({r},{y},{theta}): {d} vs {fd}");
    }
    let d = dp_dtheta(&kp(0.2, 0.5, 1.0), &t).unwrap();
    // 30-digit derivative of the raw sum
    assert!((d - 0.884_768_055_153_487_4).abs() < 1e-12, "{d}");
}

#[test]
fn weierstrass_matches_lattice_sum() {
    for (z, p) in [
        (Complex64::new(0.7, 0.3), 1.2),
        (Complex64::new(2.5, -0.9), 0.8),
        (Complex64::new(1.0, 1.5), 1.6),
    ] {
        let w = weierstrass_p(z, p, &fine()).unwrap();
        let o = wp_lattice_oracle(z, p, 200);
        assert!(rel_diff(w, o) < 1e-6, "℘({z}; {p}) = {w} vs lattice {o}");
    }
}

#[test]
fn weierstrass_symmetries() {
    let t = fine();
    let p = 1.1;
    let z = Complex64::new(0.9, 0.4);
    let w = weierstrass_p(z, p, &t).unwrap();
    assert!(rel_diff(w, weierstrass_p(-z, p, &t).unwrap()) < 1e-12);
    assert!(rel_diff(w, weierstrass_p(z + 2.0 * PI, p, &t).unwrap()) < 1e-8);
    assert!(rel_diff(w, weierstrass_p(z + Complex64::new(0.0, 2.0 * p), p, &t).unwrap()) < 1e-8);
    let small = Complex64::new(1e-3, 0.0);
    let ws = weierstrass_p(small, p, &t).unwrap();
    assert!(rel_diff(ws, 1.0 / (small * small)) < 1e-4);
    assert!(weierstrass_p(Complex64::new(2.0 * PI, 2.0 * p), p, &t).is_err());
}

#[test]
fn h_endpoints_are_single_differences() {
    let t = fine();
    let (r, y) = (0.3, 0.55);
    let th = (0.4, 2.0, 4.5);
    let w = Complex64::from_polar(0.6, 1.0);
    let i = |theta: f64| kernel_i(&kp(r, y, theta), w, &t).unwrap();
    let h0 = kernel_h(r, y, w, th, 0.0, &t).unwrap();
    let h1 = kernel_h(r, y, w, th, 1.0, &t).unwrap();
    assert!((h0 - (i(th.0) - i(th.1))).abs() < 1e-14);
    assert!((h1 - (i(th.0) - i(th.2))).abs() < 1e-14);
    assert!(kernel_h(r, y, w, th, 1.5, &t).is_err());
}

/// Near `w = r e^{iθ₂}` on the inner circle, `−I(θ₂)` behaves like
/// `2/(θ₂ − arg w)`: H blows up to +∞ as arg w increases to θ₂ and to −∞
/// as arg w decreases to θ₂.
#[test]
fn h_pole_at_second_angle() {
    let t = fine();
    let (r, y) = (0.3, 0.55);
    let th = (0.4, 2.0, 4.5);
    let mut prev_left = f64::NEG_INFINITY;
    for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
        let left = kernel_h(r, y, Complex64::from_polar(r, th.1 - eps), th, 0.0, &t).unwrap();
        let right = kernel_h(r, y, Complex64::from_polar(r, th.1 + eps), th, 0.0, &t).unwrap();
        assert!(left > prev_left && left > 0.0, "eps {eps}: {left}");
        assert!(right < 0.0, "eps {eps}: {right}");
        // simple pole with residue 2 in the angle
        assert!((left * eps - 2.0).abs() < 0.05, "eps {eps}: {}", left * eps);
        prev_left = left;
    }
}

#[test]
fn q_on_positive_axis_reduces_to_p() {
    let t = fine();
    for (r, y, theta) in kernel_grid().into_iter().step_by(7) {
        let k = kp(r, y, theta);
        let q = kernel_q(&k, Complex64::new(y, 0.0), &t).unwrap();
        assert!(q.im.abs() < 1e-12, "({r},{y},{theta}): {q}");
        assert!((q.re - kernel_p(&k, &t).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn q_conjugation_symmetry() {
    let t = fine();
    let w = Complex64::from_polar(0.7, 0.4);
    let a = kernel_q(&kp(0.3, 0.5, 2.0), w, &t).unwrap();
    let b = kernel_q(&kp(0.3, 0.5, 2.0 * PI - 2.0), w.conj(), &t).unwrap();
    assert!((a.conj() - b).norm() < 1e-13);
}

#[test]
fn villat_imaginary_on_unit_circle() {
    let t = fine();
    for r in [0.1, 0.4, 0.7] {
        for k in 0..64 {
            let theta = 2.0 * PI * (k as f64 + 0.5) / 64.0;
            let v = villat(Complex64::from_polar(1.0, theta), &geom(r), &t).unwrap();
            assert!(v.re.abs() < 1e-10, "r {r}, θ {theta}: {v}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closer_to_pi_grows_faster(r in 0.05f64..0.8, s in 0.05f64..0.95, t1 in 0.0f64..(2.0 * PI), t2 in 0.0f64..(2.0 * PI)) {
        let y = r + (1.0 - r) * s;
        let (near, far) = if (PI - t1).abs() <= (PI - t2).abs() { (t1, t2) } else { (t2, t1) };
        let t = fine();
        let pn = kernel_p(&kp(r, y, near), &t).unwrap();
        let pf = kernel_p(&kp(r, y, far), &t).unwrap();
        prop_assert!(pn >= pf - 1e-12, "P({near}) = {pn} < P({far}) = {pf}");
    }

    #[test]
    fn p_via_theta_agrees_everywhere(r in 0.05f64..0.8, s in 0.02f64..0.98, theta in 0.0f64..(2.0 * PI)) {
        let y = r + (1.0 - r) * s;
        let k = kp(r, y, theta);
        let t = fine();
        prop_assert!((kernel_p(&k, &t).unwrap() - kernel_p_via_theta(&k, &t).unwrap()).abs() < 1e-9);
    }
}
