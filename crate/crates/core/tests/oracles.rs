//! Values computed by hand or by an independent route, frozen.

use approx::assert_abs_diff_eq;
use num_complex::Complex64 as C;

use pvi_core::backlund::heuristic::Candidate;
use pvi_core::experiments::takano::{case_of, gamma_curve, takano_lambda, takano_qp, TakanoParams, DEFAULT_M};
use pvi_core::fuchsian::coalesce::predicted_trace;
use pvi_core::monodromy::{cubic_value, rh_map, Monodromy2x2};
use pvi_core::weyl::{local_traces, theta_from_traces, theta_of_kappa, LocalTraces};
use pvi_core::*;

fn e(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from_ratio(n, d)
}

#[test]
fn theta_at_half_kappa0() {
    // k = (1/2, 0, 0, 0, 0): a = (2, 2, 2, -2), so th_i = -4 + 4 = 0 and
    // th4 = -16 + 16 - 4 = -4.
    let k = Kappa::new([C::new(0.5, 0.0), C::default(), C::default(), C::default(), C::default()]).unwrap();
    let th = theta_of_kappa(&k);
    for (got, want) in th.th.iter().zip([0.0, 0.0, 0.0, -4.0]) {
        assert_abs_diff_eq!(got.re, want, epsilon = 1e-14);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-14);
    }
}

#[test]
fn theta_exact_from_integer_traces() {
    let a = [e(1, 1), e(-1, 1), e(2, 1), e(0, 1)];
    let th = theta_from_traces(&LocalTraces { a });
    // th1 = a1 a4 + a2 a3 = -2, th2 = a2 a4 + a3 a1 = 2,
    // th3 = a3 a4 + a1 a2 = -1, th4 = 0 + 1 + 1 + 4 + 0 - 4 = 2.
    assert_eq!(th.th, [e(-2, 1), e(2, 1), e(-1, 1), e(2, 1)]);
}

#[test]
fn local_trace_signs() {
    let k = Kappa::from_k0_to_k3(C::new(0.1, 0.0), C::new(1.0 / 3.0, 0.0), C::default(), C::new(0.5, 0.0));
    let a = local_traces(&k).a;
    assert_abs_diff_eq!(a[0].re, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(a[1].re, 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(a[2].re, 0.0, epsilon = 1e-14);
    // k4 = 1 - 0.2 - 1/3 - 0.5 = -1/30.
    assert_abs_diff_eq!(a[3].re, -2.0 * (std::f64::consts::PI / 30.0).cos(), epsilon = 1e-14);
}

#[test]
fn predicted_trace_values() {
    // Delta = 1/4: -2 cos(pi/2) = 0. Delta = 1: -2 cos(pi) = 2.
    assert_abs_diff_eq!(predicted_trace(C::new(0.25, 0.0)).norm(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(predicted_trace(C::new(1.0, 0.0)).re, 2.0, epsilon = 1e-15);
    // Both square roots give the same value.
    let d = C::new(-0.3, 0.7);
    let r = d.sqrt();
    assert_abs_diff_eq!((predicted_trace(d) + 2.0 * (std::f64::consts::PI * -r).cos()).norm(), 0.0, epsilon = 1e-14);
}

#[test]
fn cubic_of_diagonal_representation() {
    // Commuting diagonal matrices diag(u, 1/u): x_i = Tr(M_j M_k) is the
    // trace of a product, and f vanishes because the representation exists.
    let d = |u: C| Monodromy2x2::new(u, C::default(), C::default(), 1.0 / u);
    let (u1, u2, u3) = (C::new(0.3, 0.8), C::new(-1.2, 0.1), C::new(0.5, -0.4));
    let u4 = 1.0 / (u1 * u2 * u3);
    let ms = [d(u1), d(u2), d(u3), d(u4)];
    let coords = pvi_core::monodromy::trace_coords(&ms);
    assert!(cubic_value(&coords.x, &coords.theta).norm() < 1e-12);
}

#[test]
fn second_candidate_reverses_momentum() {
    let k = Kappa::from_k0_to_k3(e(1, 3), e(1, 5), e(1, 7), e(1, 11));
    let (q, p) = Candidate::Sol2.apply(&e(2, 1), &e(3, 1), &k, 1).unwrap();
    // k0 + k1 + k4 with k4 = 1 - 2/3 - 1/5 - 1/7 - 1/11.
    let shift = e(1, 3) + e(1, 5) + (e(1, 1) - e(2, 3) - e(1, 5) - e(1, 7) - e(1, 11));
    assert_eq!((q, p), (e(2, 1) + shift / e(3, 1), e(-3, 1)));
}

fn takano() -> TakanoParams {
    let k0 = C::new(0.3, 0.1);
    let k1 = C::new(0.25, 0.3);
    let k2 = C::new(0.1, 0.0);
    let k3 = C::new(-0.25, 0.1);
    TakanoParams {
        c1: C::new(0.2, 0.0),
        c2: C::new(0.0, 0.25),
        rho: 0.5,
        rho0: 0.1,
        mu: 1e-3,
        m: DEFAULT_M,
        kappa: Kappa::new([k0, k1, k2, k3, C::new(1.0, 0.0) - 2.0 * k0 - k1 - k2 - k3]).unwrap(),
    }
}

#[test]
fn lambda_on_the_boundary_row() {
    let p = takano();
    let l = takano_lambda(&p);
    assert_eq!(l.re, 1.0);
    assert_abs_diff_eq!(l.im, -0.3, epsilon = 1e-15);
    assert_eq!(case_of(l), 2);
}

#[test]
fn gamma_curve_has_fixed_q_modulus() {
    let p = takano();
    let c = (p.c1 * p.c2).norm();
    for pt in gamma_curve(&p, 20, 5.0).unwrap() {
        let (q, pp) = takano_qp(&pt, &p);
        assert_abs_diff_eq!(q.norm(), p.mu, epsilon = 1e-12);
        assert_abs_diff_eq!(pp.norm(), c / p.mu, epsilon = 1e-9);
    }
}

#[test]
fn real_line_segment_when_re_lambda_vanishes() {
    let mut p = takano();
    let k1 = C::new(0.5, 0.3);
    let k3 = C::new(0.5, 0.1);
    let k = p.kappa.as_array().clone();
    p.kappa = Kappa::new([k[0], k1, k[2], k3, C::new(1.0, 0.0) - 2.0 * k[0] - k1 - k[2] - k3]).unwrap();
    assert_eq!(takano_lambda(&p).re, 0.0);
    let pts = gamma_curve(&p, 10, 4.0).unwrap();
    assert!(pts.windows(2).all(|w| w[0].arg == w[1].arg));
}

#[test]
fn rh_map_of_s4_image_is_unchanged() {
    // s4 acts on kappa only through k0 and k4 and leaves (q, p) fixed; the
    // traces only see cos(pi k4), which is even.
    let k = Kappa::from_k0_to_k3(C::new(0.2, 0.05), C::new(0.1, -0.1), C::new(-0.2, 0.1), C::new(0.3, 0.0));
    let t = TimeConfig::with_infinity([C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(2.0, 0.5)]).unwrap();
    let st = ExtendedState::new(k, t, C::new(1.2, 0.3), C::new(0.3, -0.2)).unwrap();
    let a = rh_map(&st, 1e-9).unwrap();
    let b = rh_map(&s_apply(&st, 4).unwrap(), 1e-9).unwrap();
    for (u, v) in a.coords.x.iter().zip(&b.coords.x) {
        assert!((u - v).norm() < 1e-8);
    }
    assert!(a.residual_kappa < 1e-7);
}
