use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use spin_manifold_core::analytic::{metric_closed_form, FieldConfig};
use spin_manifold_core::evolution::{evolved_state, max_deviation, tangent_states};
use spin_manifold_core::spin_ops::{build_spin_operators, embed_site_operator, Direction};
use spin_manifold_core::{CoordinatePoint, SpinSystem, C64};

const FD_STEP: f64 = 1e-6;

fn central_difference(sys: &SpinSystem, p: &CoordinatePoint, field: Option<&FieldConfig>, axis: usize) -> DVector<C64> {
    let shift = |delta: f64| {
        let mut c = [p.theta, p.phi, p.chi];
        c[axis] += delta;
        let q = CoordinatePoint::new(c[0], c[1], c[2]).unwrap();
        evolved_state(sys, &q, field).unwrap().amplitudes
    };
    (shift(FD_STEP) - shift(-FD_STEP)) / C64::new(2.0 * FD_STEP, 0.0)
}

fn check_against_differences(sys: &SpinSystem, field: Option<&FieldConfig>) {
    for theta in [0.35, 1.2, 2.7] {
        for (phi, chi) in [(0.0, 0.4), (1.9, 2.2), (4.4, 5.3)] {
            let p = CoordinatePoint::new(theta, phi, chi).unwrap();
            let t = tangent_states(sys, &p, field).unwrap();
            for (axis, analytic) in t.as_array().into_iter().enumerate() {
                let numeric = central_difference(sys, &p, field, axis);
                let dev = max_deviation(analytic, &numeric);
                assert!(dev < 1e-5, "axis {axis} at {p:?}: {dev}");
            }
        }
    }
}

#[test]
fn tangents_match_finite_differences_without_field() {
    for (n, two_s) in [(2, 1), (3, 2), (2, 3)] {
        check_against_differences(&SpinSystem::new(n, two_s, 1.0).unwrap(), None);
    }
}

#[test]
fn tangents_match_finite_differences_with_field() {
    let sys = SpinSystem::new(3, 2, 1.0).unwrap();
    for (polar, azimuth, ratio) in [(0.0, 0.0, 0.7), (1.1, 2.3, 1.0), (2.9, 5.0, -2.5)] {
        let field = FieldConfig::new(ratio, Direction::new(polar, azimuth).unwrap()).unwrap();
        check_against_differences(&sys, Some(&field));
    }
}

/// Moments of `Sᶻ` in a spin coherent state tilted by `θ`: `⟨Sᶻ⟩` and `⟨(Sᶻ)²⟩`.
fn moments(s: f64, theta: f64) -> (f64, f64) {
    let m = s * theta.cos();
    (m, m * m + 0.5 * s * theta.sin().powi(2))
}

fn approx(a: C64, b: C64, what: &str) {
    assert!((a - b).norm() < 1e-10, "{what}: {a} vs {b}");
}

#[test]
fn nine_scalar_products() {
    for (n_sites, two_s) in [(2, 1), (3, 2), (4, 1), (2, 3)] {
        let sys = SpinSystem::new(n_sites, two_s, 1.0).unwrap();
        let n = n_sites as f64;
        let s = sys.spin();
        for theta in [0.0, 0.6, 1.3, 2.2, PI] {
            for phi in [0.0, 1.1, 2.5, 3.9, 5.6] {
                for chi in [0.0, 0.7, 1.6, 3.0, 5.9] {
                    let p = CoordinatePoint::new(theta, phi, chi).unwrap();
                    let psi = evolved_state(&sys, &p, None).unwrap().amplitudes;
                    let t = tangent_states(&sys, &p, None).unwrap();
                    let (m, q) = moments(s, theta);
                    let (sin, cos) = theta.sin_cos();
                    let i = C64::i();
                    let pairs = n * (n - 1.0);

                    approx(psi.dotc(&t.d_theta), C64::new(0.0, 0.0), "<psi|theta>");
                    approx(psi.dotc(&t.d_phi), -i * n * m, "<psi|phi>");
                    approx(psi.dotc(&t.d_chi), -i * pairs * m * m, "<psi|chi>");

                    approx(t.d_theta.dotc(&t.d_theta), (n * s / 2.0).into(), "<theta|theta>");
                    approx(t.d_theta.dotc(&t.d_phi), i * n * s / 2.0 * sin, "<theta|phi>");
                    approx(t.d_theta.dotc(&t.d_chi), i * pairs * s * s * sin * cos, "<theta|chi>");
                    approx(t.d_phi.dotc(&t.d_phi), (n * q + pairs * m * m).into(), "<phi|phi>");
                    let phi_chi = pairs * (n - 2.0) * m.powi(3) + 2.0 * pairs * q * m;
                    approx(t.d_phi.dotc(&t.d_chi), phi_chi.into(), "<phi|chi>");
                    let chi_chi = 2.0 * pairs * q * q
                        + 4.0 * pairs * (n - 2.0) * q * m * m
                        + pairs * (n - 2.0) * (n - 3.0) * m.powi(4);
                    approx(t.d_chi.dotc(&t.d_chi), chi_chi.into(), "<chi|chi>");

                    // the variance form is the closed-form metric
                    let g = metric_closed_form(&sys, theta).unwrap();
                    let variance = chi_chi - (pairs * m * m).powi(2);
                    assert!((variance - g.g_chi_chi()).abs() < 1e-10);
                }
            }
        }
    }
}

/// `e^{A}` by scaling and squaring a Taylor series.
fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = norm.log2().ceil().max(0.0) as u32 + 1;
    let scaled = a / C64::new(2f64.powi(squarings as i32), 0.0);
    let dim = a.nrows();
    let mut term = DMatrix::<C64>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn rotation_conjugates_sz_into_sz_and_sx() {
    for (n, two_s) in [(3, 1), (2, 2)] {
        let sys = SpinSystem::new(n, two_s, 1.0).unwrap();
        let (sx, sy, sz) = build_spin_operators(two_s).unwrap();
        let dim = sys.dim();
        let mut total_y = DMatrix::<C64>::zeros(dim, dim);
        for site in 0..n {
            total_y += embed_site_operator(&sy, site, &sys).unwrap().matrix;
        }
        for theta in [0.3, 1.1, 2.4] {
            let forward = expm(&(&total_y * C64::new(0.0, theta)));
            let backward = expm(&(&total_y * C64::new(0.0, -theta)));
            for site in 0..n {
                let z = embed_site_operator(&sz, site, &sys).unwrap().matrix;
                let x = embed_site_operator(&sx, site, &sys).unwrap().matrix;
                let conjugated = &forward * &z * &backward;
                let expected = &z * C64::new(theta.cos(), 0.0) - &x * C64::new(theta.sin(), 0.0);
                let dev = (conjugated - expected).iter().map(|c| c.norm()).fold(0.0, f64::max);
                assert!(dev < 1e-10, "site {site}, theta {theta}: {dev}");
            }
        }
    }
}
