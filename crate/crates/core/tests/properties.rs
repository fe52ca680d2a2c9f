use num_complex::Complex64;
use proptest::prelude::*;
use tavis::analytic::{sz_nonresonant, sz_resonant, u_resonant, v_resonant, weierstrass_coeffs_nonresonant, ResonantSolutionParams};
use tavis::chaos::{propagator_matrix, SmallDssParams};
use tavis::quantum::{amplitudes_adiabatic, density_weak, purity, reduced_density, QuantumAmplitudes};
use tavis::scenario::validate_config;
use tavis::semiclassical::ModelParams;
use tavis::specfun::{jacobi_elliptic, weierstrass_p, WeierstrassCoeffs};

proptest! {
    #[test]
    fn jacobi_identities(u in -50.0f64..50.0, k in 0.0f64..0.9999) {
        let t = jacobi_elliptic(u, k).unwrap();
        prop_assert!((t.sn * t.sn + t.cn * t.cn - 1.0).abs() < 1e-12);
        prop_assert!((t.dn * t.dn + k * k * t.sn * t.sn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weierstrass_solves_its_ode(a in 0.2f64..3.0, b in 0.1f64..2.0, z in 0.05f64..0.4) {
        // Roots e₁ > e₂ > e₃ with zero sum.
        let (e1, e2) = (a + b, a);
        let e3 = -(e1 + e2);
        let g2 = -4.0 * (e1 * e2 + e2 * e3 + e3 * e1);
        let g3 = 4.0 * e1 * e2 * e3;
        let c = WeierstrassCoeffs::from_invariants(g2, g3).unwrap();
        let h = 1e-5;
        let w = weierstrass_p(z, &c).unwrap();
        let d = (weierstrass_p(z + h, &c).unwrap() - weierstrass_p(z - h, &c).unwrap()) / (2.0 * h);
        let rhs = 4.0 * w * w * w - g2 * w - g3;
        prop_assert!((d * d - rhs).abs() < 1e-6 * rhs.abs().max(1.0));
    }

    #[test]
    fn resonant_radius_identity(kappa in 0.05f64..4.0, c in 0.2f64..1.0, tau in 0.0f64..5.0) {
        let r0 = 4.0;
        let stark = 2.0 * kappa * c * r0;
        let rp = ResonantSolutionParams::new(c, r0, stark).unwrap();
        let (sz, u, v) = (sz_resonant(tau, &rp), u_resonant(tau, &rp), v_resonant(tau, &rp));
        // u² + v² + 16N s_z² = 16N with 16N = R₀².
        prop_assert!((u * u + v * v + r0 * r0 * sz * sz - r0 * r0).abs() < 1e-10 * r0 * r0);
        prop_assert!(sz.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn propagator_is_a_rotation(delta in -2.0f64..2.0, x in 0.0f64..1.5, tau in -20.0f64..20.0) {
        let sd = SmallDssParams::new(delta, 8.0, x, 0.3);
        let m = propagator_matrix(tau, &sd);
        prop_assert!((m * m.transpose() - nalgebra::Matrix3::identity()).abs().max() < 1e-12);
        prop_assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_density_matches_dense_trace(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 42)) {
        let mut a = QuantumAmplitudes::zeros(20);
        for (k, (re, im)) in raw.iter().enumerate() {
            let c = Complex64::new(*re, *im);
            if k < 21 { a.ce[k] = c } else { a.cg[k - 21] = c }
        }
        let norm = a.norm().sqrt();
        prop_assume!(norm > 1e-3);
        for c in a.ce.iter_mut().chain(a.cg.iter_mut()) {
            *c /= norm;
        }
        let r = reduced_density(&a);
        let m = [[Complex64::new(r.rho11, 0.0), r.rho12], [r.rho21(), Complex64::new(r.rho22, 0.0)]];
        let mut tr = Complex64::default();
        for i in 0..2 {
            for j in 0..2 {
                tr += m[i][j] * m[j][i];
            }
        }
        prop_assert!((purity(&r) - tr.re).abs() < 1e-14);
        prop_assert!((r.trace() - 1.0).abs() < 1e-12);
        prop_assert!(r.determinant() > -1e-12);
        prop_assert!(purity(&r) >= 0.5 - 1e-12 && purity(&r) <= 1.0 + 1e-12);
    }

    #[test]
    fn adiabatic_blocks_are_unitary(t in 0.0f64..50.0, n in 0usize..40, x in 0.0f64..3.2, dq in -1.0f64..1.0) {
        let p = ModelParams::new(0.0, 0.0, 0.7, 0.3, 1.0).with_delta_q(dq);
        let (ce0, cg0) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let (a, b) = amplitudes_adiabatic(t, n, x, &p, ce0, cg0);
        prop_assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_density_is_a_state(theta in 0.0f64..6.3, t in 0.0f64..200.0, n_bar in 0.0f64..5.0, r in 0.0f64..1.0) {
        let q = Complex64::from_polar(r, theta);
        let d = density_weak(t, q, n_bar, 0.2);
        prop_assert!((0.0..=1.0).contains(&d.rho11));
        prop_assert!(d.determinant() > -1e-9);
    }

    #[test]
    fn switching_stays_between_one_and_floor(ratio in 0.2f64..3.0, tau in 0.0f64..2.0) {
        let r0 = 20.0;
        let stark = 1e-3;
        let p = ModelParams::with_r0(0.0, ratio * r0 - stark / 2.0, 1.0, stark, r0);
        let sp = weierstrass_coeffs_nonresonant(&p, 0.0).unwrap();
        let s = sz_nonresonant(tau, &sp);
        prop_assert!(s <= 1.0 + 1e-12 && s >= sp.floor.min(1.0) - 1e-12);
    }

    #[test]
    fn unknown_param_keys_are_rejected(key in "[a-z]{3,8}") {
        let known = ["alpha", "delta", "zeta", "s", "n_bar", "g_detune", "delta_q"];
        prop_assume!(!known.contains(&key.as_str()));
        let raw = format!(r#"{{"scenario": "Custom", "params": {{"{key}": 1.0}}}}"#);
        prop_assert!(validate_config(&raw).is_err());
    }
}
