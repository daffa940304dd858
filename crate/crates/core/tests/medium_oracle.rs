use num_complex::Complex64;
use proptest::prelude::*;

use mitm_core::medium::{chi_p_closed, ndd_inverse, ndd_transform, ClosedForm, LambdaDriveParams, Susceptibility};
use mitm_core::oracle::{build_liouvillian, build_liouvillian_with_dephasing, chi_p_numeric, steady_state, DensityMatrix, OracleOptions};

// Reference values from a separate 40-digit solver that applies the master
// equation to basis matrices directly (no vectorisation identities).
const GENERIC_ORACLE: (f64, f64) = (0.039887698150697763, 0.40052712914673923);
const FIG2A_POINT_ORACLE: (f64, f64) = (0.11885837673458634, 0.55429871356849188);
const ASYMMETRIC_DEPHASED_ORACLE: (f64, f64) = (0.06641538822120702, 0.22184229445434783);

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn drive() -> impl Strategy<Value = LambdaDriveParams> {
    (0.01f64..2.0, 0.05f64..2.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(r, om, dp, dm)| LambdaDriveParams::symmetric(1.0, r, om, 0.0, dp, dm))
}

#[test]
fn generic_point_matches_reference_solver() {
    let p = LambdaDriveParams::symmetric(1.0, 0.2, 0.5, 0.0, 0.1, 0.3);
    let chi = chi_p_numeric(&p, 1.0, &OracleOptions::default()).unwrap().chi.value();
    assert!(rel(chi, Complex64::new(GENERIC_ORACLE.0, GENERIC_ORACLE.1)) < 1e-9, "{chi}");
}

#[test]
fn fig2a_point_matches_reference_solver() {
    let p = LambdaDriveParams::symmetric(1.0, 0.1, 1.0, 0.0, 0.30285, 0.4);
    let chi = chi_p_numeric(&p, 3.0 / 1.66, &OracleOptions::default()).unwrap().chi.value();
    assert!(rel(chi, Complex64::new(FIG2A_POINT_ORACLE.0, FIG2A_POINT_ORACLE.1)) < 1e-9, "{chi}");
}

#[test]
fn unequal_decays_with_dephasing_match_reference_solver() {
    let p = LambdaDriveParams { gamma1: 0.7, gamma2: 1.3, pump_r: 0.3, omega_mu: 0.8, omega_p: 0.0, delta_p: -0.4, delta_mu: 0.2 };
    let opts = OracleOptions { dephasing_2: 0.05, ..OracleOptions::default() };
    let chi = chi_p_numeric(&p, 1.0, &opts).unwrap().chi.value();
    let want = Complex64::new(ASYMMETRIC_DEPHASED_ORACLE.0, ASYMMETRIC_DEPHASED_ORACLE.1);
    assert!(rel(chi, want) < 1e-9, "{chi}");
}

#[test]
fn two_level_limit_is_an_absorption_line() {
    // Ω_μ = 0 parks everything in |2⟩; the probe sees a bare two-level line
    // of half-width (γ₁+γ₂)/2.
    let lorentz = |dp: f64| Complex64::i() / (Complex64::new(1.0, -dp));
    let mut peak = (f64::NEG_INFINITY, 0.0);
    for i in -20..=20 {
        let dp = i as f64 * 0.1;
        let p = LambdaDriveParams::symmetric(1.0, 0.1, 0.0, 0.0, dp, 0.4);
        let chi = chi_p_numeric(&p, 1.0, &OracleOptions::default()).unwrap().chi.value();
        assert!(rel(chi, lorentz(dp)) < 1e-6, "dp = {dp}: {chi}");
        assert!(chi.im > 0.0);
        if chi.im > peak.0 {
            peak = (chi.im, dp);
        }
    }
    assert_eq!(peak.1, 0.0);
}

#[test]
fn closed_form_does_not_depend_on_probe() {
    for form in ClosedForm::ALL {
        let mut p = LambdaDriveParams::symmetric(1.0, 0.2, 0.5, 0.0, 0.1, 0.3);
        let a = chi_p_closed(&p, 1.0, form).unwrap();
        p.omega_p = 0.1;
        assert_eq!(a, chi_p_closed(&p, 1.0, form).unwrap());
    }
}

#[test]
fn dark_state_is_exact() {
    let p = LambdaDriveParams::symmetric(1.0, 0.3, 0.0, 0.0, 0.2, 0.1);
    let rho = steady_state(&build_liouvillian(&p)).unwrap();
    assert_eq!(*rho.matrix(), *DensityMatrix::pure_level(2).matrix());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_is_linear_in_s0(p in drive(), s0 in 0.01f64..5.0, a in 0.1f64..10.0) {
        for form in ClosedForm::ALL {
            let one = chi_p_closed(&p, s0, form).unwrap().value();
            let scaled = chi_p_closed(&p, a * s0, form).unwrap().value();
            prop_assert!(rel(scaled, one * a) < 1e-12);
        }
    }

    #[test]
    fn oracle_is_linear_in_s0(p in drive(), a in 0.1f64..10.0) {
        let opts = OracleOptions::default();
        let one = chi_p_numeric(&p, 1.0, &opts).unwrap().chi.value();
        let scaled = chi_p_numeric(&p, a, &opts).unwrap().chi.value();
        prop_assert!(rel(scaled, one * a) < 1e-12);
    }

    #[test]
    fn ndd_inverse_recovers_input(re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let chi = Susceptibility::from_parts(re, im).unwrap();
        prop_assume!((Complex64::new(1.0, 0.0) - chi.value() / 3.0).norm() > 1e-3);
        let back = ndd_inverse(ndd_transform(chi).unwrap()).unwrap();
        prop_assert!((back.value() - chi.value()).norm() <= 1e-10 * chi.value().norm().max(1e-300));
    }

    #[test]
    fn ndd_enhances_between_zero_and_pole(re in 1e-6f64..2.999, im in -1e-3f64..1e-3) {
        let chi = Susceptibility::from_parts(re, im).unwrap();
        prop_assert!(ndd_transform(chi).unwrap().value().norm() >= chi.value().norm());
    }

    #[test]
    fn steady_state_is_a_density_matrix(p in drive(), gd in 0.0f64..0.5) {
        let l = build_liouvillian_with_dephasing(&p, gd);
        let rho = steady_state(&l).unwrap();
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-10);
        let residual = l.apply(&rho).norm();
        prop_assert!(residual < 1e-10 * l.norm());
        prop_assert_eq!(l.null_dimension(), 1);
    }
}
