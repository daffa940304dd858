use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use mitm_core::cavity::{
    coupling_report, overlap_integral_1d, thermal_occupancy, CavitySpec, ForceSign, MechanicalMode, MembraneSpec,
    Placement,
};
use mitm_core::medium::Susceptibility;
use mitm_core::units::{BOLTZMANN, HBAR};

const LAMBDA: f64 = 1550e-9;

fn cavity(length_in_wavelengths: f64) -> CavitySpec {
    CavitySpec::new(LAMBDA, length_in_wavelengths * LAMBDA, 2e7).unwrap()
}

fn membrane(s2: f64) -> MembraneSpec {
    MembraneSpec {
        thickness: 100e-9,
        placement: Placement::Sin2(s2),
        diameter: 10e-6,
        mass_density: 2700.0,
        tensile_stress: 0.9e9,
        host_eps: Complex64::new(4.0, 0.0),
        mech_quality: 4e6,
        overlap_factor: 0.92,
    }
}

fn mode() -> MechanicalMode {
    MechanicalMode::with_frequency(&membrane(0.5), 2.0 * PI * 40.8e6).unwrap()
}

fn chi(re: f64, im: f64) -> Susceptibility {
    Susceptibility::from_parts(re, im).unwrap()
}

#[test]
fn thin_membrane_ratio_at_design_point() {
    let k = 2.0 * PI / LAMBDA;
    let l = 0.4054 / k;
    let z0 = (PI / 4.0) / k;
    let o = overlap_integral_1d(z0, l, k).unwrap();
    assert!((o.energy_ratio() - 1.0).abs() < 0.02, "{}", o.energy_ratio());
}

#[test]
fn thin_membrane_error_scales_quadratically() {
    // sin² = 0.25; at sin² = 0.5 the leading error cancels identically.
    let k = 2.0 * PI / LAMBDA;
    let z0 = (PI / 6.0) / k;
    let kls = [0.4, 0.04, 0.004, 0.0004];
    let errs: Vec<f64> = kls.iter().map(|kl| overlap_integral_1d(z0, kl / k, k).unwrap().energy_rel_error()).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 100.0).abs() < 2.0, "decade ratio {ratio}, errors {errs:?}");
    }
    assert!(errs[3] < 1e-7);
}

#[test]
fn cdr_factorises_through_host_coupling() {
    let c = cavity(100.0);
    let x = chi(1181.45, -0.70);
    let r = coupling_report(&c, &membrane(0.5), &mode(), x, 10.0, Some(30.0)).unwrap();
    let kappa_eff = r.kappa / 30.0;
    let via_host = r.kappa * x.re() / (kappa_eff * 3.0) * (r.g_om_h / r.kappa);
    assert!((r.g_om_p / kappa_eff - via_host).abs() / via_host < 1e-10);
    assert!((r.g_om_p / r.g_om_h - x.re() / 3.0).abs() < 1e-12 * x.re());
}

#[test]
fn host_coupling_scales_inversely_with_length() {
    let a = coupling_report(&cavity(100.0), &membrane(0.5), &mode(), chi(10.0, 0.0), 10.0, Some(30.0)).unwrap();
    let b = coupling_report(&cavity(200.0), &membrane(0.5), &mode(), chi(10.0, 0.0), 10.0, Some(30.0)).unwrap();
    assert!((a.g_om_h / b.g_om_h - 2.0).abs() < 1e-12);
}

#[test]
fn force_sign_flips_across_host_cancellation() {
    let m = membrane(0.5);
    let eps_minus_one = m.host_eps.re - 1.0;
    let below = coupling_report(&cavity(100.0), &m, &mode(), chi(-eps_minus_one - 1e-3, 0.0), 10.0, Some(30.0)).unwrap();
    let above = coupling_report(&cavity(100.0), &m, &mode(), chi(-eps_minus_one + 1e-3, 0.0), 10.0, Some(30.0)).unwrap();
    assert_eq!(below.force_sign, ForceSign::Repulsive);
    assert_eq!(above.force_sign, ForceSign::Attractive);
}

#[test]
fn gain_narrows_the_physical_linewidth() {
    let c = cavity(100.0);
    let lossy = coupling_report(&c, &membrane(0.5), &mode(), chi(10.0, 1e-6), 10.0, None).unwrap();
    let gain = coupling_report(&c, &membrane(0.5), &mode(), chi(10.0, -1e-6), 10.0, None).unwrap();
    assert!(gain.kappa_eff < c.kappa() && c.kappa() < lossy.kappa_eff);
}

#[test]
fn occupancy_is_monotone_and_classical_when_hot() {
    let omega = 2.0 * PI * 40.8e6;
    let mut last = 0.0;
    for t in [0.01, 0.1, 1.0, 10.0, 100.0, 300.0] {
        let n = thermal_occupancy(omega, t);
        assert!(n > last);
        last = n;
        if n > 50.0 {
            let classical = BOLTZMANN * t / (HBAR * omega);
            assert!((classical - n).abs() / n < 0.01);
        }
    }
}

proptest! {
    #[test]
    fn thin_membrane_error_bound(kl in 1e-4f64..0.5, s2 in 0.25f64..0.75) {
        let k = 2.0 * PI / LAMBDA;
        let z0 = s2.sqrt().asin() / k;
        let o = overlap_integral_1d(z0, kl / k, k).unwrap();
        prop_assert!(o.energy_rel_error() <= kl * kl / 4.0);
    }

    #[test]
    fn cdr_sign_follows_coupling_sign(re in -50.0f64..50.0, s2 in 0.05f64..0.95) {
        let r = coupling_report(&cavity(100.0), &membrane(s2), &mode(), chi(re, 0.0), 10.0, Some(30.0)).unwrap();
        let expected = if re + 3.0 > 0.0 { ForceSign::Attractive } else if re + 3.0 < 0.0 { ForceSign::Repulsive } else { ForceSign::Null };
        prop_assert_eq!(r.force_sign, expected);
        prop_assert_eq!(r.cdr.signum(), r.g_om.signum());
    }
}
