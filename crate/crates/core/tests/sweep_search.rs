use std::f64::consts::PI;

use proptest::prelude::*;

use mitm_core::config::{Rate, RateUnit, RunConfig};
use mitm_core::medium::{ndd_pole_distance, NDD_POLE_TOLERANCE};
use mitm_core::presets;
use mitm_core::sweep::{find_spsc_region, gain_boundary, optimize_cdr, sweep, SweepRecord, SweepSpec};

fn max_abs_re(records: &[SweepRecord]) -> f64 {
    records.iter().filter_map(|r| r.chi_ndd).map(|c| c.re().abs()).fold(0.0, f64::max)
}

#[test]
fn fig2a_shows_enhancement_with_gain() {
    let recs = sweep(&presets::fig2a()).unwrap();
    assert_eq!(recs.len(), 2001);
    let hits: Vec<f64> = recs
        .iter()
        .filter(|r| matches!(r.chi_ndd, Some(c) if c.re() > 1e3 && c.im() <= 0.0))
        .map(|r| r.coords[0])
        .collect();
    assert!(!hits.is_empty());
    assert!(hits.iter().all(|dp| (dp - 0.3).abs() < 0.05), "{hits:?}");
}

#[test]
fn weak_microwave_kills_the_enhancement() {
    let strong = max_abs_re(&sweep(&presets::fig2a()).unwrap());
    let weak = max_abs_re(&sweep(&presets::fig2b()).unwrap());
    assert!(strong >= 10.0 * weak, "{strong} vs {weak}");
}

#[test]
fn fig3_boundary_points_sit_on_zero_gain() {
    let spec = presets::fig3();
    let recs = sweep(&spec).unwrap();
    let boundary = gain_boundary(&spec, &recs).unwrap();
    assert!(!boundary.is_empty());
    for p in &boundary {
        let again = spec.evaluate_at(p.coords.clone()).unwrap();
        assert!(again.chi_ndd.unwrap().im().abs() < 1e-6, "{:?}", p);
    }
}

#[test]
fn fig4_region_brackets_the_quoted_density_window() {
    let recs = sweep(&presets::fig4()).unwrap();
    let region = find_spsc_region(&recs, 1.0);
    assert!(region.count > 0);
    let (lo, hi) = region.bounding_box[0];
    assert!(lo >= 1.55 && hi <= 1.65, "{lo}..{hi}");
    assert!(lo < 1.625 && hi > 1.583);
}

#[test]
fn region_members_survive_grid_refinement() {
    let coarse = presets::fig4();
    let mut fine = coarse.clone();
    for a in &mut fine.axes {
        a.points = 2 * a.points - 1;
    }
    let coarse_recs = sweep(&coarse).unwrap();
    let fine_recs = sweep(&fine).unwrap();
    let region = find_spsc_region(&coarse_recs, 1.0);
    let fine_region = find_spsc_region(&fine_recs, 1.0);
    let n2 = fine.axes[1].points;
    let n2_coarse = coarse.axes[1].points;
    for &m in &region.members {
        let (i, j) = (m / n2_coarse, m % n2_coarse);
        let fine_idx = 2 * i * n2 + 2 * j;
        assert_eq!(fine_recs[fine_idx].coords, coarse_recs[m].coords);
        assert!(fine_region.members.binary_search(&fine_idx).is_ok());
    }
}

#[test]
fn sign_switch_is_binary_and_tracks_real_part() {
    let recs = sweep(&presets::fig4()).unwrap();
    for r in &recs {
        let (Some(arg), Some(chi)) = (r.cdr_argument(), r.chi_ndd) else { continue };
        assert!(arg.abs() < 1e-9 || (arg - PI).abs() < 1e-9);
        assert_eq!(arg > 1.0, chi.re() < 0.0);
    }
}

#[test]
fn pole_flags_are_within_tolerance() {
    for spec in [presets::fig2a(), presets::fig3()] {
        for r in sweep(&spec).unwrap() {
            if r.flags.pole {
                assert!(r.chi_ndd.is_none());
                assert!(ndd_pole_distance(r.chi_p.unwrap()) <= NDD_POLE_TOLERANCE);
            }
        }
    }
}

#[test]
fn evaluation_order_does_not_matter() {
    let spec = presets::fig3();
    let forward = sweep(&spec).unwrap();
    let n = forward.len();
    let mut backward: Vec<_> = (0..n).rev().map(|i| spec.evaluate_at(spec.coords_at(i)).unwrap()).collect();
    backward.reverse();
    assert_eq!(forward, backward);
}

#[test]
fn fig3_optimum_reaches_strong_coupling_with_gain() {
    let spec = presets::fig3_bounds();
    let a = optimize_cdr(&spec).unwrap();
    assert!(a.value >= 1.0, "{}", a.value);
    assert!(a.chi_ndd.im() <= 0.0 && a.gain_slack >= 0.0);
    assert!(ndd_pole_distance(a.chi_p) >= spec.pole_margin);
    assert_eq!(a, optimize_cdr(&spec).unwrap());
}

#[test]
fn custom_axis_matches_preset() {
    let cfg = RunConfig::parse(
        "model.engine = closed\ndopant.s0 = 1.8072289156626506\nsweep.axis1 = delta_p_gamma, -2, 2, 2001\n",
    )
    .unwrap();
    let spec: SweepSpec = cfg.sweep_spec().unwrap();
    assert_eq!(sweep(&spec).unwrap(), sweep(&presets::fig2a()).unwrap());
}

fn rate() -> impl Strategy<Value = Rate> {
    (-1e7f64..1e7, prop::bool::ANY).prop_map(|(value, hz)| Rate { value, unit: if hz { RateUnit::Hz } else { RateUnit::Gamma } })
}

proptest! {
    #[test]
    fn config_round_trips(
        gamma_hz in 1.0f64..1e9,
        dp in rate(),
        dm in rate(),
        s0 in prop::option::of(0.0f64..10.0),
        q in 1e3f64..1e9,
        t in 0.0f64..400.0,
        factor in 1e-6f64..1.0,
    ) {
        let mut c = RunConfig { gamma_hz, delta_p: dp, delta_mu: dm, s0, temperature_k: t, baseline_factor: factor, ..RunConfig::default() };
        c.cavity_quality_factor = Some(q);
        let back = RunConfig::parse(&c.to_text()).unwrap();
        prop_assert_eq!(back, c);
    }
}
