//! Cross-check of the closed-form χ_p variants against the master-equation
//! steady state on a seeded random grid.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::medium::{chi_p_closed, ClosedForm, LambdaDriveParams, Susceptibility};
use crate::oracle::{chi_p_numeric, OracleOptions};
use crate::sweep::Engine;

pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_SEED: u64 = 20_170_601;
/// Relative agreement required for the closed form to stand in for the oracle.
pub const MATCH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjudicationConfig {
    pub points: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub s0: f64,
}

impl Default for AdjudicationConfig {
    fn default() -> Self {
        Self { points: DEFAULT_POINTS, seed: DEFAULT_SEED, tolerance: MATCH_TOLERANCE, s0: 1.0 }
    }
}

/// Sample point, rates in units of γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplePoint {
    pub pump_r: f64,
    pub omega_mu: f64,
    pub delta_p: f64,
    pub delta_mu: f64,
}

impl SamplePoint {
    pub fn params(&self) -> LambdaDriveParams {
        LambdaDriveParams::symmetric(1.0, self.pump_r, self.omega_mu, 0.0, self.delta_p, self.delta_mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantSummary {
    pub variant: ClosedForm,
    pub max_rel_diff: f64,
    pub median_rel_diff: f64,
    pub mismatches: usize,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub point: SamplePoint,
    pub oracle: Susceptibility,
    pub printed: Option<Susceptibility>,
    pub mw_flipped: Option<Susceptibility>,
    pub rel_diff_printed: f64,
    pub rel_diff_mw_flipped: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjudicationReport {
    pub config: AdjudicationConfig,
    pub closed_form_agrees: bool,
    pub best_variant: ClosedForm,
    pub recommended_engine: Engine,
    pub variants: Vec<VariantSummary>,
    pub discrepancies: Vec<Discrepancy>,
}

/// Draws r ∈ [0.01, 2], Ω_μ ∈ [0.05, 2], Δ_p, Δ_μ ∈ [−2, 2] (units of γ).
pub fn sample_points(points: usize, seed: u64) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..points)
        .map(|_| SamplePoint {
            pump_r: rng.random_range(0.01..2.0),
            omega_mu: rng.random_range(0.05..2.0),
            delta_p: rng.random_range(-2.0..2.0),
            delta_mu: rng.random_range(-2.0..2.0),
        })
        .collect()
}

fn rel_diff(a: Option<Susceptibility>, reference: Susceptibility) -> f64 {
    match a {
        Some(a) => (a.value() - reference.value()).norm() / reference.value().norm().max(f64::MIN_POSITIVE),
        None => f64::INFINITY,
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn adjudicate(config: &AdjudicationConfig) -> Result<AdjudicationReport> {
    let opts = OracleOptions::default();
    let mut discrepancies = Vec::with_capacity(config.points);
    for point in sample_points(config.points, config.seed) {
        let p = point.params();
        let oracle = chi_p_numeric(&p, config.s0, &opts)?.chi;
        let printed = chi_p_closed(&p, config.s0, ClosedForm::Printed).ok();
        let mw_flipped = chi_p_closed(&p, config.s0, ClosedForm::MwFlipped).ok();
        discrepancies.push(Discrepancy {
            point,
            oracle,
            printed,
            mw_flipped,
            rel_diff_printed: rel_diff(printed, oracle),
            rel_diff_mw_flipped: rel_diff(mw_flipped, oracle),
        });
    }

    let variants: Vec<VariantSummary> = ClosedForm::ALL
        .iter()
        .map(|&variant| {
            let diffs: Vec<f64> = discrepancies
                .iter()
                .map(|d| match variant {
                    ClosedForm::Printed => d.rel_diff_printed,
                    ClosedForm::MwFlipped => d.rel_diff_mw_flipped,
                })
                .collect();
            let mismatches = diffs.iter().filter(|&&d| !(d <= config.tolerance)).count();
            VariantSummary {
                variant,
                max_rel_diff: diffs.iter().copied().fold(0.0, f64::max),
                median_rel_diff: median(diffs),
                mismatches,
                matches: mismatches == 0,
            }
        })
        .collect();

    let best = variants
        .iter()
        .min_by(|a, b| a.median_rel_diff.total_cmp(&b.median_rel_diff))
        .expect("at least one variant");
    let best_variant = best.variant;
    let closed_form_agrees = best.matches;
    let recommended_engine = if closed_form_agrees { Engine::Closed(best_variant) } else { Engine::Oracle };
    if closed_form_agrees {
        discrepancies.clear();
    } else {
        let tol = config.tolerance;
        discrepancies.retain(|d| !(d.rel_diff_printed <= tol && d.rel_diff_mw_flipped <= tol));
    }
    Ok(AdjudicationReport { config: *config, closed_form_agrees, best_variant, recommended_engine, variants, discrepancies })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_seeded() {
        assert_eq!(sample_points(5, 7), sample_points(5, 7));
        assert_ne!(sample_points(5, 7), sample_points(5, 8));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn small_run_produces_a_verdict() {
        let r = adjudicate(&AdjudicationConfig { points: 10, ..Default::default() }).unwrap();
        assert_eq!(r.variants.len(), 2);
        assert_eq!(r.closed_form_agrees, r.recommended_engine != Engine::Oracle);
    }
}
