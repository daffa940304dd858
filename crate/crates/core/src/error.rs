use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("closed-form susceptibility requires gamma1 == gamma2 (got {gamma1} and {gamma2}); use the master-equation engine")]
    UnequalDecayRates { gamma1: f64, gamma2: f64 },

    #[error("closed-form susceptibility denominator vanishes (|den| = {magnitude:e}, scale^3 = {scale_cubed:e})")]
    Pole { magnitude: f64, scale_cubed: f64 },

    #[error("near-dipole-dipole transform pole: chi_p = {chi_p} puts |1 - chi_p/3| = {distance:e} at or below 1e-9")]
    NddPole { chi_p: Complex64, distance: f64 },

    #[error("steady state is degenerate: {null_dim} singular values below the relative threshold")]
    DegenerateSteadyState { null_dim: usize },

    #[error("steady-state residual {residual:e} exceeds 1e-10 x ||L|| = {bound:e}")]
    NoConvergence { residual: f64, bound: f64 },

    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),

    #[error("time step {dt:e} s exceeds 0.01 / max rate = {limit:e} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("effective decay rate kappa' = {kappa_eff:e} rad/s is not positive (gain exceeds total loss)")]
    LasingThreshold { kappa_eff: f64 },

    #[error("membrane too thick for the thin-slab expansion: k*l = {kl} >= 1")]
    ThinMembraneViolation { kl: f64 },

    #[error("grid has {points} points, limit is {limit}")]
    GridTooLarge { points: u64, limit: u64 },

    #[error("no feasible point satisfies the gain and pole-margin constraints")]
    NoFeasiblePoint,

    #[error("config: {0}")]
    Config(String),
}
