//! Brute-force steady state of the driven Λ-system master equation.
//!
//! ρ̇ = −i[H, ρ] + Σ_k γ̃_k (Â_k ρ Â_k† − ½{Â_k†Â_k, ρ})
//!
//! with collapse operators σ₁₃ (rate γ₁), σ₂₃ (γ₂), σ₃₁ (pump r) and an
//! optional pure dephasing σ₂₂ of the ground state |2⟩. ħ = 1 throughout.
//!
//! Vectorization is column stacking: `vec(ρ)[i + 3j] = ρ[i][j]`, so
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use std::fmt::Write as _;

use nalgebra::{Matrix3, SMatrix, SVector, Schur};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::medium::{LambdaDriveParams, Susceptibility};

pub type Matrix9 = SMatrix<Complex64, 9, 9>;
pub type Vector9 = SVector<Complex64, 9>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Singular values below this fraction of the largest count as null.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;
/// Steady-state residual bound relative to the Frobenius norm of L.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Default probe Rabi frequency, in units of γ.
pub const DEFAULT_PROBE_RATIO: f64 = 1e-4;
/// Relative difference between Ω_p and Ω_p/10 that flags a nonlinear probe.
pub const LINEARITY_TOLERANCE: f64 = 1e-3;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-10;

fn max_modulus<const R: usize, const C: usize>(m: &SMatrix<Complex64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// 3×3 density matrix in the basis (|1⟩, |2⟩, |3⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix3<Complex64>);

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix3<Complex64>) -> Result<Self> {
        let herm = max_modulus(&(m - m.adjoint()));
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let rho = Self(m);
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// |k⟩⟨k| with `level` ∈ {1, 2, 3}.
    pub fn pure_level(level: usize) -> Self {
        assert!((1..=3).contains(&level), "level must be 1, 2 or 3");
        let mut m = Matrix3::zeros();
        m[(level - 1, level - 1)] = ONE;
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.0
    }

    /// ρ_ij = ⟨i|ρ|j⟩ with 1-based level labels.
    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_modulus(&(self.0 - self.0.adjoint()))
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        let herm = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let ev = herm.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn to_vec(&self) -> Vector9 {
        let mut v = Vector9::zeros();
        for j in 0..3 {
            for i in 0..3 {
                v[i + 3 * j] = self.0[(i, j)];
            }
        }
        v
    }

    fn from_vec_unchecked(v: &Vector9) -> Matrix3<Complex64> {
        Matrix3::from_fn(|i, j| v[i + 3 * j])
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_modulus(&(self.0 - other.0))
    }
}

/// 9×9 Liouvillian superoperator acting on column-stacked ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian(Matrix9);

impl Liouvillian {
    pub fn matrix(&self) -> &Matrix9 {
        &self.0
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Vector9 {
        self.0 * rho.to_vec()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> [f64; 9] {
        let sv = self.0.singular_values();
        let mut out = [0.0; 9];
        for (o, s) in out.iter_mut().zip(sv.iter()) {
            *o = *s;
        }
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// Eigenvalues from the complex Schur form.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let (_, t) = Schur::new(self.0).unpack();
        (0..9).map(|k| t[(k, k)]).collect()
    }

    /// Number of singular values below the relative degeneracy threshold.
    pub fn null_dimension(&self) -> usize {
        let sv = self.singular_values();
        let cutoff = DEGENERACY_THRESHOLD * sv[0];
        sv.iter().filter(|&&s| s <= cutoff).count()
    }

    /// `(vec I)† L`, which vanishes for a trace-preserving generator.
    pub fn trace_row(&self) -> SMatrix<Complex64, 1, 9> {
        let mut row = SMatrix::<Complex64, 1, 9>::zeros();
        for k in [0, 4, 8] {
            row += self.0.row(k);
        }
        row
    }
}

/// H = −Δ_p σ₂₂ − (Δ_p + Δ_μ) σ₁₁ + Ω_p(σ₃₂ + σ₂₃) + Ω_μ(σ₂₁ + σ₁₂)
pub fn build_hamiltonian(params: &LambdaDriveParams) -> Matrix3<Complex64> {
    let mut h = Matrix3::zeros();
    h[(0, 0)] = Complex64::from(-(params.delta_p + params.delta_mu));
    h[(1, 1)] = Complex64::from(-params.delta_p);
    h[(0, 1)] = Complex64::from(params.omega_mu);
    h[(1, 0)] = Complex64::from(params.omega_mu);
    h[(1, 2)] = Complex64::from(params.omega_p);
    h[(2, 1)] = Complex64::from(params.omega_p);
    h
}

fn sigma(i: usize, j: usize) -> Matrix3<Complex64> {
    let mut m = Matrix3::zeros();
    m[(i - 1, j - 1)] = ONE;
    m
}

/// Kronecker product of two 3×3 matrices.
fn kron3(a: &Matrix3<Complex64>, b: &Matrix3<Complex64>) -> Matrix9 {
    Matrix9::from_fn(|r, c| a[(r / 3, c / 3)] * b[(r % 3, c % 3)])
}

fn add_dissipator(l: &mut Matrix9, op: &Matrix3<Complex64>, rate: f64) {
    if rate == 0.0 {
        return;
    }
    let id = Matrix3::<Complex64>::identity();
    let ada = op.adjoint() * op;
    let rate = Complex64::from(rate);
    let half = Complex64::from(0.5);
    // vec(AρA†) = (A* ⊗ A) vec ρ
    *l += (kron3(&op.conjugate(), op) - (kron3(&id, &ada) + kron3(&ada.transpose(), &id)) * half) * rate;
}

/// Liouvillian of the Λ system without extra dephasing.
pub fn build_liouvillian(params: &LambdaDriveParams) -> Liouvillian {
    build_liouvillian_with_dephasing(params, 0.0)
}

/// Liouvillian with an additional pure-dephasing channel σ₂₂ at rate
/// `dephasing_2`.
pub fn build_liouvillian_with_dephasing(params: &LambdaDriveParams, dephasing_2: f64) -> Liouvillian {
    let h = build_hamiltonian(params);
    let id = Matrix3::<Complex64>::identity();
    let mut l = (kron3(&id, &h) - kron3(&h.transpose(), &id)) * (-I);
    add_dissipator(&mut l, &sigma(1, 3), params.gamma1);
    add_dissipator(&mut l, &sigma(2, 3), params.gamma2);
    add_dissipator(&mut l, &sigma(3, 1), params.pump_r);
    add_dissipator(&mut l, &sigma(2, 2), dephasing_2);
    Liouvillian(l)
}

/// Solves Lρ = 0 with Tr ρ = 1 by replacing the ρ₁₁ row with the trace
/// constraint.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let null_dim = l.null_dimension();
    if null_dim > 1 {
        return Err(Error::DegenerateSteadyState { null_dim });
    }
    let mut a = l.0;
    let mut b = Vector9::zeros();
    for c in 0..9 {
        a[(0, c)] = ZERO;
    }
    for k in [0, 4, 8] {
        a[(0, k)] = ONE;
    }
    b[0] = ONE;
    let x = a
        .lu()
        .solve(&b)
        .ok_or(Error::NoConvergence { residual: f64::INFINITY, bound: RESIDUAL_TOLERANCE * l.norm() })?;

    let m = DensityMatrix::from_vec_unchecked(&x);
    let m = (m + m.adjoint()) * Complex64::from(0.5);
    let rho = DensityMatrix::new(m)?;
    let residual = l.apply(&rho).norm();
    let bound = RESIDUAL_TOLERANCE * l.norm();
    if residual >= bound {
        return Err(Error::NoConvergence { residual, bound });
    }
    Ok(rho)
}

/// Fixed-step classical Runge-Kutta integration of ρ̇ = Lρ.
///
/// The step is shrunk so that an integer number of steps lands on `t_final`.
pub fn time_evolve(rho0: &DensityMatrix, params: &LambdaDriveParams, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    params.validate()?;
    let limit = 0.01 / params.max_rate();
    if !(dt > 0.0) || dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    if t_final == 0.0 {
        return Ok(*rho0);
    }
    if !(t_final > 0.0) {
        return Err(Error::InvalidParameter { name: "t_final", reason: format!("must be >= 0, got {t_final}") });
    }
    let l = build_liouvillian(params).0;
    let steps = (t_final / dt).ceil() as u64;
    let h = t_final / steps as f64;
    let hc = Complex64::from(h);
    let mut v = rho0.to_vec();
    for _ in 0..steps {
        let k1 = l * v;
        let k2 = l * (v + k1 * (hc * 0.5));
        let k3 = l * (v + k2 * (hc * 0.5));
        let k4 = l * (v + k3 * hc);
        let two = Complex64::from(2.0);
        v += (k1 + k2 * two + k3 * two + k4) * (hc / 6.0);
    }
    let m = DensityMatrix::from_vec_unchecked(&v);
    DensityMatrix::new((m + m.adjoint()) * Complex64::from(0.5))
}

/// Knobs for the numerical susceptibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOptions {
    /// Probe Rabi frequency in units of γ, used when `omega_p` in the drive
    /// parameters is zero.
    pub probe_ratio: f64,
    /// Pure dephasing rate of |2⟩ (same unit as the drive parameters).
    pub dephasing_2: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { probe_ratio: DEFAULT_PROBE_RATIO, dephasing_2: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericChi {
    pub chi: Susceptibility,
    pub omega_p: f64,
    /// Relative difference to the value obtained at Ω_p/10.
    pub linearity_rel_diff: f64,
    pub nonlinear: bool,
}

fn chi_at_probe(params: &LambdaDriveParams, s0: f64, omega_p: f64, dephasing_2: f64) -> Result<Complex64> {
    let mut p = *params;
    p.omega_p = omega_p;
    let rho = steady_state(&build_liouvillian_with_dephasing(&p, dephasing_2))?;
    Ok(rho.element(2, 3) * (s0 * params.gamma_ref() / omega_p))
}

/// χ_p = s₀γρ₂₃/Ω_p from the steady state.
///
/// ρ₂₃ (not ρ₃₂) is the element that makes a two-level absorber come out
/// with Im χ > 0 in this Hamiltonian's frame.
pub fn chi_p_numeric(params: &LambdaDriveParams, s0: f64, opts: &OracleOptions) -> Result<NumericChi> {
    params.validate()?;
    let omega_p = if params.omega_p > 0.0 { params.omega_p } else { opts.probe_ratio * params.gamma_ref() };
    if !(omega_p > 0.0) {
        return Err(Error::InvalidParameter { name: "omega_p", reason: "probe amplitude must be > 0".into() });
    }
    let chi = chi_at_probe(params, s0, omega_p, opts.dephasing_2)?;
    let weaker = chi_at_probe(params, s0, omega_p / 10.0, opts.dephasing_2)?;
    let linearity_rel_diff = if chi == ZERO && weaker == ZERO { 0.0 } else { (chi - weaker).norm() / weaker.norm() };
    Ok(NumericChi {
        chi: Susceptibility::new(chi)?,
        omega_p,
        linearity_rel_diff,
        nonlinear: linearity_rel_diff > LINEARITY_TOLERANCE,
    })
}

fn fmt_complex(out: &mut String, z: Complex64) {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    let _ = write!(out, "{:e}{}{:e}j", z.re, sign, z.im.abs());
}

/// Row-major, tab-separated, `re+imj` fields.
pub fn format_matrix<const R: usize, const C: usize>(m: &SMatrix<Complex64, R, C>) -> String {
    let mut out = String::new();
    for r in 0..R {
        for c in 0..C {
            if c > 0 {
                out.push('\t');
            }
            fmt_complex(&mut out, m[(r, c)]);
        }
        out.push('\n');
    }
    out
}
