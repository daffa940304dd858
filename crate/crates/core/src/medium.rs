//! Linear susceptibility of the doped Λ-type medium and its local-field
//! (near-dipole-dipole) enhancement.
//!
//! All rates live in one consistent angular-frequency unit (rad/s, or units
//! of γ when γ = 1). The susceptibility is dimensionless and only depends on
//! rate ratios.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Distance from the Lorentz-Lorenz pole below which the transform refuses
/// to evaluate.
pub const NDD_POLE_TOLERANCE: f64 = 1e-9;

/// Relative threshold on the closed-form denominator, measured against the
/// cube of the largest drive/rate magnitude.
pub const CLOSED_FORM_POLE_TOLERANCE: f64 = 1e-12;

/// Drives, detunings and rates of the three-level medium.
///
/// Basis order is (|1⟩, |2⟩, |3⟩): two ground states and one excited state.
/// The probe couples |2⟩↔|3⟩, the microwave |1⟩↔|2⟩ and the incoherent pump
/// moves population |1⟩→|3⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaDriveParams {
    /// Decay |3⟩→|1⟩.
    pub gamma1: f64,
    /// Decay |3⟩→|2⟩.
    pub gamma2: f64,
    /// Incoherent pump |1⟩→|3⟩.
    pub pump_r: f64,
    pub omega_mu: f64,
    pub omega_p: f64,
    pub delta_p: f64,
    pub delta_mu: f64,
}

impl LambdaDriveParams {
    /// Equal decay channels `gamma1 = gamma2 = gamma`.
    pub fn symmetric(
        gamma: f64,
        pump_r: f64,
        omega_mu: f64,
        omega_p: f64,
        delta_p: f64,
        delta_mu: f64,
    ) -> Self {
        Self { gamma1: gamma, gamma2: gamma, pump_r, omega_mu, omega_p, delta_p, delta_mu }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("pump_r", self.pump_r),
            ("omega_mu", self.omega_mu),
            ("omega_p", self.omega_p),
        ];
        for (name, v) in nonneg {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite and >= 0, got {v}") });
            }
        }
        for (name, v) in [("delta_p", self.delta_p), ("delta_mu", self.delta_mu)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite, got {v}") });
            }
        }
        Ok(())
    }

    /// Reference decay rate γ used to convert ρ₂₃ into a susceptibility.
    /// Equals γ when both channels are equal.
    pub fn gamma_ref(&self) -> f64 {
        0.5 * (self.gamma1 + self.gamma2)
    }

    /// Largest magnitude among {γ, r, Ω_μ, |Δ_p|, |Δ_μ|}.
    pub fn natural_scale(&self) -> f64 {
        [self.gamma_ref(), self.pump_r, self.omega_mu, self.delta_p.abs(), self.delta_mu.abs()]
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Largest rate or frequency entering the master equation.
    pub fn max_rate(&self) -> f64 {
        [
            self.gamma1,
            self.gamma2,
            self.pump_r,
            self.omega_mu,
            self.omega_p,
            self.delta_p.abs(),
            self.delta_mu.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Dopant ensemble and host properties that set the oscillator strength s₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DopantSpec {
    /// 1/m³
    pub number_density: f64,
    /// m, wavelength of the |2⟩↔|3⟩ transition
    pub transition_wavelength: f64,
    /// C·m
    pub dipole_moment: Option<f64>,
    pub host_eps_real: f64,
}

impl DopantSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.number_density >= 0.0) || !self.number_density.is_finite() {
            return Err(Error::InvalidParameter {
                name: "number_density",
                reason: format!("must be finite and >= 0, got {}", self.number_density),
            });
        }
        if !(self.transition_wavelength > 0.0) || !self.transition_wavelength.is_finite() {
            return Err(Error::InvalidParameter {
                name: "transition_wavelength",
                reason: format!("must be > 0, got {}", self.transition_wavelength),
            });
        }
        if !(self.host_eps_real >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "host_eps_real",
                reason: format!("must be >= 1, got {}", self.host_eps_real),
            });
        }
        if let Some(q) = self.dipole_moment {
            if !(q >= 0.0) {
                return Err(Error::InvalidParameter { name: "dipole_moment", reason: format!("must be >= 0, got {q}") });
            }
        }
        Ok(())
    }

    /// Number density that yields the requested s₀ (inverse of [`s0_from_density`]).
    pub fn density_for_s0(s0: f64, transition_wavelength: f64, host_eps_real: f64) -> f64 {
        s0 * 8.0 * PI * PI * host_eps_real.sqrt() / (3.0 * transition_wavelength.powi(3))
    }
}

/// Complex dimensionless electric susceptibility.
///
/// Sign convention: `Im χ > 0` is absorption, `Im χ < 0` is gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct Susceptibility(Complex64);

impl Susceptibility {
    pub const ZERO: Self = Self(Complex64::new(0.0, 0.0));

    pub fn new(value: Complex64) -> Result<Self> {
        if value.re.is_finite() && value.im.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter { name: "susceptibility", reason: format!("non-finite value {value}") })
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    /// Transparent or amplifying (`Im χ ≤ 0`).
    pub fn is_gain(self) -> bool {
        self.0.im <= 0.0
    }
}

impl TryFrom<Complex64> for Susceptibility {
    type Error = Error;
    fn try_from(v: Complex64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Susceptibility> for Complex64 {
    fn from(s: Susceptibility) -> Self {
        s.0
    }
}

impl fmt::Display for Susceptibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im < 0.0 {
            write!(f, "{} - {}i", self.0.re, -self.0.im)
        } else {
            write!(f, "{} + {}i", self.0.re, self.0.im)
        }
    }
}

/// Dimensionless oscillator strength s₀ = 3𝒩λ³ / (8π²√ε_h).
pub fn s0_from_density(dopant: &DopantSpec) -> f64 {
    3.0 * dopant.number_density * dopant.transition_wavelength.powi(3)
        / (8.0 * PI * PI * dopant.host_eps_real.sqrt())
}

/// Radiative decay rate γ = 4ω_a³𝒬²√ε_h / (6πε₀ħc³), SI units.
pub fn gamma_from_dipole(dipole: f64, omega_a: f64, eps_h: f64) -> f64 {
    4.0 * omega_a.powi(3) * dipole * dipole * eps_h.sqrt()
        / (6.0 * PI * VACUUM_PERMITTIVITY * HBAR * SPEED_OF_LIGHT.powi(3))
}

/// s₀ = 𝒩𝒬²/(ε₀ħγ) from microscopic quantities.
pub fn s0_from_dipole(number_density: f64, dipole: f64, gamma: f64) -> f64 {
    number_density * dipole * dipole / (VACUUM_PERMITTIVITY * HBAR * gamma)
}

/// Which sign of the microwave term to use in the closed-form numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// Numerator `… − 8iΩ_μ²` exactly as published.
    Printed,
    /// Numerator `… + 8iΩ_μ²`. This variant reproduces the published
    /// susceptibility values (χ_NDD = 1181.45 − 0.70i at the Er³⁺ point).
    MwFlipped,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 2] = [ClosedForm::Printed, ClosedForm::MwFlipped];

    pub fn name(self) -> &'static str {
        match self {
            ClosedForm::Printed => "printed",
            ClosedForm::MwFlipped => "mw_flipped",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "printed" => Some(ClosedForm::Printed),
            "mw_flipped" => Some(ClosedForm::MwFlipped),
            _ => None,
        }
    }
}

/// First-order probe susceptibility χ_p in closed form.
///
/// ```text
///            −s₀γ { 2i(r − 2iΔ_μ)[r + γ − 2i(Δ_p + Δ_μ)] ∓ 8iΩ_μ² }
/// χ_p = ───────────────────────────────────────────────────────────────
///        (r − 2iΔ_μ) { (γ − 2iΔ_p)[r + γ − 2i(Δ_p + Δ_μ)] + 4Ω_μ² }
/// ```
///
/// The upper sign is [`ClosedForm::Printed`]. Ω_p does not enter.
pub fn chi_p_closed(params: &LambdaDriveParams, s0: f64, form: ClosedForm) -> Result<Susceptibility> {
    params.validate()?;
    if params.gamma1 != params.gamma2 {
        return Err(Error::UnequalDecayRates { gamma1: params.gamma1, gamma2: params.gamma2 });
    }
    let gamma = params.gamma1;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter { name: "gamma", reason: "closed form needs gamma > 0".into() });
    }
    let r = params.pump_r;
    let om2 = params.omega_mu * params.omega_mu;

    let ground = Complex64::new(r, -2.0 * params.delta_mu);
    let raman = Complex64::new(r + gamma, -2.0 * (params.delta_p + params.delta_mu));
    let probe = Complex64::new(gamma, -2.0 * params.delta_p);

    let mw = 8.0 * I * om2;
    let bracket = match form {
        ClosedForm::Printed => 2.0 * I * ground * raman - mw,
        ClosedForm::MwFlipped => 2.0 * I * ground * raman + mw,
    };
    let num = -s0 * gamma * bracket;
    let den = ground * (probe * raman + 4.0 * om2);

    let scale = params.natural_scale();
    let scale_cubed = scale * scale * scale;
    if den.norm() < CLOSED_FORM_POLE_TOLERANCE * scale_cubed || den.norm() == 0.0 {
        return Err(Error::Pole { magnitude: den.norm(), scale_cubed });
    }
    Susceptibility::new(num / den)
}

/// Lorentz-Lorenz local-field correction χ_NDD = χ_p / (1 − χ_p/3).
pub fn ndd_transform(chi_p: Susceptibility) -> Result<Susceptibility> {
    let c = chi_p.value();
    let gap = Complex64::new(1.0, 0.0) - c / 3.0;
    let distance = gap.norm();
    if distance <= NDD_POLE_TOLERANCE {
        return Err(Error::NddPole { chi_p: c, distance });
    }
    Susceptibility::new(c / gap)
}

/// Algebraic inverse of [`ndd_transform`]: χ_p = χ_NDD / (1 + χ_NDD/3).
pub fn ndd_inverse(chi_ndd: Susceptibility) -> Result<Susceptibility> {
    let c = chi_ndd.value();
    Susceptibility::new(c / (1.0 + c / 3.0))
}

/// Distance of χ_p from the NDD pole, |1 − χ_p/3|.
pub fn ndd_pole_distance(chi_p: Susceptibility) -> f64 {
    (Complex64::new(1.0, 0.0) - chi_p.value() / 3.0).norm()
}
