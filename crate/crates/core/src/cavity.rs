//! Coupled-mode coefficients of a thin dielectric membrane inside a
//! Fabry-Pérot cavity, and the figures of merit built from them.
//!
//! With the membrane at z₀, thickness l ≪ λ and total susceptibility
//! χ_tot = ε_h − 1 + χ:
//!
//! ```text
//! Δω    = ω_c l (ε_h′ − 1 + χ′) sin²(kz₀) / L
//! Δκ    = ω_c l (ε_h″ + χ″) sin²(kz₀) / L
//! g_P   = χ′ ω_c z_zp k l sin(2kz₀) ℬ / L
//! g_h   = (ε_h′ − 1) ω_c z_zp k l sin(2kz₀) ℬ / L
//! ```
//!
//! Only χ′ enters the optomechanical coupling; χ″ feeds the linewidth.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::medium::Susceptibility;
use crate::units::{BESSEL_J0_FIRST_ZERO, BOLTZMANN, HBAR, SPEED_OF_LIGHT};

/// Above this k·l the thin-slab expansion is flagged in the report.
pub const THIN_MEMBRANE_WARNING: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavitySpec {
    /// m
    pub wavelength: f64,
    /// m
    pub length: f64,
    pub quality_factor: f64,
    /// κ_i/κ; 0.5 is critical coupling.
    pub intrinsic_fraction: f64,
    pub finesse: Option<f64>,
}

impl CavitySpec {
    pub fn new(wavelength: f64, length: f64, quality_factor: f64) -> Result<Self> {
        let spec = Self { wavelength, length, quality_factor, intrinsic_fraction: 0.5, finesse: None };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds the spec from a finesse using Q_c = F·L/λ.
    ///
    /// This is half the textbook 2FL/λ; it is the convention that pairs
    /// F = 2×10⁵, L = 100λ with Q_c = 2×10⁷.
    pub fn from_finesse(wavelength: f64, length: f64, finesse: f64) -> Result<Self> {
        let spec = Self {
            wavelength,
            length,
            quality_factor: quality_from_finesse(finesse, length, wavelength),
            intrinsic_fraction: 0.5,
            finesse: Some(finesse),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return Err(Error::InvalidParameter { name: "cavity.wavelength", reason: format!("must be > 0, got {}", self.wavelength) });
        }
        if !(self.length >= self.wavelength) || !self.length.is_finite() {
            return Err(Error::InvalidParameter {
                name: "cavity.length",
                reason: format!("must be >= wavelength, got {}", self.length),
            });
        }
        if !(self.quality_factor > 0.0) {
            return Err(Error::InvalidParameter {
                name: "cavity.quality_factor",
                reason: format!("must be > 0, got {}", self.quality_factor),
            });
        }
        if !(self.intrinsic_fraction > 0.0 && self.intrinsic_fraction <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "cavity.intrinsic_fraction",
                reason: format!("must lie in (0, 1], got {}", self.intrinsic_fraction),
            });
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn omega_c(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.wavelength
    }

    pub fn kappa(&self) -> f64 {
        mode_linewidth(self)
    }

    pub fn kappa_intrinsic(&self) -> f64 {
        self.intrinsic_fraction * self.kappa()
    }
}

pub fn quality_from_finesse(finesse: f64, length: f64, wavelength: f64) -> f64 {
    finesse * length / wavelength
}

/// Total cavity decay rate κ = ω_c/Q_c, rad/s.
pub fn mode_linewidth(cavity: &CavitySpec) -> f64 {
    cavity.omega_c() / cavity.quality_factor
}

/// Where the membrane sits in the standing wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Absolute position z₀ in metres.
    Position(f64),
    /// sin²(kz₀) directly; kz₀ is taken in [0, π/2], so sin(2kz₀) ≥ 0.
    Sin2(f64),
}

impl Placement {
    pub fn sin2(&self, k: f64) -> f64 {
        match *self {
            Placement::Position(z0) => (k * z0).sin().powi(2),
            Placement::Sin2(s) => s,
        }
    }

    /// sin(2kz₀)
    pub fn sin_2kz(&self, k: f64) -> f64 {
        match *self {
            Placement::Position(z0) => (2.0 * k * z0).sin(),
            Placement::Sin2(s) => 2.0 * (s * (1.0 - s)).max(0.0).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembraneSpec {
    /// m
    pub thickness: f64,
    pub placement: Placement,
    /// m
    pub diameter: f64,
    /// kg/m³
    pub mass_density: f64,
    /// Pa
    pub tensile_stress: f64,
    pub host_eps: Complex64,
    pub mech_quality: f64,
    /// ℬ, transverse overlap of optical and mechanical modes.
    pub overlap_factor: f64,
}

impl MembraneSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.thickness > 0.0) {
            return Err(Error::InvalidParameter { name: "membrane.thickness", reason: format!("must be > 0, got {}", self.thickness) });
        }
        if let Placement::Sin2(s) = self.placement {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidParameter { name: "membrane.sin2_kz0", reason: format!("must lie in [0, 1], got {s}") });
            }
        }
        if !(self.host_eps.re >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "membrane.host_eps_real",
                reason: format!("must be >= 1, got {}", self.host_eps.re),
            });
        }
        if !(self.host_eps.im >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "membrane.host_eps_imag",
                reason: format!("must be >= 0, got {}", self.host_eps.im),
            });
        }
        if !(self.overlap_factor > 0.0 && self.overlap_factor <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "membrane.overlap_factor",
                reason: format!("must lie in (0, 1], got {}", self.overlap_factor),
            });
        }
        if !(self.mech_quality > 0.0) {
            return Err(Error::InvalidParameter { name: "membrane.mech_quality", reason: format!("must be > 0, got {}", self.mech_quality) });
        }
        Ok(())
    }
}

/// M = π(D/2)²·l·ρ_m
pub fn membrane_mass(spec: &MembraneSpec) -> f64 {
    PI * (spec.diameter / 2.0).powi(2) * spec.thickness * spec.mass_density
}

/// Fundamental mode of a tensioned circular drum, Ω_m = (j₀₁/a)√(T_s/ρ_m).
pub fn mechanical_frequency(spec: &MembraneSpec) -> f64 {
    BESSEL_J0_FIRST_ZERO / (spec.diameter / 2.0) * (spec.tensile_stress / spec.mass_density).sqrt()
}

/// z_zp = √(ħ / 2MΩ_m)
pub fn zero_point_motion(mass: f64, omega_m: f64) -> f64 {
    (HBAR / (2.0 * mass * omega_m)).sqrt()
}

/// Bose-Einstein occupancy of a mode at `omega` (rad/s) and `temperature` (K).
pub fn thermal_occupancy(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (BOLTZMANN * temperature)).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MechanicalMode {
    /// Ω_m, rad/s
    pub frequency: f64,
    /// kg
    pub mass: f64,
    /// m
    pub zero_point: f64,
    /// γ_m = Ω_m/Q_m, rad/s
    pub damping: f64,
}

impl MechanicalMode {
    pub fn new(mass: f64, frequency: f64, mech_quality: f64) -> Result<Self> {
        if !(mass > 0.0) || !(frequency > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mechanical_mode",
                reason: format!("mass and frequency must be > 0 (got {mass}, {frequency})"),
            });
        }
        Ok(Self { frequency, mass, zero_point: zero_point_motion(mass, frequency), damping: frequency / mech_quality })
    }

    /// Mass from geometry and frequency from the drum model.
    pub fn from_membrane(spec: &MembraneSpec) -> Result<Self> {
        Self::new(membrane_mass(spec), mechanical_frequency(spec), spec.mech_quality)
    }

    /// Mass from geometry with a directly supplied Ω_m.
    pub fn with_frequency(spec: &MembraneSpec, omega_m: f64) -> Result<Self> {
        Self::new(membrane_mass(spec), omega_m, spec.mech_quality)
    }

    /// Keeps Ω_m, γ_m and M but pins z_zp to a supplied value.
    pub fn with_zero_point(mut self, zero_point: f64) -> Self {
        self.zero_point = zero_point;
        self
    }
}

/// Direction of F_rp = −ħ g_om ⟨â†â⟩ / z_zp along the cavity axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceSign {
    /// g_om < 0, force along +z.
    Repulsive,
    /// g_om > 0, force along −z.
    Attractive,
    /// g_om = 0
    Null,
}

impl ForceSign {
    pub fn from_coupling(g_om: f64) -> Self {
        if g_om > 0.0 {
            ForceSign::Attractive
        } else if g_om < 0.0 {
            ForceSign::Repulsive
        } else {
            ForceSign::Null
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportUnits {
    pub delta_omega: &'static str,
    pub delta_kappa: &'static str,
    pub g_om_h: &'static str,
    pub g_om_p: &'static str,
    pub g_om: &'static str,
    pub kappa: &'static str,
    pub kappa_eff: &'static str,
    pub cdr: &'static str,
    pub c_quantum: &'static str,
    pub n_thermal: &'static str,
    pub mech_frequency: &'static str,
    pub mech_damping: &'static str,
    pub zero_point: &'static str,
    pub mass: &'static str,
    pub chi_re: &'static str,
    pub chi_im: &'static str,
    pub kl: &'static str,
}

const UNITS: ReportUnits = ReportUnits {
    delta_omega: "rad/s",
    delta_kappa: "rad/s",
    g_om_h: "rad/s",
    g_om_p: "rad/s",
    g_om: "rad/s",
    kappa: "rad/s",
    kappa_eff: "rad/s",
    cdr: "dimensionless",
    c_quantum: "dimensionless",
    n_thermal: "dimensionless",
    mech_frequency: "rad/s",
    mech_damping: "rad/s",
    zero_point: "m",
    mass: "kg",
    chi_re: "dimensionless",
    chi_im: "dimensionless",
    kl: "dimensionless",
};

/// How κ′ was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaMode {
    /// κ′ = 2κ_i + Δκ
    Physical,
    /// κ′ = κ / ratio
    Override,
}

/// Flat, SI-unit summary of the cavity-membrane coupling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub delta_omega: f64,
    pub delta_kappa: f64,
    pub g_om_h: f64,
    pub g_om_p: f64,
    pub g_om: f64,
    pub kappa: f64,
    pub kappa_eff: f64,
    pub kappa_mode: KappaMode,
    pub cdr: f64,
    pub force_sign: ForceSign,
    pub c_quantum: f64,
    pub n_thermal: f64,
    pub mech_frequency: f64,
    pub mech_damping: f64,
    pub zero_point: f64,
    pub mass: f64,
    pub chi_re: f64,
    pub chi_im: f64,
    pub kl: f64,
    pub warnings: Vec<String>,
    pub units: ReportUnits,
}

/// Frequency shift, linewidth change, couplings, κ′, CDR and C_Q.
pub fn coupling_report(
    cavity: &CavitySpec,
    membrane: &MembraneSpec,
    mode: &MechanicalMode,
    chi: Susceptibility,
    temperature: f64,
    kappa_ratio_override: Option<f64>,
) -> Result<CouplingReport> {
    cavity.validate()?;
    membrane.validate()?;
    let k = cavity.wavenumber();
    let l = membrane.thickness;
    let kl = k * l;
    if kl >= 1.0 {
        return Err(Error::ThinMembraneViolation { kl });
    }
    let mut warnings = Vec::new();
    if kl > THIN_MEMBRANE_WARNING {
        warnings.push(format!("k*l = {kl:.4} exceeds {THIN_MEMBRANE_WARNING}; thin-slab expansion is inaccurate"));
    }

    let omega_c = cavity.omega_c();
    let len = cavity.length;
    let s2 = membrane.placement.sin2(k);
    let s2k = membrane.placement.sin_2kz(k);
    let eps = membrane.host_eps;

    let delta_omega = omega_c * l * (eps.re - 1.0 + chi.re()) * s2 / len;
    let delta_kappa = omega_c * l * (eps.im + chi.im()) * s2 / len;
    let prefactor = omega_c * mode.zero_point * kl * s2k * membrane.overlap_factor / len;
    let g_om_p = chi.re() * prefactor;
    let g_om_h = (eps.re - 1.0) * prefactor;
    let g_om = g_om_h + g_om_p;

    let kappa = cavity.kappa();
    let (kappa_eff, kappa_mode) = match kappa_ratio_override {
        Some(ratio) => {
            if !(ratio > 0.0) {
                return Err(Error::InvalidParameter { name: "kappa_ratio_override", reason: format!("must be > 0, got {ratio}") });
            }
            (kappa / ratio, KappaMode::Override)
        }
        None => (2.0 * cavity.kappa_intrinsic() + delta_kappa, KappaMode::Physical),
    };
    if !(kappa_eff > 0.0) {
        return Err(Error::LasingThreshold { kappa_eff });
    }

    let n_thermal = thermal_occupancy(mode.frequency, temperature);
    let c_quantum = g_om * g_om / (kappa_eff * mode.damping * n_thermal);

    Ok(CouplingReport {
        delta_omega,
        delta_kappa,
        g_om_h,
        g_om_p,
        g_om,
        kappa,
        kappa_eff,
        kappa_mode,
        cdr: g_om / kappa_eff,
        force_sign: ForceSign::from_coupling(g_om),
        c_quantum,
        n_thermal,
        mech_frequency: mode.frequency,
        mech_damping: mode.damping,
        zero_point: mode.zero_point,
        mass: mode.mass,
        chi_re: chi.re(),
        chi_im: chi.im(),
        kl,
        warnings,
        units: UNITS,
    })
}

/// Numerical check of the thin-slab closed forms along the cavity axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Overlap1d {
    /// ∫ sin²(kz) dz over the slab, m
    pub energy_overlap: f64,
    /// d(energy_overlap)/dz₀, dimensionless
    pub gradient_overlap: f64,
    /// l·sin²(kz₀)
    pub energy_closed: f64,
    /// l·k·sin(2kz₀)
    pub gradient_closed: f64,
}

impl Overlap1d {
    pub fn energy_ratio(&self) -> f64 {
        self.energy_overlap / self.energy_closed
    }

    pub fn energy_rel_error(&self) -> f64 {
        ((self.energy_overlap - self.energy_closed) / self.energy_closed).abs()
    }
}

/// Integrates sin²(kz) across a slab of thickness `l` centred on `z0`.
pub fn overlap_integral_1d(z0: f64, l: f64, k: f64) -> Result<Overlap1d> {
    if !(l > 0.0) {
        return Err(Error::InvalidParameter { name: "thickness", reason: format!("must be > 0, got {l}") });
    }
    // integrate in the slab-local coordinate to keep precision for tiny l
    let out = quadrature::integrate(|u: f64| (k * (z0 + u)).sin().powi(2), -l / 2.0, l / 2.0, 1e-15 * l);
    Ok(Overlap1d {
        energy_overlap: out.integral,
        gradient_overlap: (2.0 * k * z0).sin() * (k * l).sin(),
        energy_closed: l * (k * z0).sin().powi(2),
        gradient_closed: l * k * (2.0 * k * z0).sin(),
    })
}
