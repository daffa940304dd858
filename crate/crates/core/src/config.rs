//! Flat `key = value` run configuration.
//!
//! Keys are namespaced (`lambda.*`, `dopant.*`, `cavity.*`, `membrane.*`,
//! `env.*`, `model.*`, `bounds.*`, `sweep.*`, `optimize.*`); `#` starts a
//! comment. Unknown and duplicate keys are errors. Rates take a `_gamma` or
//! `_hz` suffix; `_hz` values are ordinary frequencies and are divided by
//! `lambda.gamma_hz` to get units of γ. Every optional key and its default is
//! listed in [`RunConfig::default`].

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::cavity::{CavitySpec, MechanicalMode, MembraneSpec, Placement};
use crate::error::{Error, Result};
use crate::medium::{s0_from_density, ClosedForm, DopantSpec, LambdaDriveParams};
use crate::oracle::OracleOptions;
use crate::presets::FIG_S0;
use crate::sweep::{AxisUnit, Bound, CdrModel, Engine, OptimizeSpec, PhysicalSetup, PointModel, Scale, SweepAxis, SweepParam, SweepSpec};
use crate::units::TWO_PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnit {
    Gamma,
    Hz,
}

impl RateUnit {
    fn suffix(self) -> &'static str {
        match self {
            RateUnit::Gamma => "_gamma",
            RateUnit::Hz => "_hz",
        }
    }
}

/// A rate as written in the file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub value: f64,
    pub unit: RateUnit,
}

impl Rate {
    pub const fn gamma(value: f64) -> Self {
        Self { value, unit: RateUnit::Gamma }
    }

    pub fn in_gamma(&self, gamma_hz: f64) -> f64 {
        match self.unit {
            RateUnit::Gamma => self.value,
            RateUnit::Hz => self.value / gamma_hz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Closed,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CdrMode {
    Baseline,
    Physical,
}

/// Axis or bound target: parameter plus the unit it was written in
/// (`None` for s₀ and number density).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamKey {
    pub param: SweepParam,
    pub unit: Option<RateUnit>,
}

impl ParamKey {
    fn parse(s: &str) -> Result<Self> {
        for unit in [RateUnit::Gamma, RateUnit::Hz] {
            if let Some(base) = s.strip_suffix(unit.suffix()) {
                if let Some(param) = SweepParam::parse(base).filter(|p| !matches!(p, SweepParam::S0 | SweepParam::NumberDensity)) {
                    return Ok(Self { param, unit: Some(unit) });
                }
            }
        }
        match s {
            "s0" => Ok(Self { param: SweepParam::S0, unit: None }),
            "number_density_m3" => Ok(Self { param: SweepParam::NumberDensity, unit: None }),
            _ => Err(Error::Config(format!("unknown parameter `{s}` (rates need a _gamma or _hz suffix)"))),
        }
    }

    fn name(&self) -> String {
        match (self.param, self.unit) {
            (SweepParam::NumberDensity, _) => "number_density_m3".into(),
            (p, Some(u)) => format!("{}{}", p.name(), u.suffix()),
            (p, None) => p.name().into(),
        }
    }

    fn to_gamma(&self, v: f64, gamma_hz: f64) -> f64 {
        match self.unit {
            Some(RateUnit::Hz) => v / gamma_hz,
            _ => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisEntry {
    pub key: ParamKey,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEntry {
    pub key: ParamKey,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub gamma_hz: f64,
    pub gamma1: Rate,
    pub gamma2: Rate,
    pub pump_r: Rate,
    pub omega_mu: Rate,
    /// Zero selects the oracle's automatic weak probe.
    pub omega_p: Rate,
    pub delta_p: Rate,
    pub delta_mu: Rate,

    pub s0: Option<f64>,
    pub number_density_m3: Option<f64>,
    pub dopant_wavelength_nm: f64,
    pub dopant_host_eps: f64,

    pub cavity_wavelength_nm: f64,
    /// Defaults to 100 wavelengths.
    pub cavity_length_um: Option<f64>,
    /// Defaults to 2e7 unless a finesse is given.
    pub cavity_quality_factor: Option<f64>,
    pub cavity_finesse: Option<f64>,
    pub cavity_intrinsic_fraction: f64,

    pub membrane_thickness_nm: f64,
    /// Defaults to sin²(kz₀) = 0.5 unless a position is given.
    pub membrane_sin2_kz0: Option<f64>,
    pub membrane_position_nm: Option<f64>,
    pub membrane_diameter_um: f64,
    pub membrane_density_kg_m3: f64,
    pub membrane_stress_pa: f64,
    pub membrane_eps_re: f64,
    pub membrane_eps_im: f64,
    pub membrane_mech_quality: f64,
    pub membrane_overlap_factor: f64,
    /// Overrides the drum-model frequency.
    pub membrane_frequency_hz: Option<f64>,

    pub temperature_k: f64,

    pub engine: EngineChoice,
    pub closed_form: ClosedForm,
    pub cdr_mode: CdrMode,
    pub baseline_factor: f64,
    pub kappa_ratio_override: Option<f64>,
    pub dephasing_2: Rate,
    pub probe_ratio: f64,

    pub bounds: Vec<BoundEntry>,
    pub axis1: Option<AxisEntry>,
    pub axis2: Option<AxisEntry>,

    pub grid_points: usize,
    pub rounds: usize,
    pub pole_margin: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma_hz: 1e6,
            gamma1: Rate::gamma(1.0),
            gamma2: Rate::gamma(1.0),
            pump_r: Rate::gamma(0.1),
            omega_mu: Rate::gamma(1.0),
            omega_p: Rate::gamma(0.0),
            delta_p: Rate::gamma(0.3),
            delta_mu: Rate::gamma(0.4),
            s0: None,
            number_density_m3: None,
            dopant_wavelength_nm: 1550.0,
            dopant_host_eps: 4.0,
            cavity_wavelength_nm: 1550.0,
            cavity_length_um: None,
            cavity_quality_factor: None,
            cavity_finesse: None,
            cavity_intrinsic_fraction: 0.5,
            membrane_thickness_nm: 100.0,
            membrane_sin2_kz0: None,
            membrane_position_nm: None,
            membrane_diameter_um: 10.0,
            membrane_density_kg_m3: 2700.0,
            membrane_stress_pa: 0.9e9,
            membrane_eps_re: 4.0,
            membrane_eps_im: 0.0,
            membrane_mech_quality: 4e6,
            membrane_overlap_factor: 0.92,
            membrane_frequency_hz: None,
            temperature_k: 10.0,
            engine: EngineChoice::Oracle,
            closed_form: ClosedForm::MwFlipped,
            cdr_mode: CdrMode::Baseline,
            baseline_factor: 1e-3,
            kappa_ratio_override: None,
            dephasing_2: Rate::gamma(0.0),
            probe_ratio: 1e-4,
            bounds: Vec::new(),
            axis1: None,
            axis2: None,
            grid_points: 64,
            rounds: 3,
            pole_margin: 1e-3,
        }
    }
}

const RATE_KEYS: [&str; 8] = [
    "lambda.gamma1",
    "lambda.gamma2",
    "lambda.pump_r",
    "lambda.omega_mu",
    "lambda.omega_p",
    "lambda.delta_p",
    "lambda.delta_mu",
    "model.dephasing_2",
];

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}` as a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("`{key}`: value must be finite")));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}` as a count")))
}

fn parse_axis(key: &str, v: &str) -> Result<AxisEntry> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(Error::Config(format!("`{key}`: expected `param, start, stop, points[, linear|log]`")));
    }
    let scale = match parts.get(4) {
        None | Some(&"linear") => Scale::Linear,
        Some(&"log") => Scale::Log,
        Some(other) => return Err(Error::Config(format!("`{key}`: unknown scale `{other}`"))),
    };
    Ok(AxisEntry {
        key: ParamKey::parse(parts[0])?,
        start: num(key, parts[1])?,
        stop: num(key, parts[2])?,
        points: count(key, parts[3])?,
        scale,
    })
}

fn parse_bound(key: &str, name: &str, v: &str) -> Result<BoundEntry> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("`{key}`: expected `lo, hi`")));
    }
    Ok(BoundEntry { key: ParamKey::parse(name)?, lo: num(key, parts[0])?, hi: num(key, parts[1])? })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            // both unit spellings of one rate count as the same key
            let canonical = key.trim_end_matches("_gamma").trim_end_matches("_hz").to_string();
            let canonical = if RATE_KEYS.contains(&canonical.as_str()) { canonical } else { key.to_string() };
            if !seen.insert(canonical) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        for base in RATE_KEYS {
            for unit in [RateUnit::Gamma, RateUnit::Hz] {
                if key.strip_prefix(base) == Some(unit.suffix()) {
                    let rate = Rate { value: num(key, v)?, unit };
                    let slot = match base {
                        "lambda.gamma1" => &mut self.gamma1,
                        "lambda.gamma2" => &mut self.gamma2,
                        "lambda.pump_r" => &mut self.pump_r,
                        "lambda.omega_mu" => &mut self.omega_mu,
                        "lambda.omega_p" => &mut self.omega_p,
                        "lambda.delta_p" => &mut self.delta_p,
                        "lambda.delta_mu" => &mut self.delta_mu,
                        _ => &mut self.dephasing_2,
                    };
                    *slot = rate;
                    return Ok(());
                }
            }
        }
        if let Some(name) = key.strip_prefix("bounds.") {
            self.bounds.push(parse_bound(key, name, v)?);
            return Ok(());
        }
        match key {
            "lambda.gamma_hz" => self.gamma_hz = num(key, v)?,
            "dopant.s0" => self.s0 = Some(num(key, v)?),
            "dopant.number_density_m3" => self.number_density_m3 = Some(num(key, v)?),
            "dopant.wavelength_nm" => self.dopant_wavelength_nm = num(key, v)?,
            "dopant.host_eps" => self.dopant_host_eps = num(key, v)?,
            "cavity.wavelength_nm" => self.cavity_wavelength_nm = num(key, v)?,
            "cavity.length_um" => self.cavity_length_um = Some(num(key, v)?),
            "cavity.quality_factor" => self.cavity_quality_factor = Some(num(key, v)?),
            "cavity.finesse" => self.cavity_finesse = Some(num(key, v)?),
            "cavity.intrinsic_fraction" => self.cavity_intrinsic_fraction = num(key, v)?,
            "membrane.thickness_nm" => self.membrane_thickness_nm = num(key, v)?,
            "membrane.sin2_kz0" => self.membrane_sin2_kz0 = Some(num(key, v)?),
            "membrane.position_nm" => self.membrane_position_nm = Some(num(key, v)?),
            "membrane.diameter_um" => self.membrane_diameter_um = num(key, v)?,
            "membrane.density_kg_m3" => self.membrane_density_kg_m3 = num(key, v)?,
            "membrane.stress_pa" => self.membrane_stress_pa = num(key, v)?,
            "membrane.eps_re" => self.membrane_eps_re = num(key, v)?,
            "membrane.eps_im" => self.membrane_eps_im = num(key, v)?,
            "membrane.mech_quality" => self.membrane_mech_quality = num(key, v)?,
            "membrane.overlap_factor" => self.membrane_overlap_factor = num(key, v)?,
            "membrane.frequency_hz" => self.membrane_frequency_hz = Some(num(key, v)?),
            "env.temperature_k" => self.temperature_k = num(key, v)?,
            "model.engine" => {
                self.engine = match v {
                    "closed" => EngineChoice::Closed,
                    "oracle" => EngineChoice::Oracle,
                    _ => return Err(Error::Config(format!("`{key}`: expected closed|oracle, got `{v}`"))),
                }
            }
            "model.closed_form" => {
                self.closed_form = ClosedForm::parse(v)
                    .ok_or_else(|| Error::Config(format!("`{key}`: expected printed|mw_flipped, got `{v}`")))?
            }
            "model.cdr_mode" => {
                self.cdr_mode = match v {
                    "baseline" => CdrMode::Baseline,
                    "physical" => CdrMode::Physical,
                    _ => return Err(Error::Config(format!("`{key}`: expected baseline|physical, got `{v}`"))),
                }
            }
            "model.baseline_factor" => self.baseline_factor = num(key, v)?,
            "model.kappa_ratio_override" => self.kappa_ratio_override = Some(num(key, v)?),
            "model.probe_ratio" => self.probe_ratio = num(key, v)?,
            "sweep.axis1" => self.axis1 = Some(parse_axis(key, v)?),
            "sweep.axis2" => self.axis2 = Some(parse_axis(key, v)?),
            "optimize.grid_points" => self.grid_points = count(key, v)?,
            "optimize.rounds" => self.rounds = count(key, v)?,
            "optimize.pole_margin" => self.pole_margin = num(key, v)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_hz > 0.0) {
            return Err(Error::Config("`lambda.gamma_hz` must be positive".into()));
        }
        if self.s0.is_some() && self.number_density_m3.is_some() {
            return Err(Error::Config("give either `dopant.s0` or `dopant.number_density_m3`, not both".into()));
        }
        if self.cavity_quality_factor.is_some() && self.cavity_finesse.is_some() {
            return Err(Error::Config("give either `cavity.quality_factor` or `cavity.finesse`, not both".into()));
        }
        if self.membrane_sin2_kz0.is_some() && self.membrane_position_nm.is_some() {
            return Err(Error::Config("give either `membrane.sin2_kz0` or `membrane.position_nm`, not both".into()));
        }
        if !(self.baseline_factor > 0.0) {
            return Err(Error::Config("`model.baseline_factor` must be positive".into()));
        }
        if self.axis2.is_some() && self.axis1.is_none() {
            return Err(Error::Config("`sweep.axis2` needs `sweep.axis1`".into()));
        }
        self.drive().validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn drive(&self) -> LambdaDriveParams {
        let g = |r: &Rate| r.in_gamma(self.gamma_hz);
        LambdaDriveParams {
            gamma1: g(&self.gamma1),
            gamma2: g(&self.gamma2),
            pump_r: g(&self.pump_r),
            omega_mu: g(&self.omega_mu),
            omega_p: g(&self.omega_p),
            delta_p: g(&self.delta_p),
            delta_mu: g(&self.delta_mu),
        }
    }

    pub fn dopant(&self) -> Option<DopantSpec> {
        self.number_density_m3.map(|n| DopantSpec {
            number_density: n,
            transition_wavelength: self.dopant_wavelength_nm * 1e-9,
            dipole_moment: None,
            host_eps_real: self.dopant_host_eps,
        })
    }

    /// Explicit s₀, else from the number density, else 3/1.66.
    pub fn s0(&self) -> Result<f64> {
        match (self.s0, self.dopant()) {
            (Some(s), _) => Ok(s),
            (None, Some(d)) => {
                d.validate()?;
                Ok(s0_from_density(&d))
            }
            (None, None) => Ok(FIG_S0),
        }
    }

    pub fn engine(&self) -> Engine {
        match self.engine {
            EngineChoice::Closed => Engine::Closed(self.closed_form),
            EngineChoice::Oracle => Engine::Oracle,
        }
    }

    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions { probe_ratio: self.probe_ratio, dephasing_2: self.dephasing_2.in_gamma(self.gamma_hz) }
    }

    pub fn cavity(&self) -> Result<CavitySpec> {
        let wl = self.cavity_wavelength_nm * 1e-9;
        let length = self.cavity_length_um.map_or(100.0 * wl, |l| l * 1e-6);
        let mut c = match self.cavity_finesse {
            Some(f) => CavitySpec::from_finesse(wl, length, f)?,
            None => CavitySpec::new(wl, length, self.cavity_quality_factor.unwrap_or(2e7))?,
        };
        c.intrinsic_fraction = self.cavity_intrinsic_fraction;
        c.validate()?;
        Ok(c)
    }

    pub fn membrane(&self) -> Result<MembraneSpec> {
        let placement = match self.membrane_position_nm {
            Some(z) => Placement::Position(z * 1e-9),
            None => Placement::Sin2(self.membrane_sin2_kz0.unwrap_or(0.5)),
        };
        let m = MembraneSpec {
            thickness: self.membrane_thickness_nm * 1e-9,
            placement,
            diameter: self.membrane_diameter_um * 1e-6,
            mass_density: self.membrane_density_kg_m3,
            tensile_stress: self.membrane_stress_pa,
            host_eps: Complex64::new(self.membrane_eps_re, self.membrane_eps_im),
            mech_quality: self.membrane_mech_quality,
            overlap_factor: self.membrane_overlap_factor,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn mode(&self) -> Result<MechanicalMode> {
        let m = self.membrane()?;
        match self.membrane_frequency_hz {
            Some(f) => MechanicalMode::with_frequency(&m, TWO_PI * f),
            None => MechanicalMode::from_membrane(&m),
        }
    }

    pub fn cdr_model(&self) -> Result<CdrModel> {
        Ok(match self.cdr_mode {
            CdrMode::Baseline => CdrModel::Baseline { factor: self.baseline_factor },
            CdrMode::Physical => CdrModel::Physical(PhysicalSetup {
                cavity: self.cavity()?,
                membrane: self.membrane()?,
                mode: self.mode()?,
                temperature: self.temperature_k,
                kappa_ratio_override: self.kappa_ratio_override,
            }),
        })
    }

    pub fn point_model(&self) -> Result<PointModel> {
        Ok(PointModel {
            drive: self.drive(),
            s0: self.s0()?,
            dopant: self.dopant(),
            engine: self.engine(),
            model: self.cdr_model()?,
            oracle: self.oracle_options(),
        })
    }

    fn axis(&self, a: &AxisEntry) -> SweepAxis {
        let unit = if a.key.unit.is_some() { AxisUnit::Gamma } else { AxisUnit::Absolute };
        SweepAxis {
            param: a.key.param,
            start: a.key.to_gamma(a.start, self.gamma_hz),
            stop: a.key.to_gamma(a.stop, self.gamma_hz),
            points: a.points,
            scale: a.scale,
            unit,
        }
    }

    /// Sweep over `sweep.axis1` (and `sweep.axis2`); `_hz` axes are reported in γ.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let first = self.axis1.as_ref().ok_or_else(|| Error::Config("`sweep.axis1` is required".into()))?;
        let mut axes = vec![self.axis(first)];
        if let Some(second) = &self.axis2 {
            axes.push(self.axis(second));
        }
        let spec = SweepSpec { axes, base: self.point_model()? };
        spec.validate()?;
        Ok(spec)
    }

    pub fn optimize_spec(&self) -> Result<OptimizeSpec> {
        if self.bounds.is_empty() {
            return Err(Error::Config("optimizer needs at least one `bounds.*` key".into()));
        }
        let bounds = self
            .bounds
            .iter()
            .map(|b| {
                let unit = if b.key.unit.is_some() { AxisUnit::Gamma } else { AxisUnit::Absolute };
                Bound {
                    param: b.key.param,
                    lo: b.key.to_gamma(b.lo, self.gamma_hz),
                    hi: b.key.to_gamma(b.hi, self.gamma_hz),
                    unit,
                }
            })
            .collect();
        Ok(OptimizeSpec {
            bounds,
            base: self.point_model()?,
            grid_points: self.grid_points,
            rounds: self.rounds,
            pole_margin: self.pole_margin,
        })
    }

    /// Writes every key, including defaults. Parsing the output gives back an
    /// identical config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("lambda.gamma_hz", self.gamma_hz.to_string());
        let rates = [
            ("lambda.gamma1", self.gamma1),
            ("lambda.gamma2", self.gamma2),
            ("lambda.pump_r", self.pump_r),
            ("lambda.omega_mu", self.omega_mu),
            ("lambda.omega_p", self.omega_p),
            ("lambda.delta_p", self.delta_p),
            ("lambda.delta_mu", self.delta_mu),
            ("model.dephasing_2", self.dephasing_2),
        ];
        for (k, r) in rates {
            kv(&format!("{k}{}", r.unit.suffix()), r.value.to_string());
        }
        let opts = [
            ("dopant.s0", self.s0),
            ("dopant.number_density_m3", self.number_density_m3),
            ("cavity.length_um", self.cavity_length_um),
            ("cavity.quality_factor", self.cavity_quality_factor),
            ("cavity.finesse", self.cavity_finesse),
            ("membrane.sin2_kz0", self.membrane_sin2_kz0),
            ("membrane.position_nm", self.membrane_position_nm),
            ("membrane.frequency_hz", self.membrane_frequency_hz),
            ("model.kappa_ratio_override", self.kappa_ratio_override),
        ];
        for (k, v) in opts {
            if let Some(v) = v {
                kv(k, v.to_string());
            }
        }
        let plain = [
            ("dopant.wavelength_nm", self.dopant_wavelength_nm),
            ("dopant.host_eps", self.dopant_host_eps),
            ("cavity.wavelength_nm", self.cavity_wavelength_nm),
            ("cavity.intrinsic_fraction", self.cavity_intrinsic_fraction),
            ("membrane.thickness_nm", self.membrane_thickness_nm),
            ("membrane.diameter_um", self.membrane_diameter_um),
            ("membrane.density_kg_m3", self.membrane_density_kg_m3),
            ("membrane.stress_pa", self.membrane_stress_pa),
            ("membrane.eps_re", self.membrane_eps_re),
            ("membrane.eps_im", self.membrane_eps_im),
            ("membrane.mech_quality", self.membrane_mech_quality),
            ("membrane.overlap_factor", self.membrane_overlap_factor),
            ("env.temperature_k", self.temperature_k),
            ("model.baseline_factor", self.baseline_factor),
            ("model.probe_ratio", self.probe_ratio),
            ("optimize.pole_margin", self.pole_margin),
        ];
        for (k, v) in plain {
            kv(k, v.to_string());
        }
        kv(
            "model.engine",
            match self.engine {
                EngineChoice::Closed => "closed",
                EngineChoice::Oracle => "oracle",
            }
            .into(),
        );
        kv("model.closed_form", self.closed_form.name().into());
        kv(
            "model.cdr_mode",
            match self.cdr_mode {
                CdrMode::Baseline => "baseline",
                CdrMode::Physical => "physical",
            }
            .into(),
        );
        kv("optimize.grid_points", self.grid_points.to_string());
        kv("optimize.rounds", self.rounds.to_string());
        for (k, a) in [("sweep.axis1", &self.axis1), ("sweep.axis2", &self.axis2)] {
            if let Some(a) = a {
                let scale = match a.scale {
                    Scale::Linear => "linear",
                    Scale::Log => "log",
                };
                kv(k, format!("{}, {}, {}, {}, {scale}", a.key.name(), a.start, a.stop, a.points));
            }
        }
        for b in &self.bounds {
            kv(&format!("bounds.{}", b.key.name()), format!("{}, {}", b.lo, b.hi));
        }
        s
    }
}
