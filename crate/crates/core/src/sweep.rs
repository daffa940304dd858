//! Parameter grids over the Λ-medium drives, gain/loss boundaries, the
//! strong-coupling region and a constrained maximizer of the coupling-decay
//! ratio (CDR).
//!
//! Grid points are independent and evaluated in parallel; results always come
//! back in row-major order (first axis outermost).

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::{coupling_report, CavitySpec, MechanicalMode, MembraneSpec};
use crate::error::{Error, Result};
use crate::medium::{chi_p_closed, ndd_pole_distance, ndd_transform, s0_from_density, ClosedForm, DopantSpec, LambdaDriveParams, Susceptibility};
use crate::oracle::{chi_p_numeric, OracleOptions};

/// Upper bound on the number of grid points in one sweep.
pub const MAX_GRID_POINTS: u64 = 1_000_000;
/// Default CDR per unit χ′_NDD in baseline mode.
pub const DEFAULT_BASELINE_FACTOR: f64 = 1e-3;
/// Bisection target for the gain/loss boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    DeltaP,
    OmegaMu,
    PumpR,
    DeltaMu,
    S0,
    NumberDensity,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::DeltaP => "delta_p",
            SweepParam::OmegaMu => "omega_mu",
            SweepParam::PumpR => "pump_r",
            SweepParam::DeltaMu => "delta_mu",
            SweepParam::S0 => "s0",
            SweepParam::NumberDensity => "number_density",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "delta_p" => SweepParam::DeltaP,
            "omega_mu" => SweepParam::OmegaMu,
            "pump_r" => SweepParam::PumpR,
            "delta_mu" => SweepParam::DeltaMu,
            "s0" => SweepParam::S0,
            "number_density" => SweepParam::NumberDensity,
            _ => return None,
        })
    }

    fn is_rate(self) -> bool {
        matches!(self, SweepParam::DeltaP | SweepParam::OmegaMu | SweepParam::PumpR | SweepParam::DeltaMu)
    }
}

/// How axis values are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisUnit {
    /// Multiples of γ (rates only).
    Gamma,
    /// rad/s for rates, 1/m³ for number density, bare number for s₀.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
    pub unit: AxisUnit,
}

impl SweepAxis {
    pub fn linear(param: SweepParam, start: f64, stop: f64, points: usize) -> Self {
        let unit = if param.is_rate() { AxisUnit::Gamma } else { AxisUnit::Absolute };
        Self { param, start, stop, points, scale: Scale::Linear, unit }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config(format!("axis {}: non-finite bounds", self.param.name())));
        }
        // start == stop collapses the axis to a single value
        if self.start > self.stop {
            return Err(Error::Config(format!("axis {}: start {} > stop {}", self.param.name(), self.start, self.stop)));
        }
        if self.points < 2 {
            return Err(Error::Config(format!("axis {}: need at least 2 points", self.param.name())));
        }
        if self.scale == Scale::Log && !(self.start > 0.0) {
            return Err(Error::Config(format!("axis {}: log scale needs start > 0", self.param.name())));
        }
        if self.unit == AxisUnit::Gamma && !self.param.is_rate() {
            return Err(Error::Config(format!("axis {}: gamma units only apply to rates", self.param.name())));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        if self.start == self.stop {
            1
        } else {
            self.points
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.start == self.stop {
            return self.start;
        }
        let t = i as f64 / (self.points - 1) as f64;
        match self.scale {
            Scale::Linear => {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * t
                }
            }
            Scale::Log => {
                if i + 1 == self.points {
                    self.stop
                } else {
                    (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp()
                }
            }
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    pub fn unit_label(&self) -> &'static str {
        match (self.param, self.unit) {
            (p, AxisUnit::Gamma) if p.is_rate() => "gamma",
            (p, _) if p.is_rate() => "rad/s",
            (SweepParam::NumberDensity, _) => "1/m^3",
            _ => "dimensionless",
        }
    }
}

/// Susceptibility engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "engine", content = "variant")]
pub enum Engine {
    Closed(ClosedForm),
    Oracle,
}

impl Engine {
    pub fn label(self) -> String {
        match self {
            Engine::Closed(f) => format!("closed/{}", f.name()),
            Engine::Oracle => "oracle".to_string(),
        }
    }
}

/// Cavity, membrane and temperature for the physical CDR model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalSetup {
    pub cavity: CavitySpec,
    pub membrane: MembraneSpec,
    pub mode: MechanicalMode,
    pub temperature: f64,
    /// κ/κ′ replacing the physical 2κ_i + Δκ when set.
    pub kappa_ratio_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CdrModel {
    /// g_om/κ′ = χ′_NDD × factor.
    Baseline { factor: f64 },
    /// Full coupling chain, κ′ = 2κ_i + Δκ unless overridden.
    Physical(PhysicalSetup),
}

impl Default for CdrModel {
    fn default() -> Self {
        CdrModel::Baseline { factor: DEFAULT_BASELINE_FACTOR }
    }
}

/// Everything needed to evaluate the model at one point of parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointModel {
    pub drive: LambdaDriveParams,
    pub s0: f64,
    pub dopant: Option<DopantSpec>,
    pub engine: Engine,
    pub model: CdrModel,
    pub oracle: OracleOptions,
}

impl PointModel {
    fn gamma(&self) -> f64 {
        self.drive.gamma_ref()
    }

    fn apply(&self, param: SweepParam, unit: AxisUnit, value: f64) -> Result<(LambdaDriveParams, f64)> {
        let mut drive = self.drive;
        let mut s0 = self.s0;
        let scaled = if unit == AxisUnit::Gamma { value * self.gamma() } else { value };
        match param {
            SweepParam::DeltaP => drive.delta_p = scaled,
            SweepParam::OmegaMu => drive.omega_mu = scaled,
            SweepParam::PumpR => drive.pump_r = scaled,
            SweepParam::DeltaMu => drive.delta_mu = scaled,
            SweepParam::S0 => s0 = value,
            SweepParam::NumberDensity => {
                let mut dopant = self
                    .dopant
                    .ok_or_else(|| Error::Config("number_density axis needs a dopant specification".into()))?;
                dopant.number_density = value;
                s0 = s0_from_density(&dopant);
            }
        }
        Ok((drive, s0))
    }

    fn with_coords(&self, coords: &[(SweepParam, AxisUnit, f64)]) -> Result<PointModel> {
        let mut out = *self;
        for &(param, unit, value) in coords {
            let (drive, s0) = out.apply(param, unit, value)?;
            out.drive = drive;
            out.s0 = s0;
        }
        Ok(out)
    }

    /// χ_p → χ_NDD → CDR at this point. Model failures become flags.
    pub fn evaluate(&self, coords: Vec<f64>) -> SweepRecord {
        let mut rec = SweepRecord { coords, chi_p: None, chi_ndd: None, cdr: None, flags: Flags::default() };
        let chi_p = match self.engine {
            Engine::Closed(form) => chi_p_closed(&self.drive, self.s0, form),
            Engine::Oracle => chi_p_numeric(&self.drive, self.s0, &self.oracle).map(|n| {
                rec.flags.nonlinear = n.nonlinear;
                n.chi
            }),
        };
        let chi_p = match chi_p {
            Ok(c) => c,
            Err(_) => {
                rec.flags.singular = true;
                return rec;
            }
        };
        rec.chi_p = Some(chi_p);
        let chi_ndd = match ndd_transform(chi_p) {
            Ok(c) => c,
            Err(_) => {
                rec.flags.pole = true;
                return rec;
            }
        };
        rec.chi_ndd = Some(chi_ndd);
        rec.flags.gain = Some(chi_ndd.is_gain());
        match self.model {
            CdrModel::Baseline { factor } => rec.cdr = Some(chi_ndd.re() * factor),
            CdrModel::Physical(setup) => {
                match coupling_report(&setup.cavity, &setup.membrane, &setup.mode, chi_ndd, setup.temperature, setup.kappa_ratio_override) {
                    Ok(r) => rec.cdr = Some(r.cdr),
                    Err(Error::LasingThreshold { .. }) => rec.flags.lasing = true,
                    Err(_) => rec.flags.singular = true,
                }
            }
        }
        rec
    }

    /// χ_NDD only, for root refinement.
    fn chi_ndd(&self) -> Option<Susceptibility> {
        let chi_p = match self.engine {
            Engine::Closed(form) => chi_p_closed(&self.drive, self.s0, form).ok()?,
            Engine::Oracle => chi_p_numeric(&self.drive, self.s0, &self.oracle).ok()?.chi,
        };
        ndd_transform(chi_p).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Flags {
    /// `Some(true)` when χ″_NDD ≤ 0.
    pub gain: Option<bool>,
    /// χ_p within the NDD pole tolerance.
    pub pole: bool,
    /// Oracle probe response failed the linearity check.
    pub nonlinear: bool,
    /// Closed-form denominator or steady-state solve failed.
    pub singular: bool,
    /// κ′ ≤ 0 in the physical model.
    pub lasing: bool,
}

impl Flags {
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        match self.gain {
            Some(true) => parts.push("gain"),
            Some(false) => parts.push("loss"),
            None => {}
        }
        if self.pole {
            parts.push("pole");
        }
        if self.nonlinear {
            parts.push("nonlinear");
        }
        if self.singular {
            parts.push("singular");
        }
        if self.lasing {
            parts.push("lasing");
        }
        parts.join("|")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub coords: Vec<f64>,
    pub chi_p: Option<Susceptibility>,
    pub chi_ndd: Option<Susceptibility>,
    /// Signed g_om/κ′.
    pub cdr: Option<f64>,
    pub flags: Flags,
}

impl SweepRecord {
    pub fn cdr_modulus(&self) -> Option<f64> {
        self.cdr.map(f64::abs)
    }

    /// arg(g_om/κ′): 0 or π.
    pub fn cdr_argument(&self) -> Option<f64> {
        self.cdr.map(|c| if c < 0.0 { PI } else { 0.0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
    pub base: PointModel,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!("a sweep takes 1 or 2 axes, got {}", self.axes.len())));
        }
        for a in &self.axes {
            a.validate()?;
        }
        let total = self.total_points();
        if total > MAX_GRID_POINTS {
            return Err(Error::GridTooLarge { points: total, limit: MAX_GRID_POINTS });
        }
        self.base.drive.validate()
    }

    pub fn total_points(&self) -> u64 {
        self.axes.iter().map(|a| a.len() as u64).product()
    }

    pub fn coords_at(&self, flat: usize) -> Vec<f64> {
        let mut rem = flat;
        let mut out = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.len();
            out[k] = axis.value(rem % n);
            rem /= n;
        }
        out
    }

    pub fn model_at(&self, coords: &[f64]) -> Result<PointModel> {
        let tagged: Vec<_> = self.axes.iter().zip(coords).map(|(a, &v)| (a.param, a.unit, v)).collect();
        self.base.with_coords(&tagged)
    }

    pub fn evaluate_at(&self, coords: Vec<f64>) -> Result<SweepRecord> {
        Ok(self.model_at(&coords)?.evaluate(coords))
    }
}

/// Evaluates every grid point; output is row-major over the axes.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let n = spec.total_points() as usize;
    (0..n).into_par_iter().map(|i| spec.evaluate_at(spec.coords_at(i))).collect()
}

/// Runs `f` on a dedicated pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub coords: Vec<f64>,
    pub chi_ndd_im: f64,
}

/// Gain/loss boundary of a 2-D sweep: sign changes of χ″_NDD between grid
/// neighbours, each refined by bisection on the continuous model. Crossings
/// through an NDD pole are dropped. An empty result means no boundary.
pub fn gain_boundary(spec: &SweepSpec, grid: &[SweepRecord]) -> Result<Vec<BoundaryPoint>> {
    if spec.axes.len() != 2 {
        return Err(Error::Config("gain boundary needs a 2-D sweep".into()));
    }
    let (n1, n2) = (spec.axes[0].len(), spec.axes[1].len());
    if grid.len() != n1 * n2 {
        return Err(Error::Config(format!("grid has {} records, expected {}", grid.len(), n1 * n2)));
    }
    let mut edges = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            let here = i * n2 + j;
            if j + 1 < n2 {
                edges.push((here, here + 1));
            }
            if i + 1 < n1 {
                edges.push((here, here + n2));
            }
        }
    }
    let mut points: Vec<BoundaryPoint> = edges
        .par_iter()
        .filter_map(|&(a, b)| {
            let (ca, cb) = (grid[a].chi_ndd?, grid[b].chi_ndd?);
            if (ca.im() > 0.0) == (cb.im() > 0.0) {
                return None;
            }
            refine_crossing(spec, &grid[a].coords, &grid[b].coords, ca.im())
        })
        .collect();
    points.sort_by(|p, q| {
        p.coords[0].total_cmp(&q.coords[0]).then(p.coords[1].total_cmp(&q.coords[1]))
    });
    Ok(points)
}

fn refine_crossing(spec: &SweepSpec, a: &[f64], b: &[f64], f_a: f64) -> Option<BoundaryPoint> {
    let at = |t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + (y - x) * t).collect() };
    let eval = |t: f64| -> Option<f64> { Some(spec.model_at(&at(t)).ok()?.chi_ndd()?.im()) };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let lo_positive = f_a > 0.0;
    let mut best = (f64::INFINITY, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = eval(mid)?;
        if f.abs() < best.0 {
            best = (f.abs(), mid);
        }
        if f.abs() < BOUNDARY_TOLERANCE * 1e-3 || hi - lo < f64::EPSILON {
            break;
        }
        if (f > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (best.0 < BOUNDARY_TOLERANCE).then(|| BoundaryPoint { coords: at(best.1), chi_ndd_im: eval(best.1).unwrap_or(f64::NAN) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpscRegion {
    pub threshold: f64,
    pub count: usize,
    /// Row-major indices of member records.
    pub members: Vec<usize>,
    /// (min, max) per axis over the members.
    pub bounding_box: Vec<(f64, f64)>,
}

/// Points with |g_om/κ′| > threshold whose medium shows gain (χ″_NDD ≤ 0).
pub fn find_spsc_region(grid: &[SweepRecord], threshold: f64) -> SpscRegion {
    let members: Vec<usize> = grid
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            matches!((r.cdr_modulus(), r.chi_ndd), (Some(m), Some(c)) if m > threshold && c.im() <= 0.0)
        })
        .map(|(i, _)| i)
        .collect();
    let dims = grid.first().map_or(0, |r| r.coords.len());
    let bounding_box = (0..dims)
        .map(|d| {
            members.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = grid[i].coords[d];
                (lo.min(v), hi.max(v))
            })
        })
        .filter(|(lo, hi)| lo <= hi)
        .collect();
    SpscRegion { threshold, count: members.len(), members, bounding_box }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub unit: AxisUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeSpec {
    pub bounds: Vec<Bound>,
    pub base: PointModel,
    /// Coarse grid points per axis before refinement.
    pub grid_points: usize,
    pub rounds: usize,
    /// Minimum |1 − χ_p/3| accepted.
    pub pole_margin: f64,
}

impl OptimizeSpec {
    pub fn new(bounds: Vec<Bound>, base: PointModel) -> Self {
        Self { bounds, base, grid_points: 64, rounds: 3, pole_margin: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub params: Vec<SweepParam>,
    pub coords: Vec<f64>,
    /// |g_om/κ′|
    pub value: f64,
    pub cdr: f64,
    pub chi_p: Susceptibility,
    pub chi_ndd: Susceptibility,
    /// −χ″_NDD, non-negative at a feasible point.
    pub gain_slack: f64,
    pub evaluations: usize,
}

struct Objective<'a> {
    spec: &'a OptimizeSpec,
}

impl Objective<'_> {
    /// |CDR| at a feasible point, `None` otherwise.
    fn eval(&self, coords: &[f64]) -> Option<(f64, SweepRecord)> {
        let tagged: Vec<_> = self.spec.bounds.iter().zip(coords).map(|(b, &v)| (b.param, b.unit, v)).collect();
        let model = self.spec.base.with_coords(&tagged).ok()?;
        let rec = model.evaluate(coords.to_vec());
        let chi_p = rec.chi_p?;
        let chi_ndd = rec.chi_ndd?;
        if chi_ndd.im() > 0.0 || ndd_pole_distance(chi_p) < self.spec.pole_margin {
            return None;
        }
        let m = rec.cdr_modulus().filter(|m| m.is_finite())?;
        Some((m, rec))
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Coarse grid, then golden-section coordinate descent on |g_om/κ′| subject
/// to χ″_NDD ≤ 0 and a margin from the NDD pole.
pub fn optimize_cdr(spec: &OptimizeSpec) -> Result<Optimum> {
    if spec.bounds.is_empty() {
        return Err(Error::Config("optimizer needs at least one bound".into()));
    }
    for b in &spec.bounds {
        if !(b.lo <= b.hi) || !b.lo.is_finite() || !b.hi.is_finite() {
            return Err(Error::Config(format!("bound {}: need lo <= hi, got [{}, {}]", b.param.name(), b.lo, b.hi)));
        }
    }
    let d = spec.bounds.len();
    let cap = (MAX_GRID_POINTS as f64).powf(1.0 / d as f64).floor() as usize;
    let per_axis = spec.grid_points.clamp(2, cap.max(2));
    let axes: Vec<SweepAxis> = spec
        .bounds
        .iter()
        .map(|b| SweepAxis { param: b.param, start: b.lo, stop: b.hi, points: per_axis, scale: Scale::Linear, unit: b.unit })
        .collect();
    let total: usize = axes.iter().map(SweepAxis::len).product();
    let grid = SweepSpec { axes: axes.clone(), base: spec.base };

    let objective = Objective { spec };
    let coarse: Vec<Option<f64>> =
        (0..total).into_par_iter().map(|i| objective.eval(&grid.coords_at(i)).map(|(m, _)| m)).collect();
    let mut evaluations = total;
    let start = coarse
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|m| (i, m)))
        .fold(None, |best: Option<(usize, f64)>, (i, m)| match best {
            Some((_, bm)) if bm >= m => best,
            _ => Some((i, m)),
        })
        .ok_or(Error::NoFeasiblePoint)?;

    let mut x = grid.coords_at(start.0);
    let mut fx = start.1;
    let half_width: Vec<f64> = axes.iter().map(|a| if a.len() > 1 { (a.stop - a.start) / (a.len() - 1) as f64 } else { 0.0 }).collect();

    for _ in 0..spec.rounds {
        for k in 0..d {
            let b = &spec.bounds[k];
            let lo = (x[k] - half_width[k]).max(b.lo);
            let hi = (x[k] + half_width[k]).min(b.hi);
            if hi <= lo {
                continue;
            }
            let mut probe = x.clone();
            let mut f = |t: f64, best_x: &mut Vec<f64>, best_f: &mut f64, evals: &mut usize| -> f64 {
                probe[k] = t;
                *evals += 1;
                match objective.eval(&probe) {
                    Some((m, _)) => {
                        if m > *best_f {
                            *best_f = m;
                            best_x.clone_from(&probe);
                        }
                        m
                    }
                    None => f64::NEG_INFINITY,
                }
            };
            let (mut a, mut c) = (lo, hi);
            let mut x1 = c - INV_PHI * (c - a);
            let mut x2 = a + INV_PHI * (c - a);
            let mut f1 = f(x1, &mut x, &mut fx, &mut evaluations);
            let mut f2 = f(x2, &mut x, &mut fx, &mut evaluations);
            for _ in 0..200 {
                if c - a <= 1e-13 * (b.hi - b.lo).max(f64::MIN_POSITIVE) {
                    break;
                }
                if f1 >= f2 {
                    c = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = c - INV_PHI * (c - a);
                    f1 = f(x1, &mut x, &mut fx, &mut evaluations);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + INV_PHI * (c - a);
                    f2 = f(x2, &mut x, &mut fx, &mut evaluations);
                }
            }
        }
    }

    let (value, rec) = objective.eval(&x).ok_or(Error::NoFeasiblePoint)?;
    let chi_ndd = rec.chi_ndd.ok_or(Error::NoFeasiblePoint)?;
    Ok(Optimum {
        params: spec.bounds.iter().map(|b| b.param).collect(),
        coords: x,
        value,
        cdr: rec.cdr.unwrap_or(f64::NAN),
        chi_p: rec.chi_p.ok_or(Error::NoFeasiblePoint)?,
        chi_ndd,
        gain_slack: -chi_ndd.im(),
        evaluations,
    })
}

fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// CSV with a `#units:` comment line, a header and one row per record.
pub fn write_csv<W: Write>(out: &mut W, spec: &SweepSpec, records: &[SweepRecord]) -> io::Result<()> {
    let mut units: Vec<String> = spec.axes.iter().map(|a| format!("{}={}", a.param.name(), a.unit_label())).collect();
    units.extend(
        ["chi_p=dimensionless", "chi_ndd=dimensionless", "cdr_mod=dimensionless", "cdr_arg=rad"].map(String::from),
    );
    writeln!(out, "#units: {}", units.join(","))?;
    let mut header: Vec<&str> = spec.axes.iter().map(|a| a.param.name()).collect();
    header.extend(["chi_p_re", "chi_p_im", "chi_ndd_re", "chi_ndd_im", "cdr_mod", "cdr_arg", "flag"]);
    writeln!(out, "{}", header.join(","))?;
    for r in records {
        let mut row: Vec<String> = r.coords.iter().map(|&c| fmt_num(c)).collect();
        row.push(fmt_opt(r.chi_p.map(Susceptibility::re)));
        row.push(fmt_opt(r.chi_p.map(Susceptibility::im)));
        row.push(fmt_opt(r.chi_ndd.map(Susceptibility::re)));
        row.push(fmt_opt(r.chi_ndd.map(Susceptibility::im)));
        row.push(fmt_opt(r.cdr_modulus()));
        row.push(fmt_opt(r.cdr_argument()));
        row.push(r.flags.label());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(engine: Engine) -> PointModel {
        PointModel {
            drive: LambdaDriveParams::symmetric(1.0, 0.1, 1.0, 0.0, 0.3, 0.4),
            s0: 3.0 / 1.66,
            dopant: None,
            engine,
            model: CdrModel::default(),
            oracle: OracleOptions::default(),
        }
    }

    #[test]
    fn axis_values() {
        let a = SweepAxis::linear(SweepParam::DeltaP, -2.0, 2.0, 5);
        assert_eq!(a.values(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        let collapsed = SweepAxis::linear(SweepParam::DeltaP, 0.3, 0.3, 2);
        assert_eq!(collapsed.values(), vec![0.3]);
        let log = SweepAxis { scale: Scale::Log, ..SweepAxis::linear(SweepParam::PumpR, 0.01, 1.0, 3) };
        let v = log.values();
        assert!((v[1] - 0.1).abs() < 1e-15 && v[2] == 1.0);
    }

    #[test]
    fn bad_axes_rejected() {
        assert!(SweepAxis::linear(SweepParam::DeltaP, 1.0, 0.0, 5).validate().is_err());
        assert!(SweepAxis::linear(SweepParam::DeltaP, 0.0, 1.0, 1).validate().is_err());
        let s0_gamma = SweepAxis { unit: AxisUnit::Gamma, ..SweepAxis::linear(SweepParam::S0, 1.0, 2.0, 3) };
        assert!(s0_gamma.validate().is_err());
    }

    #[test]
    fn grid_too_large() {
        let spec = SweepSpec {
            axes: vec![
                SweepAxis::linear(SweepParam::DeltaP, 0.0, 1.0, 1001),
                SweepAxis::linear(SweepParam::OmegaMu, 0.0, 1.0, 1000),
            ],
            base: base(Engine::Closed(ClosedForm::MwFlipped)),
        };
        assert!(matches!(sweep(&spec), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn collapsed_sweep_matches_direct_evaluation() {
        let b = base(Engine::Closed(ClosedForm::MwFlipped));
        let spec = SweepSpec { axes: vec![SweepAxis::linear(SweepParam::DeltaP, 0.30285, 0.30285, 2)], base: b };
        let recs = sweep(&spec).unwrap();
        assert_eq!(recs.len(), 1);
        let mut p = b.drive;
        p.delta_p = 0.30285;
        let direct = ndd_transform(chi_p_closed(&p, b.s0, ClosedForm::MwFlipped).unwrap()).unwrap();
        assert_eq!(recs[0].chi_ndd.unwrap(), direct);
    }

    #[test]
    fn row_major_ordering() {
        let spec = SweepSpec {
            axes: vec![
                SweepAxis::linear(SweepParam::PumpR, 0.1, 0.3, 3),
                SweepAxis::linear(SweepParam::OmegaMu, 0.5, 1.0, 2),
            ],
            base: base(Engine::Closed(ClosedForm::Printed)),
        };
        let recs = sweep(&spec).unwrap();
        let coords: Vec<_> = recs.iter().map(|r| r.coords.clone()).collect();
        assert_eq!(coords[1], vec![0.1, 1.0]);
        assert_eq!(coords[2], vec![0.2, 0.5]);
    }

    #[test]
    fn pole_points_carry_no_ndd() {
        // chi_p = 3 exactly is only reachable by construction; use the flag path directly.
        let rec = SweepRecord { coords: vec![0.0], chi_p: None, chi_ndd: None, cdr: None, flags: Flags { pole: true, ..Flags::default() } };
        assert_eq!(rec.flags.label(), "pole");
        assert_eq!(rec.cdr_argument(), None);
    }

    #[test]
    fn uniform_loss_has_no_boundary() {
        let spec = SweepSpec {
            axes: vec![
                SweepAxis::linear(SweepParam::PumpR, 0.1, 0.3, 3),
                SweepAxis::linear(SweepParam::OmegaMu, 0.5, 1.0, 3),
            ],
            base: base(Engine::Closed(ClosedForm::Printed)),
        };
        let lossy = Susceptibility::from_parts(0.5, 1.0).unwrap();
        let grid: Vec<SweepRecord> = (0..9)
            .map(|i| SweepRecord {
                coords: spec.coords_at(i),
                chi_p: Some(lossy),
                chi_ndd: Some(lossy),
                cdr: Some(0.0),
                flags: Flags::default(),
            })
            .collect();
        assert!(gain_boundary(&spec, &grid).unwrap().is_empty());
    }

    #[test]
    fn infinite_threshold_gives_empty_region() {
        let spec = SweepSpec {
            axes: vec![SweepAxis::linear(SweepParam::DeltaP, -1.0, 1.0, 21)],
            base: base(Engine::Closed(ClosedForm::MwFlipped)),
        };
        let r = find_spsc_region(&sweep(&spec).unwrap(), f64::INFINITY);
        assert_eq!(r.count, 0);
        assert!(r.bounding_box.is_empty());
    }

    #[test]
    fn degenerate_bounds_return_the_point() {
        let b = base(Engine::Closed(ClosedForm::MwFlipped));
        let spec = OptimizeSpec::new(
            vec![Bound { param: SweepParam::DeltaP, lo: 0.30285, hi: 0.30285, unit: AxisUnit::Gamma }],
            b,
        );
        let opt = optimize_cdr(&spec).unwrap();
        assert_eq!(opt.coords, vec![0.30285]);
        let mut p = b.drive;
        p.delta_p = 0.30285;
        let chi = ndd_transform(chi_p_closed(&p, b.s0, ClosedForm::MwFlipped).unwrap()).unwrap();
        assert_eq!(opt.value, chi.re().abs() * 1e-3);
    }

    #[test]
    fn loss_only_bounds_are_infeasible() {
        // Printed form near resonance without microwave: pure absorption.
        let mut b = base(Engine::Oracle);
        b.drive.omega_mu = 0.0;
        let spec = OptimizeSpec {
            grid_points: 8,
            ..OptimizeSpec::new(vec![Bound { param: SweepParam::DeltaP, lo: -0.5, hi: 0.5, unit: AxisUnit::Gamma }], b)
        };
        assert!(matches!(optimize_cdr(&spec), Err(Error::NoFeasiblePoint)));
    }

    #[test]
    fn csv_shape() {
        let spec = SweepSpec {
            axes: vec![SweepAxis::linear(SweepParam::DeltaP, -1.0, 1.0, 3)],
            base: base(Engine::Closed(ClosedForm::MwFlipped)),
        };
        let recs = sweep(&spec).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &spec, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("#units: delta_p=gamma"));
        assert_eq!(lines[1], "delta_p,chi_p_re,chi_p_im,chi_ndd_re,chi_ndd_im,cdr_mod,cdr_arg,flag");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("-1.00000000000e0,"));
    }
}
