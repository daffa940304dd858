use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mitm_core::adjudication::{adjudicate, AdjudicationConfig, DEFAULT_POINTS, DEFAULT_SEED};
use mitm_core::config::RunConfig;
use mitm_core::medium::{chi_p_closed, ClosedForm, ndd_transform, Susceptibility};
use mitm_core::oracle::{build_liouvillian_with_dephasing, chi_p_numeric, format_matrix, steady_state};
use mitm_core::presets;
use mitm_core::sweep::{find_spsc_region, gain_boundary, optimize_cdr, sweep, with_threads, write_csv, Engine, PointModel};
use mitm_core::Error;

#[derive(Parser)]
#[command(name = "mitm", version, about = "Membrane-in-the-middle optomechanics with a driven Λ-medium")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Closed,
    Oracle,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// χ_p and χ_NDD at one parameter point.
    Chi {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Named point (fig2a-point).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Probe detuning in units of γ.
        #[arg(long, allow_hyphen_values = true)]
        delta_p: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        delta_mu: Option<f64>,
        #[arg(long)]
        omega_mu: Option<f64>,
        #[arg(long)]
        pump_r: Option<f64>,
        #[arg(long)]
        s0: Option<f64>,
        /// Plain text instead of JSON.
        #[arg(long)]
        plain: bool,
    },
    /// Coupling report for a device preset (er_si3n4, cr_ruby).
    CaseStudy { name: String },
    /// Grid sweep to CSV.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// fig2a, fig2b, fig3, fig4a or fig4b.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the refined gain/loss boundary (2-D sweeps) as JSON.
        #[arg(long)]
        boundary_out: Option<PathBuf>,
        /// Write the strong-coupling region summary as JSON.
        #[arg(long)]
        region_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
    },
    /// Maximize |g_om/κ′| subject to gain.
    Optimize {
        #[arg(long)]
        config: Option<PathBuf>,
        /// fig3
        #[arg(long)]
        preset: Option<String>,
    },
    /// Compare the closed-form χ_p variants against the master equation.
    Adjudicate {
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Liouvillian and steady state at one point.
    Dump {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the fully resolved configuration.
    Config {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::GridTooLarge { .. } | Error::UnequalDecayRates { .. } => 2,
            Error::NoFeasiblePoint => 5,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| config_error(format!("{}: {e}", p.display())))?;
            RunConfig::parse(&text).map_err(|e| config_error(format!("{}: {e}", p.display())))
        }
    }
}

fn parse_threads(value: Option<&str>) -> Result<Option<usize>, Failure> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(config_error(format!("MITM_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}

/// Writes to `out` when given, otherwise returns the text for stdout.
fn emit(out: &Option<PathBuf>, text: String) -> Result<String, Failure> {
    match out {
        Some(p) => {
            fs::write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn complex_json(c: Option<Susceptibility>) -> Value {
    match c {
        Some(c) => json!({ "re": c.re(), "im": c.im() }),
        None => Value::Null,
    }
}

fn chi_values(model: &PointModel, engine: Engine) -> Result<Value, Failure> {
    let (chi_p, extra) = match engine {
        Engine::Closed(form) => (chi_p_closed(&model.drive, model.s0, form)?, Value::Null),
        Engine::Oracle => {
            let n = chi_p_numeric(&model.drive, model.s0, &model.oracle)?;
            (n.chi, json!({ "omega_p": n.omega_p, "linearity_rel_diff": n.linearity_rel_diff, "nonlinear": n.nonlinear }))
        }
    };
    let chi_ndd = ndd_transform(chi_p)?;
    let mut v = json!({
        "engine": engine.label(),
        "chi_p": complex_json(Some(chi_p)),
        "chi_ndd": complex_json(Some(chi_ndd)),
        "gain": chi_ndd.is_gain(),
    });
    if !extra.is_null() {
        v["probe"] = extra;
    }
    Ok(v)
}

fn cmd_chi(
    config: &Option<PathBuf>,
    preset: &Option<String>,
    engine: Option<EngineArg>,
    overrides: [(Option<f64>, &str); 5],
    plain: bool,
) -> Result<String, Failure> {
    let (mut model, closed_form) = match preset.as_deref() {
        Some("fig2a-point") => {
            if config.is_some() {
                return Err(config_error("--preset and --config are exclusive"));
            }
            (presets::fig2a_point(), ClosedForm::MwFlipped)
        }
        Some(other) => return Err(config_error(format!("unknown point preset `{other}` (known: fig2a-point)"))),
        None => {
            let cfg = load_config(config)?;
            (cfg.point_model()?, cfg.closed_form)
        }
    };
    for (value, name) in overrides {
        let Some(v) = value else { continue };
        let g = model.drive.gamma_ref();
        match name {
            "delta_p" => model.drive.delta_p = v * g,
            "delta_mu" => model.drive.delta_mu = v * g,
            "omega_mu" => model.drive.omega_mu = v * g,
            "pump_r" => model.drive.pump_r = v * g,
            _ => model.s0 = v,
        }
    }
    model.drive.validate()?;
    let closed = Engine::Closed(closed_form);
    let engines: Vec<Engine> = match engine {
        None => vec![model.engine],
        Some(EngineArg::Closed) => vec![closed],
        Some(EngineArg::Oracle) => vec![Engine::Oracle],
        Some(EngineArg::Both) => vec![closed, Engine::Oracle],
    };
    let results = engines.iter().map(|&e| chi_values(&model, e)).collect::<Result<Vec<_>, _>>()?;
    let d = &model.drive;
    let mut out = json!({
        "point": {
            "delta_p": d.delta_p / d.gamma_ref(),
            "delta_mu": d.delta_mu / d.gamma_ref(),
            "omega_mu": d.omega_mu / d.gamma_ref(),
            "pump_r": d.pump_r / d.gamma_ref(),
            "s0": model.s0,
        },
        "results": results,
        "units": { "point": "gamma (s0 dimensionless)", "chi": "dimensionless", "omega_p": "gamma" },
    });
    if results.len() == 2 {
        let a = &results[0]["chi_p"];
        let b = &results[1]["chi_p"];
        let (ar, ai, br, bi) = (a["re"].as_f64(), a["im"].as_f64(), b["re"].as_f64(), b["im"].as_f64());
        if let (Some(ar), Some(ai), Some(br), Some(bi)) = (ar, ai, br, bi) {
            out["chi_p_rel_diff"] = json!(((ar - br).hypot(ai - bi)) / br.hypot(bi));
        }
    }
    if plain {
        let mut s = String::new();
        for r in &results {
            s += &format!(
                "{}\tchi_p = {} {:+}i\tchi_ndd = {} {:+}i\n",
                r["engine"].as_str().unwrap_or(""),
                r["chi_p"]["re"],
                r["chi_p"]["im"].as_f64().unwrap_or(f64::NAN),
                r["chi_ndd"]["re"],
                r["chi_ndd"]["im"].as_f64().unwrap_or(f64::NAN),
            );
        }
        if let Some(d) = out.get("chi_p_rel_diff") {
            s += &format!("rel_diff\t{d}\n");
        }
        return Ok(s);
    }
    Ok(pretty(&out))
}

fn cmd_case_study(name: &str) -> Result<(String, bool), Failure> {
    let case = presets::case_study(name)
        .ok_or_else(|| config_error(format!("unknown case study `{name}` (known: {})", presets::CASE_STUDIES.join(", "))))??;
    let outcome = presets::run_case_study(&case)?;
    Ok((pretty(&outcome), outcome.passed))
}

fn sweep_source(config: &Option<PathBuf>, preset: &Option<String>) -> Result<mitm_core::sweep::SweepSpec, Failure> {
    match (preset.as_deref(), config) {
        (Some(_), Some(_)) => Err(config_error("--preset and --config are exclusive")),
        (Some(name), None) => presets::figure(name)
            .ok_or_else(|| config_error(format!("unknown sweep preset `{name}` (known: {})", presets::FIGURES.join(", ")))),
        (None, Some(_)) => Ok(load_config(config)?.sweep_spec()?),
        (None, None) => Err(config_error("sweep needs --preset or --config")),
    }
}

fn cmd_sweep(
    config: &Option<PathBuf>,
    preset: &Option<String>,
    out: &Option<PathBuf>,
    boundary_out: &Option<PathBuf>,
    region_out: &Option<PathBuf>,
    threshold: f64,
) -> Result<String, Failure> {
    let spec = sweep_source(config, preset)?;
    let records = sweep(&spec)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &spec, &records)?;
    let stdout = emit(out, String::from_utf8(buf).expect("ascii csv"))?;
    if boundary_out.is_some() {
        let points = gain_boundary(&spec, &records)?;
        let units: Vec<_> = spec.axes.iter().map(|a| json!({ a.param.name(): a.unit_label() })).collect();
        emit(boundary_out, pretty(&json!({ "axes": units, "points": points })))?;
    }
    if region_out.is_some() {
        let region = find_spsc_region(&records, threshold);
        let axes: Vec<_> = spec.axes.iter().map(|a| json!({ a.param.name(): a.unit_label() })).collect();
        emit(region_out, pretty(&json!({ "axes": axes, "region": region, "units": { "threshold": "dimensionless" } })))?;
    }
    Ok(stdout)
}

fn cmd_optimize(config: &Option<PathBuf>, preset: &Option<String>) -> Result<String, Failure> {
    let spec = match (preset.as_deref(), config) {
        (Some(_), Some(_)) => return Err(config_error("--preset and --config are exclusive")),
        (Some("fig3"), None) => presets::fig3_bounds(),
        (Some(other), None) => return Err(config_error(format!("unknown optimize preset `{other}` (known: fig3)"))),
        (None, _) => load_config(config)?.optimize_spec()?,
    };
    let opt = optimize_cdr(&spec)?;
    let params: serde_json::Map<String, Value> =
        opt.params.iter().zip(&opt.coords).map(|(p, &v)| (p.name().to_string(), json!(v))).collect();
    let units: serde_json::Map<String, Value> = spec
        .bounds
        .iter()
        .map(|b| {
            let u = match (b.param, b.unit) {
                (mitm_core::sweep::SweepParam::S0, _) => "dimensionless",
                (mitm_core::sweep::SweepParam::NumberDensity, _) => "1/m^3",
                (_, mitm_core::sweep::AxisUnit::Gamma) => "gamma",
                _ => "rad/s",
            };
            (b.param.name().to_string(), json!(u))
        })
        .collect();
    Ok(pretty(&json!({
        "parameters": params,
        "cdr_modulus": opt.value,
        "cdr": opt.cdr,
        "chi_p": complex_json(Some(opt.chi_p)),
        "chi_ndd": complex_json(Some(opt.chi_ndd)),
        "gain_slack": opt.gain_slack,
        "evaluations": opt.evaluations,
        "engine": spec.base.engine.label(),
        "units": { "parameters": units, "cdr_modulus": "dimensionless", "chi": "dimensionless", "gain_slack": "dimensionless" },
    })))
}

fn cmd_dump(config: &Option<PathBuf>) -> Result<String, Failure> {
    let cfg = load_config(config)?;
    let model = cfg.point_model()?;
    let mut drive = model.drive;
    if drive.omega_p == 0.0 {
        drive.omega_p = model.oracle.probe_ratio * drive.gamma_ref();
    }
    let l = build_liouvillian_with_dephasing(&drive, model.oracle.dephasing_2);
    let rho = steady_state(&l)?;
    Ok(format!(
        "# liouvillian (column-stacked, rates in gamma)\n{}# steady state\n{}",
        format_matrix(l.matrix()),
        format_matrix(rho.matrix())
    ))
}

/// Exit code and stdout text for one invocation.
fn run(cli: Cli, threads: Option<usize>) -> Result<(u8, String), Failure> {
    with_threads(threads, move || match cli.command {
        Command::Chi { config, preset, engine, delta_p, delta_mu, omega_mu, pump_r, s0, plain } => {
            let overrides =
                [(delta_p, "delta_p"), (delta_mu, "delta_mu"), (omega_mu, "omega_mu"), (pump_r, "pump_r"), (s0, "s0")];
            Ok((0, cmd_chi(&config, &preset, engine, overrides, plain)?))
        }
        Command::CaseStudy { name } => {
            let (text, passed) = cmd_case_study(&name)?;
            Ok((if passed { 0 } else { 4 }, text))
        }
        Command::Sweep { config, preset, out, boundary_out, region_out, threshold } => {
            Ok((0, cmd_sweep(&config, &preset, &out, &boundary_out, &region_out, threshold)?))
        }
        Command::Optimize { config, preset } => Ok((0, cmd_optimize(&config, &preset)?)),
        Command::Adjudicate { points, seed, out } => {
            let report = adjudicate(&AdjudicationConfig { points, seed, ..Default::default() })?;
            Ok((0, emit(&out, pretty(&report))?))
        }
        Command::Dump { config } => Ok((0, cmd_dump(&config)?)),
        Command::Config { config } => Ok((0, load_config(&config)?.to_text())),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = parse_threads(std::env::var("MITM_THREADS").ok().as_deref()).and_then(|threads| run(cli, threads));
    match result {
        Ok((code, text)) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> Result<(u8, String), Failure> {
        let mut argv = vec!["mitm"];
        argv.extend_from_slice(args);
        run(Cli::try_parse_from(argv).expect("valid arguments"), Some(2))
    }

    fn code(r: Result<(u8, String), Failure>) -> u8 {
        match r {
            Ok((c, _)) => c,
            Err(f) => f.code,
        }
    }

    fn temp_file(name: &str, body: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("mitm-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn preset_point_matches_library() {
        let (c, text) = invoke(&["chi", "--preset", "fig2a-point"]).ok().unwrap();
        assert_eq!(c, 0);
        let v: Value = serde_json::from_str(&text).unwrap();
        let m = presets::fig2a_point();
        let want = ndd_transform(chi_p_closed(&m.drive, m.s0, ClosedForm::MwFlipped).unwrap()).unwrap();
        assert_eq!(v["results"][0]["chi_ndd"]["re"].as_f64().unwrap(), want.re());
        assert_eq!(v["results"][0]["chi_ndd"]["im"].as_f64().unwrap(), want.im());
    }

    #[test]
    fn both_engines_report_a_difference() {
        let (_, text) = invoke(&["chi", "--engine", "both", "--delta-p", "0.1", "--pump-r", "0.2", "--omega-mu", "0.5", "--delta-mu", "0.3", "--s0", "1"])
            .ok()
            .unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["results"].as_array().unwrap().len(), 2);
        assert!(v["chi_p_rel_diff"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn unknown_config_key_exits_2_and_names_it() {
        let p = temp_file("bad.cfg", "lambda.pump_r_gamma = 0.1\nlambda.colour = blue\n");
        match invoke(&["chi", "--config", p.to_str().unwrap()]) {
            Err(f) => {
                assert_eq!(f.code, 2);
                assert!(f.message.contains("lambda.colour"), "{}", f.message);
            }
            Ok(_) => panic!("accepted an unknown key"),
        }
    }

    #[test]
    fn case_studies() {
        assert_eq!(code(invoke(&["case-study", "er_si3n4"])), 0);
        let (c, text) = invoke(&["case-study", "cr_ruby"]).ok().unwrap();
        assert_eq!(c, 0);
        assert!(text.contains("\"assumptions\""));
        assert_eq!(code(invoke(&["case-study", "unknown"])), 2);
    }

    #[test]
    fn fig2a_sweep_to_file() {
        let out = temp_file("fig2a.csv", "");
        let (c, text) = invoke(&["sweep", "--preset", "fig2a", "--out", out.to_str().unwrap()]).ok().unwrap();
        assert_eq!((c, text.as_str()), (0, ""));
        let csv = fs::read_to_string(&out).unwrap();
        let rows = csv.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(rows, 2001 + 1);
    }

    #[test]
    fn oversized_custom_sweep_exits_2() {
        let p = temp_file("big.cfg", "sweep.axis1 = delta_p_gamma, -2, 2, 2000\nsweep.axis2 = omega_mu_gamma, 0.1, 2, 1000\n");
        assert_eq!(code(invoke(&["sweep", "--config", p.to_str().unwrap()])), 2);
    }

    #[test]
    fn loss_only_bounds_exit_5() {
        let p = temp_file("lossy.cfg", "lambda.omega_mu_gamma = 0\nbounds.delta_p_gamma = -0.5, 0.5\noptimize.grid_points = 8\n");
        assert_eq!(code(invoke(&["optimize", "--config", p.to_str().unwrap()])), 5);
    }

    #[test]
    fn optimize_is_repeatable() {
        let a = invoke(&["optimize", "--preset", "fig3"]).ok().unwrap();
        let b = invoke(&["optimize", "--preset", "fig3"]).ok().unwrap();
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a.1).unwrap();
        assert!(v["cdr_modulus"].as_f64().unwrap() >= 1.0);
    }

    #[test]
    fn degenerate_point_is_a_solver_error() {
        let p = temp_file("dark.cfg", "lambda.omega_mu_gamma = 0\nlambda.pump_r_gamma = 0\nlambda.omega_p_gamma = 0\n");
        assert_eq!(code(invoke(&["dump", "--config", p.to_str().unwrap()])), 3);
        let q = temp_file("closedpole.cfg", "model.engine = closed\nlambda.pump_r_gamma = 0\nlambda.delta_mu_gamma = 0\n");
        assert_eq!(code(invoke(&["chi", "--config", q.to_str().unwrap()])), 3);
    }

    #[test]
    fn thread_count_parsing() {
        assert_eq!(parse_threads(None).ok().unwrap(), None);
        assert_eq!(parse_threads(Some("8")).ok().unwrap(), Some(8));
        assert_eq!(parse_threads(Some("0")).err().unwrap().code, 2);
        assert_eq!(parse_threads(Some("many")).err().unwrap().code, 2);
    }
}
