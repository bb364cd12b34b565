#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use uavnet::config::{RawConfig, TABLE1_TOML};
use uavnet::coverage::{multicell_coverage, multicell_coverage_limit};
use uavnet::error::Error;
use uavnet::montecarlo::{estimate_all, CoverageEstimate, Estimate, SimOptions, VseEstimate, MIN_TRIALS};
use uavnet::netmodel::NetworkConfig;
use uavnet::optimize::maximize;
use uavnet::sweep::{parse_grid, Objective, SweepParameter, SweepSpec};
use uavnet::validation::{run_validate, MIN_VALIDATION_TRIALS};
use uavnet::vse::{volume_spectral_efficiency, volume_spectral_efficiency_limit};

/// Coverage probability and volume spectral efficiency of a two-tier
/// network: UHF ground base stations plus mmWave UAV base stations.
#[derive(Parser)]
#[command(name = "uavnet", version)]
struct Cli {
    /// TOML configuration file (default: the bundled reference scenario)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `placement.h_o=15` or `beta_db=3`
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for sweep points and Monte Carlo trials (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file, written atomically with a sibling `.manifest.json` (default: stdout)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage probabilities p_u, p_g and p_cov at one configuration
    Coverage(PointArgs),
    /// Volume spectral efficiency V_u at one configuration
    Vse(PointArgs),
    /// Objectives along one parameter grid, one CSV row per point
    Sweep(SweepArgs),
    /// Maximise an objective over one parameter
    Optimize(OptimizeArgs),
    /// Monte Carlo estimates of p_u, p_g, p_cov and V_u
    Montecarlo(McArgs),
    /// Compare analytic values against Monte Carlo (exit 4 on failure)
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Analytic,
    Montecarlo,
    Both,
}

impl Mode {
    fn analytic(self) -> bool {
        self != Mode::Montecarlo
    }
    fn montecarlo(self) -> bool {
        self != Mode::Analytic
    }
    fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Montecarlo => "montecarlo",
            Mode::Both => "both",
        }
    }
}

#[derive(Args, Clone)]
struct McOpts {
    /// Monte Carlo trials
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// Monte Carlo seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Simulation window radius in meters for both tiers (default: per-tier)
    #[arg(long)]
    radius: Option<f64>,
    /// Simulate with an infinite UAV NLoS intercept, as the analytic model does
    #[arg(long)]
    analytic_matching: bool,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, value_enum, default_value_t = Mode::Analytic)]
    mode: Mode,
    /// Massive-array limit (deterministic serving gains)
    #[arg(long)]
    limit: bool,
    #[command(flatten)]
    mc: McOpts,
}

#[derive(Args)]
struct SweepArgs {
    /// Swept parameter: h_o, nu, lambda_ratio, lambda_u, beta, n_antennas_u, n_antennas_g
    #[arg(long)]
    param: String,
    /// Grid: `a,b,c`, `start:stop:step`, `lin:start:stop:n` or `log:start:stop:n`
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// p_u, p_g, p_cov, V_u or all
    #[arg(long, default_value = "all")]
    objective: String,
    #[arg(long, value_enum, default_value_t = Mode::Analytic)]
    mode: Mode,
    #[command(flatten)]
    mc: McOpts,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Search variable: h_o, nu, lambda_ratio, lambda_u or beta
    #[arg(long, default_value = "h_o")]
    variable: String,
    /// Lower end of the search interval
    #[arg(long, allow_hyphen_values = true)]
    lo: f64,
    /// Upper end of the search interval
    #[arg(long, allow_hyphen_values = true)]
    hi: f64,
    /// p_u, p_g, p_cov or V_u
    #[arg(long, default_value = "p_u")]
    objective: String,
    /// Tolerance on the argmax (relative for intensities)
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args)]
struct McArgs {
    /// Deterministic serving gains (the massive-array limit)
    #[arg(long)]
    limit: bool,
    #[command(flatten)]
    mc: McOpts,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    mc: McOpts,
    /// Absolute gap always tolerated; the bound is max(tol, 3 x half-width)
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
}

enum Failure {
    Usage(String),
    Numeric(String),
    Validation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Validation(_) => 4,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) | Failure::Validation(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// What a command produced plus the manifest details it collected.
struct Report {
    body: String,
    kind: &'static str,
    warnings: Vec<String>,
    extra: Value,
    timings: Vec<Value>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("uavnet: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let cfg = read_config(cli)?;
    let started = Instant::now();
    let (report, pass) = match &cli.command {
        Command::Coverage(a) => (point(&cfg, a, false)?, true),
        Command::Vse(a) => (point(&cfg, a, true)?, true),
        Command::Sweep(a) => (sweep(&cfg, a)?, true),
        Command::Optimize(a) => (optimize(&cfg, a)?, true),
        Command::Montecarlo(a) => (montecarlo(&cfg, a)?, true),
        Command::Validate(a) => validate(&cfg, a)?,
    };
    emit(cli, &cfg, report, started.elapsed().as_secs_f64())?;
    if !pass {
        return Err(Failure::Validation("analytic and Monte Carlo values disagree".into()));
    }
    Ok(())
}

fn read_config(cli: &Cli) -> Outcome<NetworkConfig> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?,
        None => TABLE1_TOML.to_string(),
    };
    let mut raw = RawConfig::parse(&text)?;
    for s in &cli.set {
        raw.set(s)?;
    }
    Ok(raw.build()?)
}

/// The configuration the analytic expressions see, with a warning when the
/// UAV NLoS intercept had to be made infinite.
fn analytic_view(cfg: &NetworkConfig, warnings: &mut Vec<String>) -> NetworkConfig {
    let (a, changed) = cfg.with_undetectable_uav_nlos();
    if changed {
        let w = format!(
            "analytic values treat uav.psi_nlos = {} as infinite (NLoS UAVs neither serve nor interfere)",
            cfg.uav.psi_nlos
        );
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    }
    a
}

fn mc_setup(cfg: &NetworkConfig, mc: &McOpts, limit: bool) -> Outcome<(NetworkConfig, SimOptions)> {
    if mc.trials < MIN_TRIALS {
        return Err(Failure::Usage(format!("--trials must be >= {MIN_TRIALS}")));
    }
    let c = if mc.analytic_matching { cfg.with_undetectable_uav_nlos().0 } else { *cfg };
    let mut opts = SimOptions::with_radius(&c, mc.radius);
    opts.deterministic_serving_gain = limit;
    Ok((c, opts))
}

fn mc_manifest(mc: &McOpts, opts: &SimOptions) -> Value {
    json!({
        "trials": mc.trials,
        "seed": mc.seed,
        "radius_uav_m": opts.radius_uav,
        "radius_ground_m": opts.radius_ground,
        "analytic_matching": mc.analytic_matching,
        "deterministic_serving_gain": opts.deterministic_serving_gain,
        "rng": "ChaCha8, key = seed, stream = trial index",
    })
}

/// Shortest round-trip digits; scientific notation outside `[1e-4, 1e6)`.
fn fmt(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e6).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Failure::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

fn point(cfg: &NetworkConfig, a: &PointArgs, vse: bool) -> Outcome<Report> {
    let mut warnings = Vec::new();
    let metrics: &[&str] = if vse { &["V_u"] } else { &["p_u", "p_g", "p_cov"] };
    let mut analytic: Vec<Option<std::result::Result<f64, String>>> = vec![None; metrics.len()];
    let mut method = String::new();
    if a.mode.analytic() {
        let c = analytic_view(cfg, &mut warnings);
        let values = if vse {
            let r = if a.limit { volume_spectral_efficiency_limit(&c) } else { volume_spectral_efficiency(&c) };
            r.map(|v| (v.method.as_str(), vec![v.value]))
        } else {
            let r = if a.limit { multicell_coverage_limit(&c) } else { multicell_coverage(&c) };
            r.map(|v| (v.method.as_str(), vec![v.p_u, v.p_g, v.p_cov]))
        };
        match values {
            Ok((m, xs)) => {
                method = m.to_string();
                analytic = xs.into_iter().map(|x| Some(Ok(x))).collect();
            }
            // without Monte Carlo columns there is nothing left to report
            Err(e) if !a.mode.montecarlo() => return Err(e.into()),
            Err(e) => analytic.iter_mut().for_each(|s| *s = Some(Err(e.to_string()))),
        }
    }
    let mut extra = json!({ "mode": a.mode.name(), "limit": a.limit });
    let mut estimates: Vec<Option<Estimate>> = vec![None; metrics.len()];
    if a.mode.montecarlo() {
        let (c, opts) = mc_setup(cfg, &a.mc, a.limit)?;
        let (cov, v) = estimate_all(&c, a.mc.trials, &opts, a.mc.seed)?;
        note_mc(&mut warnings, &cov, &v);
        estimates = if vse { vec![Some(v.vse)] } else { vec![Some(cov.p_u), Some(cov.p_g), Some(cov.p_cov)] };
        extra["montecarlo"] = mc_manifest(&a.mc, &opts);
    }
    let header: Vec<String> = ["metric", "method", "analytic", "mc_mean", "mc_half_width_95", "status"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = metrics
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let (value, status) = match &analytic[i] {
                Some(Ok(x)) => (fmt(*x), "ok".to_string()),
                Some(Err(e)) => (String::new(), e.clone()),
                None => (String::new(), "ok".to_string()),
            };
            let (mean, hw) =
                estimates[i].map_or((String::new(), String::new()), |e| (fmt(e.mean), fmt(e.half_width_95)));
            vec![m.to_string(), method.clone(), value, mean, hw, status]
        })
        .collect::<Vec<_>>();
    Ok(Report { body: csv_text(&header, &rows)?, kind: "csv", warnings, extra, timings: Vec::new() })
}

fn note_mc(warnings: &mut Vec<String>, cov: &CoverageEstimate, v: &VseEstimate) {
    if v.infinite_sinr_trials > 0 {
        warnings.push(format!("{} trials had an infinite UAV SINR and were left out of V_u", v.infinite_sinr_trials));
    }
    if cov.empty_tier_trials > 0 {
        warnings.push(format!(
            "{} trials had a tier without any serving node (counted as not covered)",
            cov.empty_tier_trials
        ));
    }
}

fn sweep(cfg: &NetworkConfig, a: &SweepArgs) -> Outcome<Report> {
    let parameter: SweepParameter = a.param.parse()?;
    let objective: Objective = a.objective.parse()?;
    let spec = SweepSpec::new(parameter, parse_grid(&a.grid)?, objective)?;
    let objectives = spec.objective.expand();
    let mut warnings = Vec::new();
    let base_analytic = analytic_view(cfg, &mut warnings);
    let mc = if a.mode.montecarlo() { Some(mc_setup(cfg, &a.mc, false)?) } else { None };

    let rows: Vec<(Vec<String>, f64, Option<String>)> = spec
        .grid
        .par_iter()
        .map(|&x| {
            let t0 = Instant::now();
            let mut cells = vec![fmt(x)];
            let mut status: Vec<String> = Vec::new();
            let mut mc_note = None;
            if a.mode.analytic() {
                match spec.parameter.apply(&base_analytic, x) {
                    Ok(c) => {
                        for o in &objectives {
                            match o.evaluate(&c) {
                                Ok(v) => cells.push(fmt(v)),
                                Err(e) => {
                                    cells.push(String::new());
                                    status.push(format!("{o}: {e}"));
                                }
                            }
                        }
                    }
                    Err(e) => {
                        cells.extend(objectives.iter().map(|_| String::new()));
                        status.push(e.to_string());
                    }
                }
            }
            if let Some((mc_cfg, _)) = &mc {
                let r = spec
                    .parameter
                    .apply(mc_cfg, x)
                    .and_then(|c| estimate_all(&c, a.mc.trials, &SimOptions::with_radius(&c, a.mc.radius), a.mc.seed));
                match r {
                    Ok((cov, v)) => {
                        if v.infinite_sinr_trials > 0 {
                            mc_note =
                                Some(format!("{x}: {} infinite-SINR trials left out of V_u", v.infinite_sinr_trials));
                        }
                        for o in &objectives {
                            let e = match o {
                                Objective::PU => cov.p_u,
                                Objective::PG => cov.p_g,
                                Objective::PCov => cov.p_cov,
                                _ => v.vse,
                            };
                            cells.push(fmt(e.mean));
                            cells.push(fmt(e.half_width_95));
                        }
                    }
                    Err(e) => {
                        cells.extend(objectives.iter().flat_map(|_| [String::new(), String::new()]));
                        status.push(format!("montecarlo: {e}"));
                    }
                }
            }
            cells.push(if status.is_empty() { "ok".to_string() } else { status.join("; ") });
            (cells, t0.elapsed().as_secs_f64(), mc_note)
        })
        .collect();

    let mut header = vec![spec.parameter.name().to_string()];
    if a.mode.analytic() {
        header.extend(objectives.iter().map(|o| o.name().to_string()));
    }
    if a.mode.montecarlo() {
        for o in &objectives {
            header.push(format!("{}_mc", o.name()));
            header.push(format!("{}_mc_half_width_95", o.name()));
        }
    }
    header.push("status".into());
    let failed = rows.iter().filter(|r| r.0.last().is_some_and(|s| s != "ok")).count();
    if failed > 0 {
        warnings.push(format!("{failed} of {} points failed; see the status column", rows.len()));
        eprintln!("uavnet: warning: {failed} sweep points failed");
    }
    warnings.extend(rows.iter().filter_map(|r| r.2.clone()));
    let timings = spec.grid.iter().zip(&rows).map(|(x, r)| json!({ "point": x, "seconds": r.1 })).collect();
    let body_rows: Vec<Vec<String>> = rows.into_iter().map(|r| r.0).collect();
    let mut extra = json!({
        "mode": a.mode.name(),
        "sweep": {
            "parameter": spec.parameter.name(),
            "unit": spec.parameter.unit(),
            "grid": spec.grid,
            "objective": spec.objective.name(),
        },
    });
    if let Some((_, opts)) = &mc {
        extra["montecarlo"] = mc_manifest(&a.mc, opts);
    }
    Ok(Report { body: csv_text(&header, &body_rows)?, kind: "csv", warnings, extra, timings })
}

fn optimize(cfg: &NetworkConfig, a: &OptimizeArgs) -> Outcome<Report> {
    let parameter: SweepParameter = a.variable.parse()?;
    let objective: Objective = a.objective.parse()?;
    if !(a.lo < a.hi) {
        return Err(Failure::Usage(format!("--lo ({}) must be below --hi ({})", a.lo, a.hi)));
    }
    let mut warnings = Vec::new();
    let c = analytic_view(cfg, &mut warnings);
    let r = maximize(&c, parameter, objective, a.lo, a.hi, a.tol)?;
    if r.multimodal {
        warnings.push("the pre-scan found more than one local maximum".into());
    }
    let body = json!({
        "variable": parameter.name(),
        "unit": parameter.unit(),
        "objective": objective.name(),
        "bounds": [a.lo, a.hi],
        "tol": a.tol,
        "argmax": r.argmax,
        "value": r.value,
        "evaluations": r.evaluations,
        "bracket": [r.bracket.0, r.bracket.1],
        "multimodal": r.multimodal,
    });
    Ok(Report { body: pretty(&body), kind: "json", warnings, extra: json!({}), timings: Vec::new() })
}

fn montecarlo(cfg: &NetworkConfig, a: &McArgs) -> Outcome<Report> {
    let (c, opts) = mc_setup(cfg, &a.mc, a.limit)?;
    let (cov, v) = estimate_all(&c, a.mc.trials, &opts, a.mc.seed)?;
    let mut warnings = Vec::new();
    note_mc(&mut warnings, &cov, &v);
    let header: Vec<String> =
        ["metric", "mc_mean", "mc_half_width_95", "trials"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = [("p_u", cov.p_u), ("p_g", cov.p_g), ("p_cov", cov.p_cov), ("V_u", v.vse)]
        .iter()
        .map(|(m, e)| vec![m.to_string(), fmt(e.mean), fmt(e.half_width_95), e.trials.to_string()])
        .collect();
    let extra = json!({ "montecarlo": mc_manifest(&a.mc, &opts) });
    Ok(Report { body: csv_text(&header, &rows)?, kind: "csv", warnings, extra, timings: Vec::new() })
}

fn validate(cfg: &NetworkConfig, a: &ValidateArgs) -> Outcome<(Report, bool)> {
    if a.mc.trials < MIN_VALIDATION_TRIALS {
        return Err(Failure::Usage(format!("validate needs --trials >= {MIN_VALIDATION_TRIALS}")));
    }
    let mut warnings = Vec::new();
    analytic_view(cfg, &mut warnings);
    let r = run_validate(cfg, a.mc.trials, a.mc.seed, a.tol, a.mc.radius)?;
    if r.infinite_sinr_trials > 0 {
        warnings.push(format!("{} trials had an infinite UAV SINR and were left out of V_u", r.infinite_sinr_trials));
    }
    let metrics: Vec<Value> = r
        .metrics
        .iter()
        .map(|m| match &m.analytic {
            Ok(x) => json!({ "metric": m.name, "analytic": x, "mc_mean": m.mc.mean,
                             "mc_half_width_95": m.mc.half_width_95, "gap": m.gap,
                             "tolerance": m.tolerance, "pass": m.pass }),
            Err(e) => json!({ "metric": m.name, "analytic": null, "mc_mean": m.mc.mean,
                              "mc_half_width_95": m.mc.half_width_95, "error": e, "pass": false }),
        })
        .collect();
    let i = &r.independence;
    let limits = match &r.limits {
        Ok(l) => json!({ "p_u": l.p_u, "p_u_limit": l.p_u_limit, "p_g": l.p_g, "p_g_limit": l.p_g_limit,
                         "finite_below_limit": l.consistent }),
        Err(e) => json!({ "error": e }),
    };
    let body = json!({
        "trials": r.trials,
        "seed": r.seed,
        "tolerance_floor": r.tolerance_floor,
        "metrics": metrics,
        "independence": { "p_cov_mc": i.p_cov, "p_u_times_p_g_mc": i.product, "gap": i.gap,
                          "tolerance": i.tolerance, "pass": i.pass },
        "massive_array": limits,
        "pass": r.pass,
    });
    let mc = McOpts { analytic_matching: true, ..a.mc.clone() };
    let extra = json!({ "montecarlo": mc_manifest(&mc, &r.opts) });
    Ok((Report { body: pretty(&body), kind: "json", warnings, extra, timings: Vec::new() }, r.pass))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn config_json(cfg: &NetworkConfig) -> Value {
    let n = |x: f64| if x.is_finite() { json!(x) } else { json!("inf") };
    let tier = |t: &uavnet::netmodel::TierRadio| {
        json!({ "tx_power": n(t.tx_power), "alpha": n(t.alpha), "psi_los": n(t.psi_los),
                "psi_nlos": n(t.psi_nlos), "n_antennas": t.n_antennas })
    };
    json!({
        "lambda_g": n(cfg.lambda_g),
        "lambda_u": n(cfg.lambda_u),
        "beta": n(cfg.beta),
        "noise_uav": n(cfg.noise_uav),
        "ground": tier(&cfg.ground),
        "uav": tier(&cfg.uav),
        "pattern": { "theta0": n(cfg.pattern.theta0), "phi0": n(cfg.pattern.phi0),
                     "delta_m": n(cfg.pattern.delta_m), "delta_s": n(cfg.pattern.delta_s) },
        "placement": { "h_o": n(cfg.placement.h_o), "nu": n(cfg.placement.nu), "h_max": n(cfg.placement.h_max) },
        "env": { "c1": n(cfg.env.c1), "c2": n(cfg.env.c2) },
    })
}

fn emit(cli: &Cli, cfg: &NetworkConfig, report: Report, seconds: f64) -> Outcome<()> {
    for w in &report.warnings {
        eprintln!("uavnet: warning: {w}");
    }
    let Some(out) = &cli.out else {
        print!("{}", report.body);
        return Ok(());
    };
    write_atomic(out, report.body.as_bytes())?;
    let mut manifest = json!({
        "tool": "uavnet",
        "version": env!("CARGO_PKG_VERSION"),
        "command": std::env::args().collect::<Vec<_>>(),
        "output": out.file_name().map(|s| s.to_string_lossy().into_owned()),
        "format": report.kind,
        "config": config_json(cfg),
        "config_source": cli.config.as_ref().map_or("bundled table1.toml".to_string(), |p| p.display().to_string()),
        "overrides": cli.set,
        "threads": rayon::current_num_threads(),
        "warnings": report.warnings,
        "seconds": seconds,
        "points": report.timings,
        "units": {
            "lambda_g": "1/m^2", "lambda_u": "1/m^2", "h_o": "m", "h_max": "m", "noise_uav": "W", "tx_power": "W",
            "psi_los": "linear", "psi_nlos": "linear", "theta0": "rad", "phi0": "rad",
            "p_u": "probability", "p_g": "probability", "p_cov": "probability", "V_u": "nats/s/Hz/m^3",
        },
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut manifest, report.extra) {
        m.extend(e);
    }
    write_atomic(&manifest_path(out), pretty(&manifest).as_bytes())
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Write to a temporary file in the target directory, then rename over it.
fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome<()> {
    let name = path.file_name().ok_or_else(|| Failure::Usage(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Failure::Io(format!("cannot write {}: {e}", path.display())));
    }
    Ok(())
}
