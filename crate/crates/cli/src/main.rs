use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pinned_cli::checks::{ball_test_function, default_suite, run_check_suite};
use pinned_cli::config::{ConfigError, ExperimentConfig, ExperimentKind, MeasureSpec, PinSource};
use pinned_cli::experiments::run_pinned_dimension_experiment;
use pinned_cli::report::{experiment_tables, suite_tables, to_json_string, write_report, Table};
use pinned_core::kernels::{convolve_measure, lp_norm};
use pinned_core::measure::{dyadic_radii, frostman_constant, riesz_energy};
use pinned_core::pinned::{box_dimension_pinned, pin_measure};
use pinned_core::selection::{calibrate_c, energy_sum, select_points, CalibrationLimits};
use pinned_core::spherical::pin_profiles;
use pinned_core::{Grid, Kernel, RadiusGrid, Region, SamplingPlan, Selector};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "pinned", version, about = "Pinned distance set experiments and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configuration's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for the JSON report and its CSV companions.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// What goes to standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a measure from a generator spec.
    Generate,
    /// Riesz energy and ball-condition constant of a measure.
    Energy,
    /// Truncated Riesz kernel convolution on a grid.
    Convolve,
    /// Spherical average profiles of a ball indicator at a set of pins.
    Spherical,
    /// Pinned distance measure and its box dimension.
    Pindist,
    /// Exclusion-radius point selection.
    Select,
    /// Run a check suite (the default suite without a config).
    Check,
    /// Run a pinned-dimension experiment.
    Experiment,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnergyConfig {
    measure: MeasureSpec,
    alpha: f64,
    /// Defaults to the measure's resolution.
    #[serde(default)]
    floor: Option<f64>,
    #[serde(default)]
    plan: SamplingPlan,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConvolveConfig {
    measure: MeasureSpec,
    rho: f64,
    cutoff: f64,
    origin: Vec<f64>,
    spacing: f64,
    extents: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphericalConfig {
    dim: usize,
    /// The test function is the indicator of `B(0, 2^-scale)`.
    scale: u32,
    pins: PinSource,
    r0: f64,
    r1: f64,
    radii: usize,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default = "default_samples")]
    n_samples: usize,
    #[serde(default)]
    seed: u64,
}

fn default_samples() -> usize {
    256
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PindistConfig {
    measure: MeasureSpec,
    pin: Vec<f64>,
    #[serde(default)]
    window: Option<(f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectConfig {
    lambda: MeasureSpec,
    region: Region<f64>,
    alpha: f64,
    alpha_prime: f64,
    gamma: f64,
    n: usize,
    /// Calibrated when absent.
    #[serde(default)]
    c: Option<f64>,
    #[serde(default = "default_retries")]
    max_retries: usize,
    #[serde(default)]
    seed: u64,
}

fn default_retries() -> usize {
    10
}

struct Output {
    stem: &'static str,
    json: Value,
    tables: Vec<Table>,
    pass: bool,
}

fn load<T: for<'de> Deserialize<'de>>(path: Option<&Path>) -> Result<T, ConfigError> {
    let path = path.ok_or_else(|| ConfigError::Invalid("--config is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn coord_header(d: usize) -> Vec<String> {
    (0..d).map(|k| format!("x{k}")).collect()
}

fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn generate(cli: &Cli) -> Result<Output, ConfigError> {
    let mu = load::<MeasureSpec>(cli.config.as_deref())?.build()?;
    let mut header = coord_header(mu.dim());
    header.push("weight".into());
    let rows = mu.atoms().map(|(p, w)| p.iter().map(|&c| sci(c)).chain([sci(w)]).collect()).collect();
    Ok(Output {
        stem: "measure",
        json: serde_json::from_str(&mu.to_json()?)?,
        tables: vec![Table { name: "atoms".into(), header, rows }],
        pass: true,
    })
}

fn energy(cli: &Cli) -> Result<Output, ConfigError> {
    let mut cfg: EnergyConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.plan.seed = s;
    }
    let mu = cfg.measure.build()?;
    let floor = cfg.floor.or_else(|| mu.resolution()).unwrap_or(0.0);
    let e = riesz_energy(&mu, cfg.alpha, floor)?;
    let lo = mu.resolution().unwrap_or(1e-3);
    let radii = dyadic_radii(lo, mu.diameter_bound().max(2.0 * lo));
    let f = frostman_constant(&mu, cfg.alpha, &cfg.plan, &radii)?;
    Ok(Output {
        stem: "energy",
        json: json!({ "alpha": cfg.alpha, "floor": floor, "energy": e, "frostman": f }),
        tables: vec![],
        pass: true,
    })
}

fn convolve(cli: &Cli) -> Result<Output, ConfigError> {
    let cfg: ConvolveConfig = load(cli.config.as_deref())?;
    let mu = cfg.measure.build()?;
    let spec = Kernel::new(cfg.rho, cfg.cutoff, mu.dim())?;
    let template = Grid::zeros(cfg.origin, cfg.spacing, cfg.extents)?;
    let g = convolve_measure(&mu, &spec, &template)?;
    let mut header = coord_header(g.dim());
    header.push("value".into());
    let rows = (0..g.len()).map(|i| g.node(i).into_iter().chain([g.values()[i]]).map(sci).collect()).collect();
    Ok(Output {
        stem: "convolution",
        json: json!({ "kernel": spec, "l2_norm": lp_norm(&g, 2.0), "max": lp_norm(&g, f64::INFINITY) }),
        tables: vec![Table { name: "grid".into(), header, rows }],
        pass: true,
    })
}

fn spherical(cli: &Cli) -> Result<Output, ConfigError> {
    let mut cfg: SphericalConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let f = ball_test_function(cfg.dim, cfg.scale)?;
    let grid = RadiusGrid::new(cfg.r0, cfg.r1, cfg.radii)?;
    let delta = cfg.delta.unwrap_or_else(|| grid.default_delta(f.spacing()));
    let pins = cfg.pins.pins(cfg.seed)?;
    let profiles = pin_profiles(&f, &pins, &grid, delta, cfg.n_samples, cfg.seed)?;
    let mut header = coord_header(cfg.dim);
    header.extend(["radius".into(), "value".into()]);
    let rows = profiles
        .iter()
        .flat_map(|p| {
            p.radii.iter().zip(&p.values).map(|(&r, &v)| p.center.iter().copied().chain([r, v]).map(sci).collect())
        })
        .collect();
    Ok(Output {
        stem: "spherical",
        json: json!({ "delta": delta, "profiles": profiles }),
        tables: vec![Table { name: "profiles".into(), header, rows }],
        pass: true,
    })
}

fn pindist(cli: &Cli) -> Result<Output, ConfigError> {
    let cfg: PindistConfig = load(cli.config.as_deref())?;
    let mu = cfg.measure.build()?;
    let nu = pin_measure(&mu, &cfg.pin)?;
    let window = match cfg.window {
        Some(w) => Some(w),
        None => match (mu.resolution(), nu.distances.first(), nu.distances.last()) {
            (Some(res), Some(a), Some(b)) => Some((4.0 * res, (b - a) / 4.0)),
            _ => None,
        }
        .filter(|&(lo, hi)| hi > lo && dyadic_radii(lo, hi).len() >= 2),
    };
    let dimension = window.map(|w| box_dimension_pinned(&nu, Some(w))).transpose()?;
    let rows = nu.distances.iter().zip(&nu.weights).map(|(&d, &w)| vec![sci(d), sci(w)]).collect();
    Ok(Output {
        stem: "pindist",
        json: json!({ "pin": cfg.pin, "atoms": nu.len(), "total_mass": nu.total_mass(), "dimension": dimension }),
        tables: vec![Table { name: "distances".into(), header: vec!["distance".into(), "weight".into()], rows }],
        pass: true,
    })
}

fn select(cli: &Cli) -> Result<Output, ConfigError> {
    let mut cfg: SelectConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let lambda = cfg.lambda.build()?;
    let base = Selector { alpha: cfg.alpha, alpha_prime: cfg.alpha_prime, gamma: cfg.gamma, c: 0.0, n: cfg.n, seed: cfg.seed };
    let (c, calibration) = match cfg.c {
        Some(c) => (c, None),
        None => {
            let cal = calibrate_c(&lambda, &cfg.region, &base, &CalibrationLimits::default())?;
            (cal.c, Some(cal))
        }
    };
    let sel = select_points(&lambda, &cfg.region, &Selector { c, ..base }, cfg.max_retries)?;
    let energy = if sel.points.len() >= 2 { Some(energy_sum(&sel.points, cfg.gamma, 0.0)?) } else { None };
    let mut header = coord_header(lambda.dim());
    header.extend(["eta".into(), "alive_mass".into()]);
    let rows = sel
        .points
        .iter()
        .zip(sel.etas.iter().zip(&sel.restricted_masses))
        .map(|(p, (&e, &m))| p.iter().copied().chain([e, m]).map(sci).collect())
        .collect();
    Ok(Output {
        stem: "selection",
        json: json!({ "c": c, "calibration": calibration, "selection": sel, "energy": energy }),
        tables: vec![Table { name: "points".into(), header, rows }],
        pass: true,
    })
}

fn check(cli: &Cli) -> Result<Output, ConfigError> {
    let specs = match cli.config.as_deref() {
        None => default_suite(),
        Some(path) => {
            let cfg = ExperimentConfig::from_path(path)?;
            if cfg.experiment != ExperimentKind::Checks {
                return Err(ConfigError::Invalid("check expects a config with experiment \"checks\"".into()));
            }
            cfg.checks
        }
    };
    let report = run_check_suite(&specs);
    Ok(Output { stem: "checks", json: serde_json::to_value(&report)?, tables: suite_tables(&report), pass: report.pass })
}

fn experiment(cli: &Cli) -> Result<Output, ConfigError> {
    let path = cli.config.as_deref().ok_or_else(|| ConfigError::Invalid("--config is required".into()))?;
    let mut cfg = ExperimentConfig::from_path(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cfg.experiment == ExperimentKind::Checks {
        let report = run_check_suite(&cfg.checks);
        return Ok(Output {
            stem: "checks",
            json: serde_json::to_value(&report)?,
            tables: suite_tables(&report),
            pass: report.pass,
        });
    }
    let report = run_pinned_dimension_experiment(&cfg)?;
    Ok(Output {
        stem: "experiment",
        json: serde_json::to_value(&report)?,
        tables: experiment_tables(&report),
        pass: report.pass,
    })
}

fn run(cli: &Cli) -> Result<Output, ConfigError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate => generate(cli),
        Command::Energy => energy(cli),
        Command::Convolve => convolve(cli),
        Command::Spherical => spherical(cli),
        Command::Pindist => pindist(cli),
        Command::Select => select(cli),
        Command::Check => check(cli),
        Command::Experiment => experiment(cli),
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<(), ConfigError> {
    if let Some(dir) = &cli.out {
        write_report(dir, out.stem, &out.json, &out.tables)?;
    }
    let text = match cli.format {
        Format::Json => to_json_string(&out.json)?,
        Format::Csv => {
            let mut s = String::new();
            for (i, t) in out.tables.iter().enumerate() {
                if out.tables.len() > 1 {
                    if i > 0 {
                        s.push('\n');
                    }
                    s.push_str(&format!("# {}\n", t.name));
                }
                s.push_str(&t.to_csv_string()?);
            }
            s
        }
    };
    std::io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|source| ConfigError::Io { path: "stdout".into(), source })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| emit(&cli, &out).map(|_| out.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
