//! Command-line front end: model loading, subcommand dispatch and output
//! serialization. Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use taumc::coupling::{coupled_exact_tau, coupled_tau_pair};
use taumc::exact::{estimate_event_rate, simulate_exact, ExactConfig, DEFAULT_EVENT_BUDGET};
use taumc::mlmc::{self, AllocationMode, EstimatorKind, MlmcConfig, Observable};
use taumc::model::Model;
use taumc::modelfile;
use taumc::parallel::parallel_map;
use taumc::stats;
use taumc::streams::PathStreams;
use taumc::study::{self, PairKind, SweepConfig, SweepRow};
use taumc::tau::simulate_tau;
use taumc::trace::Record;

const TOOL: &str = "taumc";

#[derive(Parser, Debug)]
#[command(name = TOOL, version, about = "Reaction network simulation and multilevel Monte Carlo estimation", long_about = None)]
struct Cli {
    /// Master seed for all random streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = all cores). Results do not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate independent paths (exact or tau-leap) and write a CSV.
    Simulate(SimulateArgs),
    /// Simulate coupled path pairs and write their final states to a CSV.
    Couple(CoupleArgs),
    /// Run a multilevel Monte Carlo estimate and write a JSON report.
    Mlmc(MlmcArgs),
    /// Measure coupled-pair variances over an (N, h) grid.
    Sweep(SweepArgs),
    /// Fit a power law to a sweep CSV.
    Fit(FitArgs),
    /// Integrate the mean-field equations with the Euler scheme.
    Meanfield(MeanfieldArgs),
    /// Measure estimator cost against a ladder of accuracy targets.
    Complexity(ComplexityArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Method {
    Exact,
    Tau,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Kind {
    #[value(name = "tau-tau")]
    TauTau,
    #[value(name = "exact-tau")]
    ExactTau,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Estimator {
    Biased,
    Unbiased,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Allocation {
    Paper,
    Adaptive,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Stepsize; required for the tau method.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long = "t-end")]
    t_end: f64,
    #[arg(long, default_value_t = 1)]
    paths: u64,
    /// `none` or a grid step for trajectory recording.
    #[arg(long, default_value = "none")]
    record: String,
    #[arg(long = "event-budget", default_value_t = DEFAULT_EVENT_BUDGET)]
    event_budget: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CoupleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Ladder level of the fine (tau-tau) or tau (exact-tau) leg.
    #[arg(long)]
    level: u32,
    /// Grid refinement factor between neighboring levels.
    #[arg(long = "M", default_value_t = 3)]
    refinement: u32,
    #[arg(long)]
    pairs: u64,
    #[arg(long = "t-end")]
    t_end: f64,
    #[arg(long = "event-budget", default_value_t = DEFAULT_EVENT_BUDGET)]
    event_budget: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct MlmcArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    estimator: Estimator,
    #[arg(long)]
    eps: f64,
    #[arg(long = "M", default_value_t = 3)]
    refinement: u32,
    /// Observable: `X[<name>]` or `lin:<a1>,<a2>,...`.
    #[arg(long)]
    f: String,
    #[arg(long, value_enum, default_value_t = Allocation::Adaptive)]
    allocation: Allocation,
    /// Bias calibration: the finest stepsize satisfies `h_L <= theta * eps`.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long = "t-end")]
    t_end: f64,
    #[arg(long = "pilot", default_value_t = 100)]
    pilot_paths: u64,
    #[arg(long = "event-budget", default_value_t = DEFAULT_EVENT_BUDGET)]
    event_budget: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Comma-separated system sizes.
    #[arg(long = "N", value_delimiter = ',')]
    n_values: Vec<f64>,
    /// Comma-separated stepsizes.
    #[arg(long = "h", value_delimiter = ',')]
    h_values: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pairs: u64,
    #[arg(long = "M", default_value_t = 3)]
    refinement: u32,
    /// Observable; defaults to the first scaled coordinate.
    #[arg(long)]
    f: Option<String>,
    #[arg(long = "t-end")]
    t_end: f64,
    #[arg(long = "event-budget", default_value_t = DEFAULT_EVENT_BUDGET)]
    event_budget: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Sweep CSV produced by the `sweep` subcommand.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct MeanfieldArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    h: f64,
    #[arg(long = "t-end")]
    t_end: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ComplexityArgs {
    #[arg(long)]
    model: PathBuf,
    /// Re-instantiate the model family at this system size first.
    #[arg(long = "N")]
    system_size: Option<f64>,
    #[arg(long, value_enum)]
    estimator: Estimator,
    /// Comma-separated accuracy targets, largest first.
    #[arg(long = "eps", value_delimiter = ',')]
    eps_values: Vec<f64>,
    #[arg(long = "M", default_value_t = 3)]
    refinement: u32,
    #[arg(long = "t-end")]
    t_end: f64,
    #[arg(long)]
    out: PathBuf,
}

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = err.print();
                    ExitCode::from(1)
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<taumc::Error> for Failure {
    fn from(err: taumc::Error) -> Self {
        Failure::Runtime(err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Runtime(err.to_string())
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Simulate(args) => simulate(cli, args),
        Command::Couple(args) => couple(cli, args),
        Command::Mlmc(args) => run_mlmc(cli, args),
        Command::Sweep(args) => sweep(cli, args),
        Command::Fit(args) => fit(cli, args),
        Command::Meanfield(args) => meanfield(cli, args),
        Command::Complexity(args) => complexity(cli, args),
    }
}

fn load_model(path: &PathBuf) -> Result<Model, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    modelfile::parse(&text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

/// Provenance header echoed into every output file. Worker count is
/// deliberately omitted: results are independent of it by construction and
/// outputs must be byte-identical across worker counts.
fn provenance(cli: &Cli, config: &str) -> String {
    format!(
        "{TOOL} {} | {config} | seed {}",
        env!("CARGO_PKG_VERSION"),
        cli.seed
    )
}

#[derive(Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    config: String,
    seed: u64,
}

impl Provenance {
    fn new(cli: &Cli, config: String) -> Self {
        Self {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            config,
            seed: cli.seed,
        }
    }
}

fn write_output(path: &PathBuf, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn parse_record(text: &str) -> Result<Record, Failure> {
    if text == "none" {
        return Ok(Record::None);
    }
    text.parse::<f64>()
        .ok()
        .filter(|dt| *dt > 0.0 && dt.is_finite())
        .map(Record::Grid)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "--record expects `none` or a positive grid step, got `{text}`"
            ))
        })
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let record = parse_record(&args.record)?;
    let h = match (args.method, args.h) {
        (Method::Tau, None) => {
            return Err(Failure::Usage("--method tau requires --h".into()));
        }
        (Method::Exact, Some(_)) => {
            return Err(Failure::Usage("--h only applies to --method tau".into()));
        }
        (_, h) => h,
    };
    let config = format!(
        "simulate --model {} --method {} --t-end {} --paths {}{} --record {} --event-budget {}",
        args.model.display(),
        match args.method {
            Method::Exact => "exact",
            Method::Tau => "tau",
        },
        fmt(args.t_end),
        args.paths,
        h.map_or(String::new(), |h| format!(" --h {}", fmt(h))),
        args.record,
        args.event_budget,
    );

    let species = model.network.species().to_vec();
    let mut out = String::new();
    let _ = writeln!(out, "# {}", provenance(cli, &config));
    let recorded = record != Record::None;
    if recorded {
        let _ = writeln!(out, "path,time,{}", species.join(","));
    } else {
        let finals: Vec<String> = species.iter().map(|s| format!("final_{s}")).collect();
        let steps_col = if args.method == Method::Tau {
            ",steps"
        } else {
            ""
        };
        let _ = writeln!(out, "path,{},events{steps_col}", finals.join(","));
    }

    match args.method {
        Method::Exact => {
            let config_sim = ExactConfig::new(args.t_end)
                .with_record(record)
                .with_event_budget(args.event_budget);
            let paths = collect(parallel_map(args.paths, cli.workers, |i| {
                simulate_exact(&model, &config_sim, &PathStreams::new(cli.seed, 0, i))
            }))?;
            eprintln!(
                "initial event rate {:.6e}, exact-path cost scale {:.6e}",
                estimate_event_rate(&model),
                model.scaling.exact_cost_estimate()
            );
            for (i, path) in paths.iter().enumerate() {
                if let Some(traj) = &path.trajectory {
                    for (t, state) in traj {
                        let cells: Vec<String> = state.iter().map(|v| v.to_string()).collect();
                        let _ = writeln!(out, "{i},{},{}", fmt(*t), cells.join(","));
                    }
                } else {
                    let cells: Vec<String> =
                        path.final_state.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(out, "{i},{},{}", cells.join(","), path.event_count);
                }
            }
        }
        Method::Tau => {
            let h = h.expect("validated above");
            let paths = collect(parallel_map(args.paths, cli.workers, |i| {
                simulate_tau(
                    &model,
                    h,
                    args.t_end,
                    &PathStreams::new(cli.seed, 0, i),
                    record,
                )
            }))?;
            for (i, path) in paths.iter().enumerate() {
                if let Some(traj) = &path.trajectory {
                    for (t, state) in traj {
                        let cells: Vec<String> = state.iter().map(|v| v.to_string()).collect();
                        let _ = writeln!(out, "{i},{},{}", fmt(*t), cells.join(","));
                    }
                } else {
                    let cells: Vec<String> =
                        path.final_state.iter().map(|v| v.to_string()).collect();
                    let events: u64 = path.firings.iter().sum();
                    let _ = writeln!(out, "{i},{},{events},{}", cells.join(","), path.steps);
                }
            }
        }
    }
    write_output(&args.out, &out)
}

fn couple(cli: &Cli, args: &CoupleArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let config = format!(
        "couple --model {} --kind {} --level {} --M {} --pairs {} --t-end {} --event-budget {}",
        args.model.display(),
        match args.kind {
            Kind::TauTau => "tau-tau",
            Kind::ExactTau => "exact-tau",
        },
        args.level,
        args.refinement,
        args.pairs,
        fmt(args.t_end),
        args.event_budget,
    );
    let species = model.network.species();
    let fine_cols: Vec<String> = species.iter().map(|s| format!("fine_{s}")).collect();
    let coarse_cols: Vec<String> = species.iter().map(|s| format!("coarse_{s}")).collect();
    let mut out = String::new();
    let _ = writeln!(out, "# {}", provenance(cli, &config));
    let _ = writeln!(
        out,
        "pair,{},{},cost",
        fine_cols.join(","),
        coarse_cols.join(",")
    );

    let rows: Vec<(Vec<i64>, Vec<i64>, u64)> = match args.kind {
        Kind::TauTau => collect(parallel_map(args.pairs, cli.workers, |i| {
            coupled_tau_pair(
                &model,
                args.level,
                args.refinement,
                args.t_end,
                &PathStreams::new(cli.seed, args.level, i),
                Record::None,
            )
            .map(|p| (p.fine_final, p.coarse_final, p.cost))
        }))?,
        Kind::ExactTau => collect(parallel_map(args.pairs, cli.workers, |i| {
            coupled_exact_tau(
                &model,
                args.level,
                args.refinement,
                args.t_end,
                &PathStreams::new(cli.seed, args.level, i),
                args.event_budget,
                Record::None,
            )
            .map(|p| (p.exact_final, p.tau_final, p.cost))
        }))?,
    };
    for (i, (fine, coarse, cost)) in rows.iter().enumerate() {
        let f: Vec<String> = fine.iter().map(|v| v.to_string()).collect();
        let c: Vec<String> = coarse.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{i},{},{},{cost}", f.join(","), c.join(","));
    }
    write_output(&args.out, &out)
}

#[derive(Serialize)]
struct MlmcReport<'a> {
    provenance: &'a Provenance,
    estimate: f64,
    variance: f64,
    eps: f64,
    kind: &'a str,
    levels: &'a [mlmc::LevelStatistics],
    total_cost: u64,
    allocation_shortfall: bool,
}

fn run_mlmc(cli: &Cli, args: &MlmcArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let f =
        Observable::parse(&args.f, &model.network).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut config = MlmcConfig::new(args.t_end, args.eps);
    config.refinement = args.refinement;
    config.theta = args.theta;
    config.allocation = match args.allocation {
        Allocation::Paper => AllocationMode::Paper,
        Allocation::Adaptive => AllocationMode::Adaptive,
    };
    config.pilot_paths = args.pilot_paths;
    config.seed = cli.seed;
    config.workers = cli.workers;
    config.event_budget = args.event_budget;

    let kind = match args.estimator {
        Estimator::Biased => EstimatorKind::Biased,
        Estimator::Unbiased => EstimatorKind::Unbiased,
    };
    let estimate = mlmc::run(&model, &f, &config, kind)?;
    for warning in &estimate.warnings {
        eprintln!("warning: {warning}");
    }
    if estimate.allocation_shortfall {
        eprintln!(
            "warning: achieved variance {:.3e} exceeds eps^2 = {:.3e}",
            estimate.variance,
            args.eps * args.eps
        );
    }

    let config_str = format!(
        "mlmc --model {} --estimator {} --eps {} --M {} --f {} --allocation {} --theta {} --t-end {} --pilot {} --event-budget {}",
        args.model.display(),
        kind.label(),
        fmt(args.eps),
        args.refinement,
        args.f,
        match args.allocation {
            Allocation::Paper => "paper",
            Allocation::Adaptive => "adaptive",
        },
        fmt(args.theta),
        fmt(args.t_end),
        args.pilot_paths,
        args.event_budget,
    );
    let prov = Provenance::new(cli, config_str);
    let report = MlmcReport {
        provenance: &prov,
        estimate: estimate.estimate,
        variance: estimate.variance,
        eps: estimate.eps,
        kind: &estimate.kind,
        levels: &estimate.levels,
        total_cost: estimate.total_cost,
        allocation_shortfall: estimate.allocation_shortfall,
    };
    let json = serde_json::to_string(&report)
        .map_err(|e| Failure::Runtime(format!("serializing report: {e}")))?;
    println!(
        "{} estimate {} (variance {:.3e}, cost {})",
        estimate.kind, estimate.estimate, estimate.variance, estimate.total_cost
    );
    write_output(&args.out, &json)
}

fn sweep(cli: &Cli, args: &SweepArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let f = match &args.f {
        Some(text) => {
            Observable::parse(text, &model.network).map_err(|e| Failure::Usage(e.to_string()))?
        }
        None => Observable::Coordinate(0),
    };
    let kind = match args.kind {
        Kind::TauTau => PairKind::TauTau,
        Kind::ExactTau => PairKind::ExactTau,
    };
    let mut config = SweepConfig::new(args.t_end, args.pairs);
    config.refinement = args.refinement;
    config.seed = cli.seed;
    config.workers = cli.workers;
    config.event_budget = args.event_budget;

    let rows = study::variance_sweep(&model, &args.n_values, &args.h_values, kind, &f, &config)?;
    let config_str = format!(
        "sweep --model {} --kind {} --N {} --h {} --pairs {} --M {} --f {} --t-end {}",
        args.model.display(),
        kind.label(),
        join_floats(&args.n_values),
        join_floats(&args.h_values),
        args.pairs,
        args.refinement,
        args.f.as_deref().unwrap_or("X[first]"),
        fmt(args.t_end),
    );
    write_output(&args.out, &sweep_csv(&provenance(cli, &config_str), &rows))
}

fn join_floats(vals: &[f64]) -> String {
    vals.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(",")
}

fn sweep_csv(provenance: &str, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {provenance}");
    let _ = writeln!(out, "N,h,kind,pairs,variance,var_stderr,cost");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(r.n),
            fmt(r.h),
            r.kind.label(),
            r.pairs,
            fmt(r.variance),
            fmt(r.var_stderr),
            r.cost
        );
    }
    out
}

/// Parse the body of a sweep CSV (comments and header skipped).
fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, Failure> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("N,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Failure::Runtime(format!(
                "sweep CSV line {}: expected 7 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64, Failure> {
            fields[i]
                .parse()
                .map_err(|e| Failure::Runtime(format!("sweep CSV line {}: {e}", lineno + 1)))
        };
        rows.push(SweepRow {
            n: num(0)?,
            h: num(1)?,
            kind: PairKind::parse(fields[2]).map_err(|e| Failure::Runtime(e.to_string()))?,
            pairs: num(3)? as u64,
            variance: num(4)?,
            var_stderr: num(5)?,
            cost: num(6)? as u64,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct FitReport<'a> {
    provenance: &'a Provenance,
    #[serde(rename = "C")]
    coefficient: f64,
    a: f64,
    b: f64,
    residual_rms: f64,
}

fn fit(cli: &Cli, args: &FitArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", args.input.display())))?;
    let rows = parse_sweep_csv(&text)?;
    let fit = match study::fit_power_law(&rows) {
        Ok(fit) => fit,
        Err(taumc::Error::SingularDesign) => {
            eprintln!("warning: grid is singular in N; fitting the h exponent only");
            study::fit_power_law_in_h(&rows)?
        }
        Err(e) => return Err(e.into()),
    };
    let config_str = format!("fit --input {}", args.input.display());
    let prov = Provenance::new(cli, config_str);
    let report = FitReport {
        provenance: &prov,
        coefficient: fit.coefficient,
        a: fit.n_exponent,
        b: fit.h_exponent,
        residual_rms: fit.residual_rms,
    };
    println!(
        "variance ~ {:.4e} * N^{:.4} * h^{:.4} (log-space residual RMS {:.3e})",
        fit.coefficient, fit.n_exponent, fit.h_exponent, fit.residual_rms
    );
    let json = serde_json::to_string(&report)
        .map_err(|e| Failure::Runtime(format!("serializing report: {e}")))?;
    write_output(&args.out, &json)
}

fn meanfield(cli: &Cli, args: &MeanfieldArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let path = study::mean_field_euler(&model, args.h, args.t_end)?;
    let config_str = format!(
        "meanfield --model {} --h {} --t-end {}",
        args.model.display(),
        fmt(args.h),
        fmt(args.t_end),
    );
    let mut out = String::new();
    let _ = writeln!(out, "# {}", provenance(cli, &config_str));
    let _ = writeln!(out, "# scaled coordinates");
    let _ = writeln!(out, "time,{}", model.network.species().join(","));
    for (t, state) in path.times.iter().zip(&path.states) {
        let cells: Vec<String> = state.iter().map(|v| fmt(*v)).collect();
        let _ = writeln!(out, "{},{}", fmt(*t), cells.join(","));
    }
    write_output(&args.out, &out)
}

fn complexity(cli: &Cli, args: &ComplexityArgs) -> Result<(), Failure> {
    let mut model = load_model(&args.model)?;
    if let Some(n) = args.system_size {
        model = model.rescaled(n)?;
    }
    let kind = match args.estimator {
        Estimator::Biased => EstimatorKind::Biased,
        Estimator::Unbiased => EstimatorKind::Unbiased,
    };
    let rows = study::complexity_sweep(
        &model,
        &args.eps_values,
        kind,
        args.t_end,
        args.refinement,
        cli.seed,
        cli.workers,
    )?;
    let config_str = format!(
        "complexity --model {}{} --estimator {} --eps {} --M {} --t-end {}",
        args.model.display(),
        args.system_size
            .map_or(String::new(), |n| format!(" --N {}", fmt(n))),
        kind.label(),
        join_floats(&args.eps_values),
        args.refinement,
        fmt(args.t_end),
    );
    let mut out = String::new();
    let _ = writeln!(out, "# {}", provenance(cli, &config_str));
    let _ = writeln!(out, "eps,achieved_variance,total_cost");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt(r.eps),
            fmt(r.achieved_variance),
            r.total_cost
        );
    }
    if rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| (r.total_cost as f64).ln()).collect();
        let (_, slope) = stats::ols_line(&xs, &ys);
        println!("log-cost vs log-eps slope: {slope:.3}");
    }
    write_output(&args.out, &out)
}

fn collect<T>(results: Vec<Result<T, taumc::Error>>) -> Result<Vec<T>, Failure> {
    results
        .into_iter()
        .collect::<Result<Vec<T>, taumc::Error>>()
        .map_err(Failure::from)
}
