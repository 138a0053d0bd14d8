use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use cfdo::chaos::{ChaoticGenerator, MapKind, DEFAULT_SEED};
use cfdo::experiment::{
    run_experiment, write_csv, write_json, Algorithm, AlgorithmParseError, ExperimentConfig,
    ExperimentError,
};
use cfdo::fdo::{optimize, BoundaryPolicy, FdoConfig, RunRecord};
use cfdo::problems::{brute_force_assignment, vessel_campaign, AssignmentInstance, InstanceError};

#[derive(Parser)]
#[command(
    name = "cfdo",
    version,
    about = "Fitness dependent optimizer experiment driver"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimization and print its best-so-far trace
    Run(RunArgs),
    /// Run a multi-algorithm comparison and emit a report table
    Compare(CompareArgs),
    /// Print iterates of one chaotic map
    MapsDump(MapsDumpArgs),
    /// Solve an assignment instance exactly by enumeration
    OracleAssignment(OracleArgs),
    /// Run the pressure-vessel design campaign with a feasibility report
    Vessel(VesselArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Plain-text key=value defaults; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Objective: a registry function, "vessel", or "assignment"
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    wf: Option<f64>,
    /// Out-of-bounds repair: redraw or clamp
    #[arg(long)]
    boundary: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Thread count for parallel runs
    #[arg(long)]
    workers: Option<usize>,
    /// Pressure-vessel penalty weight
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// fdo, cfdo, cfdo:<map>, or cfdo-<map>
    #[arg(long)]
    algo: Option<String>,
    /// Chaotic map for cfdo
    #[arg(long)]
    map: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Repeatable; first entry is the baseline (default: fdo, cfdo)
    #[arg(long)]
    algo: Vec<String>,
    /// Chaotic map for bare cfdo entries (default singer)
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MapsDumpArgs {
    #[arg(long)]
    map: Option<String>,
    /// How many iterates to print
    #[arg(long)]
    count: Option<usize>,
    /// Map seed in the open native range
    #[arg(long)]
    seed: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file: first line n, then n rows of n costs (default: bundled)
    instance: Option<PathBuf>,
}

#[derive(Args)]
struct VesselArgs {
    /// fdo, cfdo, cfdo:<map>, or cfdo-<map> (default cfdo)
    #[arg(long)]
    algo: Option<String>,
    /// Chaotic map for cfdo (default singer)
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

enum CliError {
    /// Bad flags or config: exit 2
    Usage(String),
    /// Failure while running: exit 1
    Runtime(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Io(_) | ExperimentError::ThreadPool(_) => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::MapsDump(args) => cmd_maps_dump(args),
        Command::OracleAssignment(args) => cmd_oracle(args),
        Command::Vessel(args) => cmd_vessel(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

const CONFIG_KEYS: [&str; 14] = [
    "algo", "map", "fn", "pop", "iters", "runs", "seed", "wf", "boundary", "out", "format",
    "workers", "lambda", "count",
];

/// key=value lines; # starts a comment; unknown keys are rejected.
fn load_config(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("--config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::usage(format!(
                "--config {}:{}: expected key=value, got {:?}",
                path.display(),
                idx + 1,
                line
            )));
        };
        let key = key.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(format!(
                "--config {}:{}: unknown key {:?}; valid keys: {}",
                path.display(),
                idx + 1,
                key,
                CONFIG_KEYS.join(", ")
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: FromStr>(raw: &str, key: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| CliError::usage(format!("--{key} {raw:?}: {e}")))
}

/// Fill a flag that was not given from the config file, parsing the raw text.
fn fill<T: FromStr>(
    slot: &mut Option<T>,
    file: &HashMap<String, String>,
    key: &str,
) -> Result<(), CliError>
where
    T::Err: std::fmt::Display,
{
    if slot.is_none() {
        if let Some(raw) = file.get(key) {
            *slot = Some(parse_value(raw, key)?);
        }
    }
    Ok(())
}

impl CommonArgs {
    fn merge_config(&mut self) -> Result<HashMap<String, String>, CliError> {
        let file = match &self.config {
            Some(path) => load_config(path)?,
            None => HashMap::new(),
        };
        if self.function.is_none() {
            if let Some(raw) = file.get("fn") {
                self.function = Some(raw.clone());
            }
        }
        fill(&mut self.pop, &file, "pop")?;
        fill(&mut self.iters, &file, "iters")?;
        fill(&mut self.seed, &file, "seed")?;
        fill(&mut self.wf, &file, "wf")?;
        fill(&mut self.workers, &file, "workers")?;
        fill(&mut self.lambda, &file, "lambda")?;
        if self.boundary.is_none() {
            self.boundary = file.get("boundary").cloned();
        }
        if self.out.is_none() {
            self.out = file.get("out").map(PathBuf::from);
        }
        if self.format.is_none() {
            self.format = file.get("format").cloned();
        }
        Ok(file)
    }

    fn boundary_policy(&self) -> Result<BoundaryPolicy, CliError> {
        match &self.boundary {
            None => Ok(BoundaryPolicy::default()),
            Some(raw) => raw
                .parse::<BoundaryPolicy>()
                .map_err(|e| CliError::usage(format!("--boundary: {e}"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

fn parse_format(raw: &Option<String>) -> Result<OutputFormat, CliError> {
    match raw.as_deref() {
        None | Some("csv") => Ok(OutputFormat::Csv),
        Some("json") => Ok(OutputFormat::Json),
        Some(other) => Err(CliError::usage(format!(
            "--format {other:?}: use csv or json"
        ))),
    }
}

fn parse_map_flag(raw: &str) -> Result<MapKind, CliError> {
    raw.parse::<MapKind>()
        .map_err(|e| CliError::usage(format!("--map: {e}")))
}

/// One algorithm from --algo and --map. --map only combines with cfdo.
fn resolve_single_algo(
    algo: &Option<String>,
    map: &Option<String>,
    default: Algorithm,
) -> Result<Algorithm, CliError> {
    let map_kind = map.as_deref().map(parse_map_flag).transpose()?;
    match algo.as_deref() {
        None => match map_kind {
            Some(m) => Ok(Algorithm::Cfdo(m)),
            None => Ok(default),
        },
        Some(raw) if raw.eq_ignore_ascii_case("fdo") => match map {
            Some(m) => Err(CliError::usage(format!(
                "--algo fdo does not take --map {m}; drop --map or use --algo cfdo"
            ))),
            None => Ok(Algorithm::Fdo),
        },
        Some(raw) if raw.eq_ignore_ascii_case("cfdo") => {
            Ok(Algorithm::Cfdo(map_kind.unwrap_or(MapKind::Singer)))
        }
        Some(raw) => {
            let parsed = raw
                .parse::<Algorithm>()
                .map_err(|e| CliError::usage(format!("--algo: {e}")))?;
            if map.is_some() {
                return Err(CliError::usage(format!(
                    "--algo {raw} already names a map; drop --map"
                )));
            }
            Ok(parsed)
        }
    }
}

/// The comparison list. Bare "cfdo" entries take --map (default singer);
/// --map with no bare cfdo entry is a conflict.
fn resolve_algo_list(
    entries: &[String],
    map: &Option<String>,
) -> Result<Vec<Algorithm>, CliError> {
    let map_kind = map.as_deref().map(parse_map_flag).transpose()?;
    let defaults = ["fdo".to_string(), "cfdo".to_string()];
    let entries: &[String] = if entries.is_empty() { &defaults } else { entries };
    let mut out = Vec::with_capacity(entries.len());
    let mut map_used = false;
    for raw in entries {
        if raw.eq_ignore_ascii_case("cfdo") {
            map_used = true;
            out.push(Algorithm::Cfdo(map_kind.unwrap_or(MapKind::Singer)));
            continue;
        }
        match raw.parse::<Algorithm>() {
            Ok(algo) => out.push(algo),
            Err(AlgorithmParseError::MissingMap) => unreachable!("bare cfdo handled above"),
            Err(e) => return Err(CliError::usage(format!("--algo: {e}"))),
        }
    }
    if map.is_some() && !map_used {
        return Err(CliError::usage(
            "--map only applies to a bare cfdo entry; --algo never names one".to_string(),
        ));
    }
    Ok(out)
}

fn write_report_to(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

fn cmd_run(mut args: RunArgs) -> Result<(), CliError> {
    let file = args.common.merge_config()?;
    if args.algo.is_none() {
        args.algo = file.get("algo").cloned();
    }
    if args.map.is_none() {
        args.map = file.get("map").cloned();
    }
    let algo = resolve_single_algo(&args.algo, &args.map, Algorithm::Fdo)?;
    let format = parse_format(&args.common.format)?;
    let function = args.common.function.clone().unwrap_or_else(|| "F4".into());
    let lambda = args.common.lambda.unwrap_or(1e6);
    let objective = cfdo::experiment::resolve_objective(&function, lambda)?;

    let mut config = match algo {
        Algorithm::Fdo => FdoConfig::fdo(
            args.common.pop.unwrap_or(30),
            args.common.iters.unwrap_or(50),
            args.common.seed.unwrap_or(0),
        ),
        Algorithm::Cfdo(map) => FdoConfig::cfdo(
            map,
            args.common.pop.unwrap_or(30),
            args.common.iters.unwrap_or(50),
            args.common.seed.unwrap_or(0),
        ),
    };
    config.wf = args.common.wf.unwrap_or(0.0);
    config.boundary_policy = args.common.boundary_policy()?;
    config
        .validate()
        .map_err(|e| CliError::usage(e.to_string()))?;

    let record = optimize(&config, objective.as_ref());
    let rendered = render_run(&record, format);
    match &args.common.out {
        Some(path) => write_report_to(path, rendered.as_bytes())?,
        None => print!("{rendered}"),
    }
    eprintln!(
        "{} on {function}: final_best={} evaluations={} seed={}",
        algo.label(),
        record.final_best_fitness,
        record.evaluations,
        record.seed
    );
    Ok(())
}

fn render_run(record: &RunRecord, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut s = String::from("iteration,best\n");
            for (i, best) in record.trace.iter().enumerate() {
                s.push_str(&format!("{},{}\n", i + 1, best));
            }
            s
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(record).expect("serializable record");
            s.push('\n');
            s
        }
    }
}

fn cmd_compare(mut args: CompareArgs) -> Result<(), CliError> {
    let file = args.common.merge_config()?;
    if args.algo.is_empty() {
        if let Some(raw) = file.get("algo") {
            args.algo = raw
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
        }
    }
    if args.map.is_none() {
        args.map = file.get("map").cloned();
    }
    fill(&mut args.runs, &file, "runs")?;

    let config = ExperimentConfig {
        algorithms: resolve_algo_list(&args.algo, &args.map)?,
        objective: args.common.function.clone().unwrap_or_else(|| "F4".into()),
        population: args.common.pop.unwrap_or(30),
        iterations: args.common.iters.unwrap_or(50),
        runs: args.runs.unwrap_or(30),
        base_seed: args.common.seed.unwrap_or(0),
        wf: args.common.wf.unwrap_or(0.0),
        boundary_policy: args.common.boundary_policy()?,
        lambda: args.common.lambda.unwrap_or(1e6),
        workers: args.common.workers,
    };
    let format = parse_format(&args.common.format)?;
    if config.runs < 2 {
        eprintln!("note: insufficient runs for statistics; std and p_value stay empty");
    }

    let report = run_experiment(&config)?;
    let mut bytes = Vec::new();
    match format {
        OutputFormat::Csv => write_csv(&report, &mut bytes),
        OutputFormat::Json => write_json(&report, &mut bytes),
    }
    .map_err(|e| CliError::runtime(e.to_string()))?;
    match &args.common.out {
        Some(path) => write_report_to(path, &bytes)?,
        None => {
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::runtime(e.to_string()))?;
        }
    }
    Ok(())
}

fn cmd_maps_dump(mut args: MapsDumpArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => load_config(path)?,
        None => HashMap::new(),
    };
    if args.map.is_none() {
        args.map = file.get("map").cloned();
    }
    fill(&mut args.count, &file, "count")?;
    fill(&mut args.seed, &file, "seed")?;

    let Some(raw_map) = &args.map else {
        return Err(CliError::usage("--map is required, e.g. --map logistic".to_string()));
    };
    let kind = parse_map_flag(raw_map)?;
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let mut gen = ChaoticGenerator::with_initial(kind, seed)
        .map_err(|e| CliError::usage(format!("--seed: {e}")))?;
    let mut stdout = std::io::stdout().lock();
    for _ in 0..args.count.unwrap_or(10) {
        writeln!(stdout, "{}", gen.next()).map_err(|e| CliError::runtime(e.to_string()))?;
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let instance = match &args.instance {
        Some(path) => AssignmentInstance::from_file(path).map_err(|e| match e {
            InstanceError::Io { .. } => CliError::runtime(e.to_string()),
            _ => CliError::usage(e.to_string()),
        })?,
        None => AssignmentInstance::bundled(),
    };
    let (perm, cost) =
        brute_force_assignment(&instance).map_err(|e| CliError::usage(e.to_string()))?;
    let perm_text = perm
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",");
    println!("cost={cost} perm={perm_text}");
    Ok(())
}

fn cmd_vessel(mut args: VesselArgs) -> Result<(), CliError> {
    let file = args.common.merge_config()?;
    if args.algo.is_none() {
        args.algo = file.get("algo").cloned();
    }
    if args.map.is_none() {
        args.map = file.get("map").cloned();
    }
    fill(&mut args.runs, &file, "runs")?;

    let algo = resolve_single_algo(&args.algo, &args.map, Algorithm::Cfdo(MapKind::Singer))?;
    let format = parse_format(&args.common.format)?;
    let runs = args.runs.unwrap_or(30);
    let lambda = args.common.lambda.unwrap_or(1e6);
    if runs == 0 {
        return Err(CliError::usage("--runs must be at least 1".to_string()));
    }

    let mut base = match algo {
        Algorithm::Fdo => FdoConfig::fdo(
            args.common.pop.unwrap_or(30),
            args.common.iters.unwrap_or(2000),
            args.common.seed.unwrap_or(0),
        ),
        Algorithm::Cfdo(map) => FdoConfig::cfdo(
            map,
            args.common.pop.unwrap_or(30),
            args.common.iters.unwrap_or(2000),
            args.common.seed.unwrap_or(0),
        ),
    };
    base.wf = args.common.wf.unwrap_or(0.0);
    base.boundary_policy = args.common.boundary_policy()?;
    base.validate().map_err(|e| CliError::usage(e.to_string()))?;

    let report = match args.common.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::runtime(e.to_string()))?
            .install(|| vessel_campaign(&base, runs, lambda)),
        None => vessel_campaign(&base, runs, lambda),
    };

    let rendered = match format {
        OutputFormat::Csv => {
            let mut s = String::from("seed,penalized_best,evaluations,feasible_cost\n");
            for o in &report.outcomes {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    o.seed,
                    o.penalized_best,
                    o.evaluations,
                    o.feasible.map(|f| f.cost.to_string()).unwrap_or_default()
                ));
            }
            s
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("serializable report");
            s.push('\n');
            s
        }
    };
    match &args.common.out {
        Some(path) => write_report_to(path, rendered.as_bytes())?,
        None => print!("{rendered}"),
    }

    let feasible_runs = report.outcomes.iter().filter(|o| o.feasible.is_some()).count();
    eprintln!("feasible_runs={feasible_runs}/{runs}");
    match &report.best {
        Some(best) => {
            let [x1, x2, x3, x4] = best.solution.as_array();
            let [g1, g2, g3, g4] = best.constraints;
            eprintln!("best_cost={}", best.cost);
            eprintln!("best_design={x1},{x2},{x3},{x4}");
            eprintln!("best_constraints={g1},{g2},{g3},{g4}");
        }
        None => eprintln!("no feasible design found"),
    }
    Ok(())
}
