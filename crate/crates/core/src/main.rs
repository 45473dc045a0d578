//! Command-line interface to the enumerator.
//!
//! Exit codes: 0 on success, 1 when a bench expectation or selftest check
//! fails, 2 on usage or I/O errors (also clap's code for bad invocations).

use std::fmt;
use std::fs;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lexfact::selftest::{self, SelftestConfig};
use lexfact::{
    run_pool, Counter, Instance, ModuloMode, OutputFormat, PoolConfig, StreamConfig, Writer,
    DEFAULT_BUFFER_CAPACITY, DEFAULT_STEPS_BETWEEN_SPLITS,
};

#[derive(Parser)]
#[command(
    name = "lexfact",
    version,
    about = "Enumerate the factorization set of n over generators (g1, ..., gd): every \
             vector (a1, ..., ad) of nonnegative integers with a1*g1 + ... + ad*gd = n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count factorizations and report the elapsed time
    Count(RunArgs),
    /// Write every factorization, one per line
    List(ListArgs),
    /// Run a scenario file of expected counts and compare
    Bench(BenchArgs),
    /// Cross-check random instances against an exhaustive oracle
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Generators g1,...,gd: comma-separated positive integers, used in the
    /// order given (duplicates and common factors are legal)
    #[arg(
        long = "gens",
        value_name = "G1,G2,...",
        value_delimiter = ',',
        required = true
    )]
    generators: Vec<u64>,

    /// The element n to factor
    #[arg(long = "n", value_name = "N")]
    element: u64,
}

#[derive(Args)]
struct PoolArgs {
    /// Worker slots (default: available parallelism)
    #[arg(long, value_name = "W")]
    workers: Option<usize>,

    /// Per-worker buffer capacity, in factorizations
    #[arg(long, value_name = "CAP", default_value_t = DEFAULT_BUFFER_CAPACITY)]
    buffer: usize,

    /// Candidate steps each worker takes between redistribution barriers
    #[arg(long, value_name = "STEPS", default_value_t = DEFAULT_STEPS_BETWEEN_SPLITS)]
    steps_between_splits: usize,

    /// Modulo skip on the penultimate coordinate (auto: on for dimension >= 4)
    #[arg(long, value_enum, value_name = "MODE", default_value_t = ModuloArg::Auto)]
    modulo: ModuloArg,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    pool: PoolArgs,
}

#[derive(Args)]
struct ListArgs {
    #[command(flatten)]
    run: RunArgs,

    /// Sort output into descending lexicographic order (identical for every
    /// pool configuration; without it, arrival order varies across runs)
    #[arg(long)]
    sort: bool,

    /// Write to a file instead of standard output
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum, value_name = "FORMAT", default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario file: one `g1,g2,...;n;expectedCount` per line, `#` comments
    #[arg(value_name = "SCENARIOS")]
    scenarios: PathBuf,

    #[command(flatten)]
    pool: PoolArgs,
}

#[derive(Args)]
struct SelftestArgs {
    /// Random instances to sample (fixed edge cases always run in addition)
    #[arg(long, default_value_t = 100)]
    instances: usize,

    /// RNG seed; equal seeds reproduce identical instances
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Largest sampled dimension
    #[arg(long, value_name = "D", default_value_t = 5)]
    max_dimension: usize,

    /// Largest sampled generator
    #[arg(long, value_name = "G", default_value_t = 50)]
    max_generator: u64,

    /// Largest sampled element
    #[arg(long, value_name = "N", default_value_t = 2000)]
    max_element: u64,

    /// Pool widths to run every instance at
    #[arg(long, value_name = "W1,W2,...", value_delimiter = ',', default_values_t = vec![1, 4, 16])]
    worker_counts: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModuloArg {
    Auto,
    On,
    Off,
}

impl From<ModuloArg> for ModuloMode {
    fn from(arg: ModuloArg) -> ModuloMode {
        match arg {
            ModuloArg::Auto => ModuloMode::Auto,
            ModuloArg::On => ModuloMode::On,
            ModuloArg::Off => ModuloMode::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> OutputFormat {
        match arg {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Count(args) => count(&args),
        Command::List(args) => list(&args),
        Command::Bench(args) => bench(&args),
        Command::Selftest(args) => run_selftest(&args),
    }
}

/// Usage and I/O problems: report and exit 2.
fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn join<T: fmt::Display>(items: &[T], separator: &str) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(separator)
}

fn build_instance(args: &InstanceArgs) -> Result<Instance, String> {
    Instance::new(args.element, args.generators.clone()).map_err(|e| e.to_string())
}

fn build_pool_config(args: &PoolArgs) -> Result<PoolConfig, String> {
    if args.workers == Some(0) {
        return Err("--workers must be at least 1".to_string());
    }
    if args.buffer == 0 {
        return Err("--buffer must be at least 1".to_string());
    }
    if args.steps_between_splits == 0 {
        return Err("--steps-between-splits must be at least 1".to_string());
    }
    let mut config = PoolConfig {
        buffer_capacity: args.buffer,
        steps_between_splits: args.steps_between_splits,
        stream: StreamConfig {
            modulo: args.modulo.into(),
        },
        ..PoolConfig::default()
    };
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    Ok(config)
}

fn count(args: &RunArgs) -> ExitCode {
    let instance = match build_instance(&args.instance) {
        Ok(instance) => instance,
        Err(message) => return usage_error(&message),
    };
    let config = match build_pool_config(&args.pool) {
        Ok(config) => config,
        Err(message) => return usage_error(&message),
    };
    let start = Instant::now();
    match run_pool(&instance, config, Counter::new()) {
        Ok(count) => {
            println!("count={count} seconds={:.3}", start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(error) => usage_error(&error.to_string()),
    }
}

fn list(args: &ListArgs) -> ExitCode {
    let instance = match build_instance(&args.run.instance) {
        Ok(instance) => instance,
        Err(message) => return usage_error(&message),
    };
    let config = match build_pool_config(&args.run.pool) {
        Ok(config) => config,
        Err(message) => return usage_error(&message),
    };
    let format = args.format.into();
    let result = match &args.output {
        Some(path) => fs::File::create(path)
            .map_err(|e| format!("cannot create {}: {e}", path.display()))
            .and_then(|file| {
                let writer = Writer::new(
                    BufWriter::new(file),
                    instance.dimension(),
                    format,
                    args.sort,
                );
                run_pool(&instance, config, writer)
                    .map(drop)
                    .map_err(|e| e.to_string())
            }),
        None => {
            let stdout = io::stdout();
            let writer = Writer::new(
                BufWriter::new(stdout.lock()),
                instance.dimension(),
                format,
                args.sort,
            );
            run_pool(&instance, config, writer)
                .map(drop)
                .map_err(|e| e.to_string())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => usage_error(&message),
    }
}

#[derive(Debug)]
struct Scenario {
    line: usize,
    generators: Vec<u64>,
    element: u64,
    expected: u64,
}

fn parse_scenarios(text: &str) -> Result<Vec<Scenario>, String> {
    let mut scenarios = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(';').collect();
        if fields.len() != 3 {
            return Err(format!(
                "line {line}: expected 'g1,g2,...;n;expectedCount', found {} fields",
                fields.len()
            ));
        }
        let generators = fields[0]
            .split(',')
            .map(|token| {
                let token = token.trim();
                token
                    .parse::<u64>()
                    .map_err(|_| format!("line {line}: invalid generator '{token}'"))
            })
            .collect::<Result<Vec<u64>, String>>()?;
        let element = fields[1]
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("line {line}: invalid element '{}'", fields[1].trim()))?;
        let expected = fields[2]
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("line {line}: invalid expected count '{}'", fields[2].trim()))?;
        scenarios.push(Scenario {
            line,
            generators,
            element,
            expected,
        });
    }
    Ok(scenarios)
}

fn bench(args: &BenchArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.scenarios) {
        Ok(text) => text,
        Err(error) => {
            return usage_error(&format!(
                "cannot read {}: {error}",
                args.scenarios.display()
            ))
        }
    };
    let scenarios = match parse_scenarios(&text) {
        Ok(scenarios) => scenarios,
        Err(message) => return usage_error(&message),
    };
    if scenarios.is_empty() {
        return usage_error("scenario file contains no scenarios");
    }
    let config = match build_pool_config(&args.pool) {
        Ok(config) => config,
        Err(message) => return usage_error(&message),
    };
    println!(
        "{:<24} {:>10} {:>10} {:>10} {:>9}  status",
        "generators", "n", "expected", "got", "seconds"
    );
    let mut failures = 0usize;
    for scenario in &scenarios {
        let instance = match Instance::new(scenario.element, scenario.generators.clone()) {
            Ok(instance) => instance,
            Err(error) => return usage_error(&format!("line {}: {error}", scenario.line)),
        };
        let start = Instant::now();
        let got = match run_pool(&instance, config.clone(), Counter::new()) {
            Ok(got) => got,
            Err(error) => return usage_error(&error.to_string()),
        };
        let seconds = start.elapsed().as_secs_f64();
        let status = if got == scenario.expected {
            "pass"
        } else {
            failures += 1;
            "FAIL"
        };
        println!(
            "{:<24} {:>10} {:>10} {:>10} {:>9.3}  {}",
            join(&scenario.generators, ","),
            scenario.element,
            scenario.expected,
            got,
            seconds,
            status
        );
    }
    if failures > 0 {
        eprintln!("{failures} of {} scenarios failed", scenarios.len());
        ExitCode::FAILURE
    } else {
        println!("all {} scenarios passed", scenarios.len());
        ExitCode::SUCCESS
    }
}

fn run_selftest(args: &SelftestArgs) -> ExitCode {
    if args.max_dimension == 0 {
        return usage_error("--max-dimension must be at least 1");
    }
    if args.max_generator == 0 {
        return usage_error("--max-generator must be at least 1");
    }
    if args.worker_counts.is_empty() || args.worker_counts.contains(&0) {
        return usage_error("--worker-counts needs positive entries");
    }
    let config = SelftestConfig {
        instances: args.instances,
        seed: args.seed,
        max_dimension: args.max_dimension,
        max_generator: args.max_generator,
        max_element: args.max_element,
        worker_counts: args.worker_counts.clone(),
        ..SelftestConfig::default()
    };
    let report = selftest::run(&config);
    for failure in &report.failures {
        eprintln!(
            "FAIL n={} gens={}: {}",
            failure.element,
            join(&failure.generators, ","),
            failure.detail
        );
    }
    if report.passed() {
        println!(
            "ok: {} instances, W∈{{{}}}, modulo on/off",
            report.instances,
            join(&report.worker_counts, ",")
        );
        ExitCode::SUCCESS
    } else {
        eprintln!("{} checks failed", report.failures.len());
        ExitCode::FAILURE
    }
}
