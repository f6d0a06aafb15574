use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fdlab::models::Instance;
use fdlab::propagate::QueuePolicy;
use fdlab::{BnBMode, BoolMode, RestoreMode, SolveMode, SumMode};
use fdlab_bench::config::{ConfigError, RunConfig, DEFAULT_RUNS};
use fdlab_bench::data;
use fdlab_bench::emit::{emit, Format};
use fdlab_bench::runner::{run_matrix, Outcome, RunRecord};
use fdlab_bench::suites::{self, Suite};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "fdlab", version, about = "Finite-domain solver benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more instances under a single configuration.
    Run(RunArgs),
    /// Compare built model sizes with the published counts.
    Counts,
    /// Run a preset experiment matrix and print its ratio tables.
    Sweep(SweepArgs),
    /// Print reference backtrack counts of another solver (not asserted).
    RefBacktracks,
}

#[derive(Clone, Copy, ValueEnum)]
enum RestoreArg {
    Trail,
    Copy,
    CopyRecompute,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueueArg {
    Fifo,
    Priority,
    Reversed,
}

#[derive(Clone, Copy, ValueEnum)]
enum SumArg {
    Native,
    Decomposed,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoolArg {
    Native,
    Int,
}

#[derive(Clone, Copy, ValueEnum)]
enum BnbArg {
    Post,
    Tighten,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Boolint,
    Copy,
    Trail,
    Manyvars,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Write rows here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Run configurations one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Instance such as `queens:8` or `golfers:2,4,4`; repeatable.
    #[arg(long = "model", required = true)]
    models: Vec<String>,
    #[arg(long, value_enum, default_value = "trail")]
    restore: RestoreArg,
    #[arg(long, default_value_t = 8)]
    rec_dist: u32,
    #[arg(long, default_value_t = 2)]
    adapt_dist: u32,
    #[arg(long, value_enum, default_value = "priority")]
    queue: QueueArg,
    #[arg(long, value_enum, default_value = "native")]
    sum_eq: SumArg,
    #[arg(long, value_enum, default_value = "native")]
    bool_vars: BoolArg,
    #[arg(long, value_enum, default_value = "post")]
    bnb: BnbArg,
    /// Use the padded model variant.
    #[arg(long)]
    ext: bool,
    /// Enumerate every solution instead of stopping at the first.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    node_limit: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Use the large instance lists (slow).
    #[arg(long)]
    full: bool,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args),
        Command::Counts => counts(),
        Command::Sweep(args) => sweep(args),
        Command::RefBacktracks => ref_backtracks(),
    }
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn run_configs(args: &RunArgs) -> Result<Vec<RunConfig>, ConfigError> {
    let restore = match args.restore {
        RestoreArg::Trail => RestoreMode::Trail,
        RestoreArg::Copy => RestoreMode::Copy,
        RestoreArg::CopyRecompute => RestoreMode::copy_recompute(args.rec_dist, args.adapt_dist)?,
    };
    let queue = match args.queue {
        QueueArg::Fifo => QueuePolicy::Fifo,
        QueueArg::Priority => QueuePolicy::Priority,
        QueueArg::Reversed => QueuePolicy::ReversedPriority,
    };
    let sum = match args.sum_eq {
        SumArg::Native => SumMode::NativeEquals,
        SumArg::Decomposed => SumMode::Decomposed,
    };
    let bool_mode = match args.bool_vars {
        BoolArg::Native => BoolMode::NativeBool,
        BoolArg::Int => BoolMode::IntZeroOne,
    };
    let bnb = match args.bnb {
        BnbArg::Post => BnBMode::PostConstraint,
        BnbArg::Tighten => BnBMode::TightenBound,
    };
    let solve_mode = if args.all { SolveMode::All } else { SolveMode::First };
    args.models
        .iter()
        .map(|m| {
            let instance = Instance::new(m.parse()?)
                .extended(args.ext)
                .with_bool_mode(bool_mode)
                .with_sum_mode(sum);
            let mut cfg = RunConfig::new(instance)
                .with_restore(restore)
                .with_queue(queue)
                .with_bnb(bnb)
                .with_solve_mode(solve_mode)
                .with_runs(args.output.runs);
            cfg.node_limit = args.node_limit;
            cfg.validate()?;
            Ok(cfg)
        })
        .collect()
}

fn format(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

/// Runs the matrix and writes rows. Errors are reported and mapped to an
/// exit code; `Ok` carries the successful records.
fn execute(configs: &[RunConfig], output: &OutputArgs) -> Result<Vec<RunRecord>, ExitCode> {
    let mut records = Vec::new();
    let mut failed = false;
    for result in run_matrix(configs, output.sequential) {
        match result {
            Ok(r) => records.push(r),
            Err(e) => {
                eprintln!("error: {e}");
                failed = true;
            }
        }
    }
    if failed {
        return Err(ExitCode::from(EXIT_CONFIG));
    }
    if let Err(e) = emit(&records, format(output.format), output.out.as_deref()) {
        return Err(config_error(e));
    }
    Ok(records)
}

fn run(args: RunArgs) -> ExitCode {
    let configs = match run_configs(&args) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let records = match execute(&configs, &args.output) {
        Ok(r) => r,
        Err(code) => return code,
    };
    if records.iter().any(|r| r.outcome == Outcome::Infeasible) {
        ExitCode::from(EXIT_INFEASIBLE)
    } else {
        ExitCode::SUCCESS
    }
}

fn counts() -> ExitCode {
    let checks = match data::check_counts() {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    println!("instance,variables,published_variables,constraints_native,published_native,constraints_decomposed,published_decomposed,ok");
    let mut bad = 0;
    for c in &checks {
        let (a, e) = (c.actual, c.expected);
        println!(
            "{},{},{},{},{},{},{},{}",
            c.instance,
            a.variables,
            e.variables,
            a.constraints_native,
            e.constraints_native,
            a.constraints_decomposed,
            e.constraints_decomposed,
            c.matches()
        );
        bad += usize::from(!c.matches());
    }
    if bad > 0 {
        eprintln!("{bad} of {} instances differ from the published counts", checks.len());
        return ExitCode::from(EXIT_CONFIG);
    }
    ExitCode::SUCCESS
}

fn sweep(args: SweepArgs) -> ExitCode {
    let suite = match args.suite {
        SuiteArg::Boolint => Suite::BoolInt,
        SuiteArg::Copy => Suite::Copy,
        SuiteArg::Trail => Suite::Trail,
        SuiteArg::Manyvars => Suite::ManyVars,
    };
    if args.output.runs == 0 {
        return config_error(ConfigError::ZeroRuns);
    }
    let configs = suites::configs(suite, args.full, args.output.runs);
    let records = match execute(&configs, &args.output) {
        Ok(r) => r,
        Err(code) => return code,
    };
    for (title, report) in suites::ratios(suite, &records) {
        eprintln!("# {title}");
        eprintln!("instance,backtracks,ratio");
        for row in &report.rows {
            eprintln!("\"{}\",{},{:.3}", row.instance, row.backtracks, row.ratio);
        }
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    }
    ExitCode::SUCCESS
}

fn ref_backtracks() -> ExitCode {
    let rows = match data::reference_backtracks() {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    println!("# reference backtracks from another solver; not asserted");
    println!("model,instance,backtracks");
    for (p, b) in rows {
        println!("{},\"{}\",{b}", p.class_name(), p.params());
    }
    ExitCode::SUCCESS
}
