use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bufsched::{
    oracle_optimal, parse_instance, parse_schedule, serialize_instance, serialize_schedule, verify_schedule, Instance,
};
use bufsched_harness::bench::bench;
use bufsched_harness::compare::{compare, Algo, Outcome, Scheduler};
use bufsched_harness::gen::{gen_family, gen_random, Family, GenParams};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bufsched",
    version,
    about = "Offline packet scheduling for bounded switch buffers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance trace.
    Gen(GenArgs),
    /// Run one algorithm and write its schedule.
    Run {
        #[arg(long)]
        algo: Algo,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a schedule against an instance.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        schedule: PathBuf,
    },
    /// Brute-force optimum of a small instance.
    Oracle {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Compare algorithms against the oracle.
    Compare {
        #[arg(short, long)]
        input: PathBuf,
        /// Algorithms to run (default: all).
        #[arg(long, value_delimiter = ',')]
        algo: Vec<Algo>,
        /// Where mismatching traces are written.
        #[arg(long, default_value = "counterexamples")]
        counterexamples: PathBuf,
    },
    /// Time an algorithm over increasing sizes.
    Bench {
        #[arg(long)]
        algo: Algo,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Named family instead of random parameters.
    #[arg(long, conflicts_with_all = ["m", "caps", "n", "horizon", "values", "deadline", "per_release_fit"])]
    family: Option<Family>,
    /// Family size.
    #[arg(long, requires = "family")]
    size: Option<usize>,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Capacity range `min,max`.
    #[arg(long, default_value = "1,3", value_parser = parse_range::<usize>)]
    caps: (usize, usize),
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Largest release time.
    #[arg(long, default_value_t = 6)]
    horizon: u64,
    /// Value range `min,max`.
    #[arg(long, default_value = "1,10", value_parser = parse_range::<u64>)]
    values: (u64, u64),
    /// Common deadline for every packet.
    #[arg(long)]
    deadline: Option<u64>,
    /// Never release more packets into a buffer at once than it holds.
    #[arg(long)]
    per_release_fit: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or("expected `min,max`")?;
    let parse = |x: &str| x.trim().parse::<T>().map_err(|_| format!("bad number `{x}`"));
    Ok((parse(a)?, parse(b)?))
}

/// Exit 1: the answer is "no". Exit 2: the question could not be asked.
enum Status {
    Ok,
    Mismatch,
}

fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> anyhow::Result<Status> {
    match command {
        Command::Gen(args) => {
            let inst = match args.family {
                Some(family) => gen_family(family, args.size.unwrap_or(8), args.seed)?,
                None => gen_random(&GenParams {
                    m: args.m,
                    capacity_range: args.caps,
                    n: args.n,
                    horizon: args.horizon,
                    value_range: args.values,
                    common_deadline: args.deadline,
                    respect_per_release_fit: args.per_release_fit,
                    seed: args.seed,
                })?,
            };
            emit(args.output.as_deref(), &serialize_instance(&inst))?;
        }
        Command::Run { algo, input, output } => {
            let inst = read_instance(&input)?;
            if let Err(reason) = algo.applicable(&inst) {
                bail!("{algo} does not apply: {reason}");
            }
            let schedule = algo.schedule(&inst)?;
            let report = verify_schedule(&inst, &schedule)?;
            let summary = format!("delivered {} value {}", report.delivered_count, report.delivered_value);
            match output {
                Some(path) => {
                    emit(Some(&path), &serialize_schedule(&schedule))?;
                    println!("{summary}");
                }
                None => {
                    print!("{}", serialize_schedule(&schedule));
                    eprintln!("{summary}");
                }
            }
        }
        Command::Verify { input, schedule } => {
            let inst = read_instance(&input)?;
            let text = fs::read_to_string(&schedule).with_context(|| format!("reading {}", schedule.display()))?;
            let sched = parse_schedule(&text).with_context(|| format!("parsing {}", schedule.display()))?;
            let report = verify_schedule(&inst, &sched)?;
            for v in &report.violations {
                println!("violation: {v}");
            }
            println!("delivered {} value {}", report.delivered_count, report.delivered_value);
            if !report.is_clean() {
                return Ok(Status::Mismatch);
            }
        }
        Command::Oracle { input } => {
            let inst = read_instance(&input)?;
            let r = oracle_optimal(&inst)?;
            println!("optimal value {} count {}", r.optimal_value, r.witness_set.len());
            print!("{}", serialize_schedule(&r.witness_schedule));
        }
        Command::Compare {
            input,
            algo,
            counterexamples,
        } => {
            let inst = read_instance(&input)?;
            let algos = if algo.is_empty() { Algo::ALL.to_vec() } else { algo };
            let schedulers: Vec<&dyn Scheduler> = algos.iter().map(|a| a as &dyn Scheduler).collect();
            let report = compare(&inst, &schedulers, Some(&counterexamples))?;
            println!("digest {:016x}", report.digest);
            println!("oracle count {} value {}", report.oracle_count, report.oracle_value);
            for r in &report.results {
                match &r.outcome {
                    Outcome::Ran {
                        count,
                        value,
                        clean,
                        matches,
                    } => println!(
                        "{} count {count} value {value} clean {clean} {}",
                        r.algo,
                        if *matches { "match" } else { "MISMATCH" }
                    ),
                    Outcome::Inapplicable(reason) => println!("{} inapplicable: {reason}", r.algo),
                    Outcome::Failed(e) => println!("{} failed: {e}", r.algo),
                }
            }
            if let Some(path) = &report.counterexample {
                println!("counterexample written to {}", path.display());
            }
            if !report.matched {
                return Ok(Status::Mismatch);
            }
        }
        Command::Bench { algo, sizes } => {
            if sizes.windows(2).any(|w| w[0] >= w[1]) {
                bail!("sizes must be strictly ascending");
            }
            print!("{}", bench(algo, &sizes));
        }
    }
    Ok(Status::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
