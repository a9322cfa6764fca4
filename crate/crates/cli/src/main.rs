use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rentdiv::bench::{self, Dump, GeneratorConfig, RunConfig};
use rentdiv::enumeration::{count_for_mode, EnumerationMode};
use rentdiv::{attach_prices, Error, Instance, PricingPolicy, Solution};

#[derive(Parser)]
#[command(
    name = "rentdiv",
    version,
    about = "Roommate rent division: assign tenants to rooms and price them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance (U[0,1) valuations plus `alpha` on living alone).
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        rent: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find an assignment.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Price a solved assignment (rooms are re-matched first if that helps).
    Price {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, value_enum)]
        policy: Policy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment and write its rows as CSV.
    Bench {
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write every generated instance as JSON into this directory.
        #[arg(long)]
        dump_instances: Option<PathBuf>,
        /// Largest n for the runtime experiment.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Per-call limit for the runtime experiment, in seconds.
        #[arg(long, default_value_t = bench::DEFAULT_TIMEOUT.as_secs_f64())]
        timeout_secs: f64,
    },
    /// Count assignments of m tenants to n rooms.
    Count {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Also count assignments that leave rooms empty.
        #[arg(long)]
        allow_empty: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Greedy,
    GreedyMatching,
    Mwis,
    Brute,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::GreedyMatching => "greedy-matching",
            Algorithm::Mwis => "mwis",
            Algorithm::Brute => "brute",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Ref,
    MinEpsTenant,
    MinEpsEqual,
}

impl From<Policy> for PricingPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Ref => PricingPolicy::Ref,
            Policy::MinEpsTenant => PricingPolicy::MinEpsTenant,
            Policy::MinEpsEqual => PricingPolicy::MinEpsEqual,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Welfare,
    Alpha,
    Epsilon,
    Runtime,
}

enum Failure {
    /// Bad input: exit code 2.
    Validation(String),
    /// The solver could not produce an answer: exit code 3.
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInstance(_)
            | Error::InvalidAssignment(_)
            | Error::TenantOutOfRange(_)
            | Error::RoomOutOfRange(_)
            | Error::GroupTooLarge(_)
            | Error::PriceLength { .. }
            | Error::NotSquare { .. }
            | Error::NonFiniteWeight(_) => Failure::Validation(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Validation(format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_failure(path, e))
}

fn print(body: &str) -> Result<(), Failure> {
    match writeln!(std::io::stdout().lock(), "{body}") {
        // a closed pipe (e.g. `| head`) is not an error for us
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Failure::Validation(format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn write_output(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, format!("{body}\n")).map_err(|e| io_failure(path, e)),
        None => print(body),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen {
            m,
            n,
            alpha,
            rent,
            seed,
            out,
        } => {
            let inst = bench::generate_instance(&GeneratorConfig {
                m,
                n,
                alpha,
                rent,
                seed,
            })?;
            write_output(out.as_deref(), &to_json(&inst))
        }
        Command::Solve {
            input,
            algorithm,
            out,
        } => {
            let inst: Instance = read_json(&input)?;
            let a = bench::solve_with(&inst, algorithm.name())?;
            write_output(out.as_deref(), &to_json(&Solution::unpriced(&inst, &a)?))
        }
        Command::Price {
            input,
            solution,
            policy,
            out,
        } => {
            let inst: Instance = read_json(&input)?;
            let sol: Solution = read_json(&solution)?;
            let priced = attach_prices(&inst, &sol.assignment(), policy.into())?;
            write_output(out.as_deref(), &to_json(&priced))
        }
        Command::Bench {
            experiment,
            trials,
            seed,
            out,
            dump_instances,
            max_n,
            timeout_secs,
        } => {
            if let Some(dir) = &dump_instances {
                std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            }
            if !(timeout_secs > 0.0 && timeout_secs.is_finite()) {
                return Err(Failure::Validation(format!(
                    "timeout must be positive, got {timeout_secs}"
                )));
            }
            let cfg = RunConfig {
                trials,
                seed,
                dump: Dump(dump_instances.as_deref()),
            };
            let rows = match experiment {
                Experiment::Welfare => {
                    bench::run_welfare_experiment(&bench::default_welfare_grid(), &cfg)
                }
                Experiment::Alpha => bench::run_alpha_sweep((4, 3), &bench::ALPHA_GRID, &cfg),
                Experiment::Epsilon => bench::run_epsilon_experiment((6, 3), 1.0, &cfg),
                Experiment::Runtime => {
                    let ns: Vec<usize> = (2..=max_n).collect();
                    bench::run_runtime_experiment(&ns, Duration::from_secs_f64(timeout_secs), &cfg)
                }
            };
            let file = File::create(&out).map_err(|e| io_failure(&out, e))?;
            let mut w = BufWriter::new(file);
            bench::write_csv(&rows, &mut w).map_err(|e| io_failure(&out, e))?;
            w.flush().map_err(|e| io_failure(&out, e))
        }
        Command::Count { m, n, allow_empty } => {
            let mode = if allow_empty {
                EnumerationMode::ALLOW_EMPTY
            } else {
                EnumerationMode::NO_EMPTY
            };
            print(&count_for_mode(m, n, mode)?.to_string())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
