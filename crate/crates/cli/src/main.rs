mod families;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use scp_core::acceptance::run_acceptance;
use scp_core::circulation::Instance;
use scp_core::io::{emit_report, format_cost, parse_instance, parse_report, write_instance, ReportFormat};
use scp_core::oracle::{brute_force_tour, random_instance, verify_tour, RandomParams};
use scp_core::solver::{solve, SolveOptions};

use families::Family;

/// Exact stacker crane solver for graphs with few cycles.
///
/// Exit status: 0 on success, 1 when a check fails, 2 on malformed input.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Record per-phase wall-clock times.
        #[arg(long)]
        timings: bool,
    },
    /// Solve by brute force too and compare.
    Oracle { file: PathBuf },
    /// Re-validate the tour in a JSON report against its instance.
    Check { file: PathBuf, report: PathBuf },
    /// Print a random instance.
    Gen {
        #[arg(long, env = "SCP_SEED", default_value_t = 2024)]
        seed: u64,
        /// Maximum vertex count.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Maximum cycle rank.
        #[arg(long, default_value_t = 4)]
        r: usize,
        /// Maximum total demand.
        #[arg(long, default_value_t = 6)]
        p: usize,
        #[arg(long, default_value_t = 20)]
        cost_max: i64,
    },
    /// Time the solver on a synthetic family.
    Bench {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 40])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 6)]
        requests: usize,
        /// Aisle count for grid-aisle.
        #[arg(long, default_value_t = 3)]
        aisles: usize,
        #[arg(long, env = "SCP_SEED", default_value_t = 2024)]
        seed: u64,
    },
    /// Cross-check the solver against the oracles on random instances.
    Accept {
        #[arg(long, env = "SCP_SEED", default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
}

const FAILED: u8 = 1;
const MALFORMED: u8 = 2;

fn load(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| path.display().to_string())
}

/// `Err` means malformed input; check failures come back as exit codes.
fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve { file, json, timings } => {
            let instance = load(&file)?;
            let report = match solve(&instance, SolveOptions { record_timings: timings }) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(FAILED));
                }
            };
            let format = if json { ReportFormat::Json } else { ReportFormat::Text };
            print!("{}", emit_report(&report, format));
        }
        Command::Oracle { file } => {
            let instance = load(&file)?;
            let oracle = brute_force_tour(&instance)?;
            let report = solve(&instance, SolveOptions::default())?;
            let d = instance.cost_decimals;
            println!("oracle {} ({} orders)", format_cost(oracle.cost, d), oracle.nodes_explored);
            println!("solver {} ({} candidates)", format_cost(report.cost, d), report.candidates_evaluated);
            if oracle.cost != report.cost {
                println!("MISMATCH");
                return Ok(ExitCode::from(FAILED));
            }
            println!("match");
        }
        Command::Check { file, report } => {
            let instance = load(&file)?;
            let text = fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let report = parse_report(&text)?;
            let check = verify_tour(&instance, &report.tour);
            if !check.valid {
                println!("invalid: {}", check.reason.unwrap_or_default());
                return Ok(ExitCode::from(FAILED));
            }
            println!("valid, cost {}", format_cost(check.cost, instance.cost_decimals));
        }
        Command::Gen { seed, n, r, p, cost_max } => {
            let params = RandomParams {
                n_max: n,
                r_max: r,
                p_max: p,
                cost_max,
            };
            print!("# seed {seed}\n{}", write_instance(&random_instance(seed, params)?));
        }
        Command::Bench {
            family,
            sizes,
            requests,
            aisles,
            seed,
        } => {
            println!("{:>6} {:>5} {:>5} {:>3} {:>2} {:>2} {:>10} {:>10} {:>10}", "size", "n", "m", "p", "r", "k", "candidates", "cost", "ms");
            for size in sizes {
                let instance = families::build(family, size, aisles, requests, seed);
                let clock = Instant::now();
                let report = solve(&instance, SolveOptions::default())?;
                let ms = clock.elapsed().as_secs_f64() * 1e3;
                let p = report.parameters;
                println!(
                    "{size:>6} {:>5} {:>5} {:>3} {:>2} {:>2} {:>10} {:>10} {ms:>10.2}",
                    p.n, p.m, p.p, p.r, p.k, report.candidates_evaluated, report.cost
                );
            }
        }
        Command::Accept { seed, count, json } => {
            let summary = run_acceptance(seed, count);
            if json {
                println!("{}", serde_json::to_string_pretty(&summary)?);
            } else {
                println!("seed {seed}, {count} instances");
                for p in &summary.properties {
                    let verdict = if p.passed() { "PASS" } else { "FAIL" };
                    println!("{:<16} {verdict} {}/{}", p.name, p.checked - p.failures.len(), p.checked);
                    if let Some(msg) = &p.first_message {
                        println!("  first failure {msg}");
                        println!("  replay with: scp gen --seed <seed> for seeds {:?}", p.failures);
                    }
                }
            }
            if !summary.passed() {
                return Ok(ExitCode::from(FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(MALFORMED)
        }
    }
}
