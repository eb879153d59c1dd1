//! `dagpart`: solve, reduce, generate, verify and benchmark DAG Partitioning instances.
//!
//! Exit codes: 0 yes or solved, 1 no, 2 timeout, 3 usage, input or I/O error.

mod bench;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dagpart::format::{parse_cnf, parse_instance, parse_solution, parse_td, write_cnf, write_instance, write_solution};
use dagpart::generators::{from_3sat, gen_embedded, random_3cnf, unitize, GenSpec, DEFAULT_SEED};
use dagpart::reduction::reduce;
use dagpart::Weight;

use crate::run::{Algo, Request};

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "dagpart", version, about = "Exact and heuristic solvers for DAG Partitioning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the solution format.
    Solve(SolveArgs),
    /// Apply both reduction rules exhaustively.
    Reduce {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Print `r dagp <n> <m>` for the reduced instance.
        #[arg(long)]
        stats: bool,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check a solution file against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Run a benchmark suite and write a CSV report.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Per-row time limit in seconds.
        #[arg(long)]
        timeout: Option<f64>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    budget: Option<Weight>,
    #[arg(long)]
    minimize: bool,
    /// Tree decomposition in PACE `.td` format (treewidth only).
    #[arg(long)]
    td: Option<PathBuf>,
    /// List the deleted arcs.
    #[arg(long)]
    witness: bool,
    /// Time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Preferential-attachment components with embedded cross arcs.
    Pa {
        #[arg(long, default_value_t = 1)]
        components: usize,
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 5)]
        outdegree: usize,
        #[arg(long, default_value_t = 1)]
        sinks: usize,
        #[arg(long, default_value_t = 0)]
        embedded: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
        /// Also write the embedded arcs in the solution format.
        #[arg(long)]
        embedded_output: Option<PathBuf>,
    },
    /// 3-SAT gadget instance from a DIMACS CNF file or a random formula.
    Cnf {
        /// DIMACS CNF input; a random formula is drawn when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        clauses: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
        /// Also write the formula in DIMACS CNF.
        #[arg(long)]
        cnf_output: Option<PathBuf>,
    },
    /// Replace weighted arcs by unit-weight gadgets.
    Unitize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn seconds(s: Option<f64>) -> Result<Option<Duration>> {
    s.map(|s| Duration::try_from_secs_f64(s).context("--timeout must be a non-negative number of seconds"))
        .transpose()
}

fn seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("DAGPART_SEED") {
        Ok(v) => v.trim().parse().with_context(|| format!("DAGPART_SEED=`{v}` is not an integer")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn solve(a: SolveArgs) -> Result<u8> {
    let g = parse_instance(&read(&a.input)?).with_context(|| a.input.display().to_string())?;
    let td = match &a.td {
        Some(p) => Some(parse_td(&read(p)?).with_context(|| p.display().to_string())?),
        None => None,
    };
    let req = Request {
        algo: a.algo,
        budget: a.budget,
        minimize: a.minimize,
        td: td.as_ref(),
        timeout: seconds(a.timeout)?,
    };
    let out = run::run(&g, &req)?;
    match &out.set {
        Some(s) => print!("{}", write_solution(&g, s, a.witness)),
        None => println!("c {}", out.status.name()),
    }
    println!("c nodes={} time_ms={}", out.nodes, out.elapsed.as_millis());
    Ok(out.status.exit_code(out.weight(), a.budget.filter(|_| !a.minimize)) as u8)
}

fn gen(cmd: GenCommand) -> Result<u8> {
    match cmd {
        GenCommand::Pa {
            components,
            vertices,
            outdegree,
            sinks,
            embedded,
            seed: s,
            output,
            embedded_output,
        } => {
            let spec = GenSpec {
                components,
                vertices_per_component: vertices,
                outdegree,
                sinks_per_component: sinks,
                embedded,
                seed: seed(s)?,
            };
            let (g, set) = gen_embedded(&spec)?;
            write(&output, &write_instance(&g))?;
            if let Some(p) = embedded_output {
                write(&p, &write_solution(&g, &set, true))?;
            }
        }
        GenCommand::Cnf {
            input,
            vars,
            clauses,
            seed: s,
            output,
            cnf_output,
        } => {
            let phi = match &input {
                Some(p) => parse_cnf(&read(p)?).with_context(|| p.display().to_string())?,
                None => random_3cnf(vars, clauses, seed(s)?),
            };
            let (g, k) = from_3sat(&phi)?;
            write(&output, &format!("c budget {k}\n{}", write_instance(&g)))?;
            if let Some(p) = cnf_output {
                write(&p, &write_cnf(&phi))?;
            }
        }
        GenCommand::Unitize { input, output } => {
            let g = parse_instance(&read(&input)?).with_context(|| input.display().to_string())?;
            write(&output, &write_instance(&unitize(&g)?))?;
        }
    }
    Ok(0)
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Reduce { input, output, stats } => {
            let g = parse_instance(&read(&input)?).with_context(|| input.display().to_string())?;
            let (r, _) = reduce(&g);
            write(&output, &write_instance(&r))?;
            if stats {
                println!("r dagp {} {}", r.vertex_count(), r.arc_count());
            }
            Ok(0)
        }
        Command::Gen(cmd) => gen(cmd),
        Command::Verify { input, solution } => {
            let g = parse_instance(&read(&input)?).with_context(|| input.display().to_string())?;
            let sol = parse_solution(&read(&solution)?, &g).with_context(|| solution.display().to_string())?;
            let valid = g.is_valid_partitioning_set(&sol.set);
            let weight_ok = sol.set.total_weight() == sol.claimed_weight;
            if !valid {
                println!("c INVALID: some component keeps more than one sink");
            } else if !weight_ok {
                println!(
                    "c INVALID: listed arcs weigh {}, solution claims {}",
                    sol.set.total_weight(),
                    sol.claimed_weight
                );
            } else {
                println!("c VALID weight={}", sol.claimed_weight);
            }
            Ok(if valid && weight_ok { 0 } else { 1 })
        }
        Command::Bench {
            suite,
            csv,
            jobs,
            timeout,
        } => {
            let jobs = bench::check_jobs(jobs)?;
            let base = suite.parent().unwrap_or(Path::new("."));
            let entries = bench::parse_suite(&read(&suite)?, base)?;
            let rows = bench::run_suite(&entries, jobs, seconds(timeout)?)?;
            bench::write_csv(&csv, &rows)?;
            if rows.iter().any(|r| r.status.starts_with("ERROR")) {
                bail!("some benchmark rows failed; see {}", csv.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
