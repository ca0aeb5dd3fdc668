//! `gapscope`: CK graphs, reductions, gap sweeps, ART tables and DESEV traces
//! from the command line. Exit codes: 0 success, 2 bad input, 3 numerical
//! failure (including a failed `verify`).

mod instance;
mod output;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gapscope_core::rational::parse_rational;
use gapscope_core::reductions::{ay_hamiltonian, ec3_to_1in3sat, ec_to_mis, threesat_to_mis, Cnf, EcInstance};
use gapscope_core::{generate_ck, CkParams};

use instance::InstanceArgs;

#[derive(Debug, Parser)]
#[command(name = "gapscope", version, about = "Exact spectral-gap analysis of adiabatic MIS / Exact Cover / 3SAT Hamiltonians")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a CK graph and write it as JSON.
    CkGen(CkGenArgs),
    /// Reduce an exact-cover or 3SAT instance to graph / Ising / CNF files.
    Reduce(ReduceArgs),
    /// Sweep s for one instance: gap profile CSV and ART report.
    Sweep(run::SweepArgs),
    /// Level-resolved state content Γ_k(s) of an eigenstate.
    Desev(run::DesevArgs),
    /// ART reports for a family of CK weights and/or scalings.
    ArtTable(run::ArtTableArgs),
    /// Run the oracle cross-checks on an instance.
    Verify(verify::VerifyArgs),
    /// Diagnostics.
    #[command(subcommand)]
    Debug(DebugCommand),
}

#[derive(Debug, Subcommand)]
enum DebugCommand {
    /// Extremes and checksum of the problem diagonal.
    DiagInfo(DiagInfoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, clap::Args, Serialize)]
struct CkGenArgs {
    /// Clique size.
    #[arg(short, default_value_t = 3)]
    r: usize,
    /// Number of groups.
    #[arg(short, default_value_t = 3)]
    g: usize,
    /// Weight of the V_A vertices.
    #[arg(long, default_value = "1")]
    wa: String,
    /// Weight of the V_B vertices.
    #[arg(long)]
    wb: String,
    /// Output file (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ReduceKind {
    /// Exact cover JSON → MIS graph and Ising model.
    Ec,
    /// EC3 exact cover JSON → positive 1-in-3SAT CNF and clause-violation Ising model.
    Ec3sat,
    /// DIMACS 3SAT → MIS graph and Ising model.
    #[value(name = "3sat")]
    #[serde(rename = "3sat")]
    ThreeSat,
}

#[derive(Debug, clap::Args, Serialize)]
struct ReduceArgs {
    kind: ReduceKind,
    /// Input instance (exact cover JSON or DIMACS CNF).
    #[arg(long)]
    input: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Uniform coupling J for the graph's Ising model, or "default".
    #[arg(long)]
    j: Option<String>,
    /// Scaling factor k for the graph's Ising model.
    #[arg(long)]
    k: Option<String>,
}

#[derive(Debug, clap::Args, Serialize)]
struct DiagInfoArgs {
    #[command(flatten)]
    instance: InstanceArgs,
}

/// Errors that are the numerics' fault rather than the input's.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<NumericalFailure>().is_some() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<gapscope_core::Error>() {
            return if e.is_numerical() { 3 } else { 2 };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::CkGen(args) => ck_gen(&args),
        Command::Reduce(args) => reduce(&args),
        Command::Sweep(args) => run::sweep(&args),
        Command::Desev(args) => run::desev(&args),
        Command::ArtTable(args) => run::art_table(&args),
        Command::Verify(args) => verify::verify(&args),
        Command::Debug(DebugCommand::DiagInfo(args)) => run::diag_info(&args.instance),
    }
}

fn ck_gen(args: &CkGenArgs) -> Result<()> {
    let params = CkParams::new(args.r, args.g, parse_rational(&args.wa)?, parse_rational(&args.wb)?);
    let graph = generate_ck(&params)?;
    let text = graph.to_json()?;
    match &args.out {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn reduce(args: &ReduceArgs) -> Result<()> {
    let out = output::OutputDir::create(&args.out, "reduce", args, std::slice::from_ref(&args.input))?;
    let graph = match args.kind {
        ReduceKind::Ec => {
            let inst = EcInstance::load(&args.input)?;
            ec_to_mis(&inst)?
        }
        ReduceKind::Ec3sat => {
            let inst = EcInstance::load(&args.input)?;
            let cnf = ec3_to_1in3sat(&inst)?;
            let ay = ay_hamiltonian(&inst)?;
            out.write("one_in_three.cnf", &cnf.to_dimacs())?;
            out.write("ising.json", &(ay.model.to_json()? + "\n"))?;
            println!("{}", out.path("ising.json").display());
            return Ok(());
        }
        ReduceKind::ThreeSat => {
            let cnf = Cnf::load(&args.input)?;
            threesat_to_mis(&cnf)?
        }
    };
    let couplings = instance::couplings_for(&graph, args.j.as_deref(), None)?;
    let k = match &args.k {
        Some(k) => parse_rational(k)?,
        None => gapscope_core::rational::int(1),
    };
    let model = gapscope_core::reductions::scaled_ising(&graph, &couplings, k)?;
    graph.store(out.path("graph.json"))?;
    model.store(out.path("ising.json"))?;
    println!("{}", out.path("graph.json").display());
    println!("{}", out.path("ising.json").display());
    Ok(())
}
