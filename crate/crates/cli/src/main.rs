//! `pdwg`: solve, convergence tables, noise studies and identity checks.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pdwg::harness::{run_convergence, run_noise_study, solve_and_measure, FieldSnapshot};
use pdwg::mesh::Mesh;
use pdwg::problems::NoiseSpec;
use pdwg::verify::{run_all, DEFAULT_VERIFY_SEED};
use serde_json::json;

use config::{parse_list, RunConfig};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "pdwg", version, about = "Primal-dual weak Galerkin solver for the elliptic Cauchy problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and write the fields and error norms
    Solve(CommonArgs),
    /// Run a mesh refinement study and write the convergence table
    Converge(CommonArgs),
    /// Solve with increasingly perturbed boundary data
    Noise(CommonArgs),
    /// Check the discrete identities; nonzero exit on any failure
    Verify(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// quad, sinsin, coscos or bubble
    #[arg(long)]
    problem: Option<String>,
    /// case1..case5 or figures
    #[arg(long)]
    case: Option<String>,
    /// Subdivisions per side
    #[arg(long)]
    n: Option<usize>,
    /// Comma separated subdivisions, e.g. 1,2,4,8
    #[arg(long)]
    n_list: Option<String>,
    /// Noise amplitude for a single solve
    #[arg(long)]
    amplitude: Option<f64>,
    /// Comma separated noise amplitudes, must include 0
    #[arg(long)]
    amplitudes: Option<String>,
    /// Noise seed (default 42; verify uses 7)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: $PDWG_OUTPUT_DIR or ./pdwg-out)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print solver diagnostics
    #[arg(long)]
    diagnostics: bool,
}

enum Failure {
    Usage(String),
    Solver(String),
    Check(String),
}

impl Failure {
    fn io(e: impl std::fmt::Display) -> Self {
        Failure::Usage(format!("output error: {e}"))
    }
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path).map_err(Failure::Usage)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            problem: self.problem.clone(),
            case: self.case.clone(),
            segments: None,
            n: self.n,
            n_list: self.n_list.as_deref().map(parse_list).transpose().map_err(Failure::Usage)?,
            amplitude: self.amplitude,
            amplitudes: self.amplitudes.as_deref().map(parse_list).transpose().map_err(Failure::Usage)?,
            seed: self.seed,
            output: self.output.clone(),
            diagnostics: self.diagnostics.then_some(true),
        };
        let cfg = file.overridden_by(flags);
        cfg.problem().map_err(Failure::Usage)?;
        cfg.case().map_err(Failure::Usage)?;
        Ok(cfg)
    }
}

fn prepare_output(cfg: &RunConfig, command: &str) -> Result<PathBuf, Failure> {
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(Failure::io)?;
    let mut effective = serde_json::to_value(cfg).map_err(Failure::io)?;
    effective["command"] = json!(command);
    effective["output"] = json!(dir);
    effective["seed"] = json!(cfg.seed());
    let text = serde_json::to_string_pretty(&effective).map_err(Failure::io)?;
    std::fs::write(dir.join("config.json"), text + "\n").map_err(Failure::io)?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::write(dir.join(name), contents).map_err(Failure::io)
}

fn solve(cfg: &RunConfig) -> Result<(), Failure> {
    let problem = cfg.problem().map_err(Failure::Usage)?;
    let case = cfg.case().map_err(Failure::Usage)?;
    let n = cfg.n.unwrap_or(8);
    let noise = NoiseSpec::new(cfg.amplitude.unwrap_or(0.0), cfg.seed()).map_err(|e| Failure::Usage(e.to_string()))?;
    let mesh = Mesh::uniform_unit_square(n).map_err(|e| Failure::Usage(e.to_string()))?;
    let tags = mesh.classify_boundary(&case.segments).map_err(|e| Failure::Usage(e.to_string()))?;
    let dir = prepare_output(cfg, "solve")?;
    let (solution, report) =
        solve_and_measure(&problem, &mesh, &tags, &noise).map_err(|e| Failure::Solver(e.to_string()))?;
    FieldSnapshot::new(&mesh, &solution, &problem).write(&dir, "solution").map_err(Failure::io)?;
    let summary = json!({
        "problem": problem.name,
        "case": case.name,
        "n": n,
        "errors": report,
        "residual_inf": solution.residual_inf,
        "pivot_report": solution.pivot_report,
    });
    write(&dir, "errors.json", &(serde_json::to_string_pretty(&summary).map_err(Failure::io)? + "\n"))?;
    println!(
        "{} {} n={n}: h2={:.4e} l2={:.4e} linf={:.4e} lambda0h={:.4e}",
        problem.name, case.name, report.h2, report.l2, report.linf, report.lambda0h
    );
    if cfg.diagnostics.unwrap_or(false) {
        println!("residual {:.3e}; {:?}", solution.residual_inf, solution.pivot_report);
    }
    Ok(())
}

fn converge(cfg: &RunConfig) -> Result<(), Failure> {
    let problem = cfg.problem().map_err(Failure::Usage)?;
    let case = cfg.case().map_err(Failure::Usage)?;
    let n_list = cfg.n_list.clone().unwrap_or_else(|| vec![1, 2, 4, 8, 16, 32]);
    let dir = prepare_output(cfg, "converge")?;
    let table = run_convergence(&problem, &case, &n_list).map_err(|e| Failure::Usage(e.to_string()))?;
    let csv = table.to_csv().map_err(Failure::io)?;
    write(&dir, "convergence.csv", &csv)?;
    write(&dir, "convergence.md", &table.to_markdown())?;
    print!("{}", table.to_markdown());
    if cfg.diagnostics.unwrap_or(false) {
        for row in &table.rows {
            if let (Some(res), Some(p)) = (row.residual_inf, row.pivot_report) {
                println!("n={} residual {res:.3e} pivot ratio {:.3e} fill {}", row.n, p.pivot_ratio, p.factor_nnz);
            }
        }
    }
    let failed: Vec<String> =
        table.rows.iter().filter_map(|r| r.failure.as_ref().map(|f| format!("n={}: {f}", r.n))).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Solver(failed.join("; ")))
    }
}

fn noise(cfg: &RunConfig) -> Result<(), Failure> {
    let problem = cfg.problem().map_err(Failure::Usage)?;
    let case = cfg.case().map_err(Failure::Usage)?;
    let n = cfg.n.unwrap_or(16);
    let amplitudes = cfg.amplitudes.clone().unwrap_or_else(|| vec![0.0, 0.005, 0.01, 0.05]);
    let dir = prepare_output(cfg, "noise")?;
    let study =
        run_noise_study(&problem, &case, n, &amplitudes, cfg.seed()).map_err(|e| Failure::Usage(e.to_string()))?;
    write(&dir, "noise_summary.csv", &study.summary_csv().map_err(Failure::io)?)?;
    let mut failed = Vec::new();
    for (k, run) in study.runs.iter().enumerate() {
        match (&run.snapshot, &run.report) {
            (Some(snap), Some(r)) => {
                snap.write(&dir, &format!("noise_{k}")).map_err(Failure::io)?;
                println!("amplitude {}: l2={:.4e} linf={:.4e} h2={:.4e}", run.amplitude, r.l2, r.linf, r.h2);
            }
            _ => failed.push(format!("amplitude {}: {}", run.amplitude, run.failure.clone().unwrap_or_default())),
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Solver(failed.join("; ")))
    }
}

fn verify(cfg: &RunConfig) -> Result<(), Failure> {
    let dir = prepare_output(cfg, "verify")?;
    let report = run_all(cfg.seed.unwrap_or(DEFAULT_VERIFY_SEED)).map_err(|e| Failure::Solver(e.to_string()))?;
    print!("{report}");
    write(&dir, "verify.json", &(serde_json::to_string_pretty(&report).map_err(Failure::io)? + "\n"))?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(args) => solve(&args.resolve()?),
        Command::Converge(args) => converge(&args.resolve()?),
        Command::Noise(args) => noise(&args.resolve()?),
        Command::Verify(args) => verify(&args.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}
