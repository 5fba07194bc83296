//! `geohmc` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure or runtime error, 2 invalid
//! spec or usage, 3 more than half of all transitions diverged.

mod report;
mod spec;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use geohmc::model::catalog;
use geohmc::sampler::run_chains;
use geohmc::verify::{self, Level};

#[derive(Parser)]
#[command(name = "geohmc", version, about = "Hamiltonian Monte Carlo with geometric kinetic energies")]
struct Cli {
    /// Random seed; overrides `chain.seed` in the spec.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir` in the spec.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sampler described by a spec file.
    Sample {
        spec: PathBuf,
    },
    /// Run the geometric verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
    /// List the built-in targets.
    ListTargets {
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID_SPEC: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Sample { spec } => cmd_sample(spec, cli.seed, cli.out_dir.as_deref()),
        Command::Verify { level } => cmd_verify(match level {
            LevelArg::Quick => Level::Quick,
            LevelArg::Full => Level::Full,
        }),
        Command::ListTargets { json } => cmd_list_targets(*json),
    };
    ExitCode::from(code)
}

fn cmd_sample(spec_path: &Path, seed: Option<u64>, out_dir: Option<&Path>) -> u8 {
    let src = match fs::read_to_string(spec_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", spec_path.display());
            return EXIT_INVALID_SPEC;
        }
    };
    let mut run = match spec::parse(&src) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}:{}:{}: {}", spec_path.display(), e.line, e.column, e.message);
            return EXIT_INVALID_SPEC;
        }
    };
    if let Some(s) = seed {
        run.chain.seed = s;
    }
    let dir = out_dir.map(Path::to_path_buf).or(run.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));

    let start = Instant::now();
    let results = match run_chains(&run.model, &run.kinetic, &run.chain, run.chains) {
        Ok(r) => r,
        Err(e @ (geohmc::Error::Usage(_) | geohmc::Error::DimensionMismatch { .. } | geohmc::Error::Validation(_))) => {
            let (line, col) = run.chain_anchor;
            eprintln!("error: {}:{line}:{col}: {e}", spec_path.display());
            return EXIT_INVALID_SPEC;
        }
        Err(e) => {
            eprintln!("error: sampling failed: {e}");
            return EXIT_FAILURE;
        }
    };
    let wall_time = start.elapsed().as_secs_f64();

    let written = report::write_outputs(&dir, &run, &results, wall_time);
    let diag = match written {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: cannot write output to {}: {e}", dir.display());
            return EXIT_FAILURE;
        }
    };
    let total = run.chain.num_samples * run.chains;
    eprintln!(
        "{} samples x {} chain(s) in {:.2}s; accept rate {:.3}; {} divergent; output in {}",
        run.chain.num_samples,
        run.chains,
        wall_time,
        diag.accept_rate,
        diag.divergence_count,
        dir.display()
    );
    if 2 * diag.divergence_count > total {
        eprintln!("error: {} of {total} transitions diverged; reduce step_size", diag.divergence_count);
        return EXIT_DIVERGENCE;
    }
    0
}

fn cmd_verify(level: Level) -> u8 {
    let start = Instant::now();
    let results = verify::run_suite(level);
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
    println!("{:<width$}  {:>12}  {:<16}  status", "check", "measured", "bound");
    for r in &results {
        println!(
            "{:<width$}  {:>12.4e}  {:<16}  {}{}",
            r.name,
            r.measured,
            r.bound,
            if r.passed { "pass" } else { "FAIL" },
            if r.detail.is_empty() { String::new() } else { format!("  ({})", r.detail) }
        );
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
    println!("{} checks, {} failed, {:.1}s", results.len(), failed.len(), start.elapsed().as_secs_f64());
    for r in &failed {
        eprintln!("failed: {} measured {:e}, required {} {}", r.name, r.measured, r.bound, r.detail);
    }
    if failed.is_empty() {
        0
    } else {
        EXIT_FAILURE
    }
}

fn cmd_list_targets(json: bool) -> u8 {
    if json {
        let entries: Vec<_> = catalog()
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "summary": e.summary,
                    "dims": e.dims,
                    "analytic_moments": e.analytic_moments,
                    "params": e.params.iter().map(|p| serde_json::json!({
                        "key": p.key,
                        "kind": p.kind.as_str(),
                        "default": p.default,
                        "help": p.help,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"));
        return 0;
    }
    for e in catalog() {
        println!("{}  ({}; analytic moments: {})", e.name, e.dims, e.analytic_moments);
        println!("    {}", e.summary);
        for p in e.params {
            let default = p.default.map_or("required".to_string(), |d| format!("default {d}"));
            println!("    {:<12} {:<8} {:<28} {}", p.key, p.kind.as_str(), default, p.help);
        }
    }
    0
}
