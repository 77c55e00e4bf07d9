use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cstk_cli::catalog::catalog;
use cstk_cli::config::{Config, Overrides};

#[derive(Parser)]
#[command(name = "cstk", about = "Run Chern-Simons and flat-connection experiments from a TOML config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Quadrature order for every experiment.
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
    /// Finite-difference step for every experiment.
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    /// Tolerance for every experiment.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments of a config and write the report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Report directory (default: `output.dir` of the config, else `cstk-out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in charts, cycles, groups, polynomials, bundles,
    /// winding maps and families.
    ListBuiltins {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListBuiltins { json } => {
            let entries = catalog();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"));
            } else {
                for e in entries {
                    println!("{:<12} {:<28} {}", e.category.label(), e.name, e.description);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, seed, out } => {
            let mut cfg = match Config::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("ConfigInvalid: {e}");
                    return ExitCode::from(2);
                }
            };
            cfg.apply(&Overrides { seed, out, quadrature_order: cli.quadrature_order, fd_step: cli.fd_step, tolerance: cli.tol });
            let report = match cstk_cli::run_config(&cfg) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("ConfigInvalid: {e}");
                    return ExitCode::from(2);
                }
            };
            let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("cstk-out"));
            match report.write(&dir, cfg.output.csv) {
                Ok(files) => {
                    for f in files {
                        eprintln!("wrote {}", f.display());
                    }
                }
                Err(e) => {
                    eprintln!("cannot write report to {}: {e}", dir.display());
                    return ExitCode::from(1);
                }
            }
            for r in &report.rows {
                eprintln!("{:<4} {:<24} {:<22} residual {:.3e} (tol {:.1e})", if r.pass { "PASS" } else { "FAIL" }, r.id, r.kind.name(), r.residual, r.tolerance);
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("CheckFailed:");
                for r in report.failing() {
                    eprintln!("  {} ({}): {}", r.id, r.kind.name(), r.error.as_deref().unwrap_or("residual above tolerance"));
                }
                ExitCode::from(1)
            }
        }
    }
}
