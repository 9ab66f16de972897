use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use zswkb_cli::{run_compare, run_direct, run_pt_sweep, run_stokes, run_wkb, ExperimentConfig, Table};

#[derive(Parser)]
#[command(name = "zswkb", version, about = "Semiclassical Zakharov-Shabat eigenvalue experiments")]
struct Cli {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; defaults to `<output_dir>/<subcommand>.csv` (`.json` for stokes).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the config and the well assumption, then exit.
    Validate,
    /// Quantization-condition spectra.
    Wkb,
    /// Shooting spectra.
    Direct,
    /// Both spectra, matched by proximity, with the convergence slope.
    Compare,
    /// Largest imaginary part of the perturbed spectrum per cell.
    PtSweep,
    /// Stokes graph at one spectral parameter.
    Stokes {
        /// Defaults to `lambda0`.
        #[arg(long)]
        lambda_re: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        lambda_im: f64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
}

const CONFIG_ERROR: u8 = 1;
const NUMERICAL_FAILURE: u8 = 2;

fn write_table(t: &Table, path: &Path, verbose: bool) -> Result<(), ExitCode> {
    t.write(path).map_err(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(CONFIG_ERROR)
    })?;
    if verbose {
        eprintln!("wrote {} rows to {}", t.rows.len(), path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    let config_err = |e: anyhow::Error| {
        eprintln!("config error: {e:#}");
        ExitCode::from(CONFIG_ERROR)
    };
    let path = cli.config.ok_or_else(|| config_err(anyhow::anyhow!("--config is required")))?;
    let cfg = ExperimentConfig::load(&path).map_err(config_err)?;
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| config_err(e.into()))?;
    }
    let out = |name: &str| cli.out.clone().unwrap_or_else(|| cfg.output_dir.join(name));
    let status = |failed: usize| {
        if failed > 0 {
            eprintln!("{failed} cell(s) failed; partial output written");
            ExitCode::from(NUMERICAL_FAILURE)
        } else {
            ExitCode::SUCCESS
        }
    };

    match cli.command {
        Command::Validate => {
            let p = cfg.problem(cfg.h_list[0], 0.0).map_err(config_err)?;
            println!(
                "ok: turning points {:.6} {:.6}, {:?}, symmetry {}, config {}",
                p.a1.alpha0,
                p.a1.beta0,
                p.a1.well_type,
                p.symmetry.as_str(),
                cfg.hash()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Wkb | Command::Direct => {
            let (name, r) = match cli.command {
                Command::Wkb => ("wkb.csv", run_wkb(&cfg)),
                _ => ("direct.csv", run_direct(&cfg)),
            };
            let r = r.map_err(config_err)?;
            write_table(&r.table, &out(name), cli.verbose)?;
            Ok(status(r.failed_cells))
        }
        Command::Compare => {
            let c = run_compare(&cfg).map_err(config_err)?;
            write_table(&c.table(&cfg).map_err(config_err)?, &out("compare.csv"), cli.verbose)?;
            for (h, d) in &c.max_diff_by_h {
                println!("h={h} max|lambda_wkb - lambda_direct|={d:.3e}");
            }
            match c.slope {
                Some(s) => println!("fitted slope {s:.3}"),
                None => println!("fitted slope unavailable (need two distinct h at eps=0)"),
            }
            Ok(status(c.failed_cells))
        }
        Command::PtSweep => {
            let (rows, t) = run_pt_sweep(&cfg).map_err(config_err)?;
            write_table(&t, &out("pt_sweep.csv"), cli.verbose)?;
            if rows.iter().any(|r| r.exploratory()) {
                println!("symmetry class none: rows are an exploratory control");
            }
            Ok(status(rows.iter().filter(|r| !r.error.is_empty() || !r.complete).count()))
        }
        Command::Stokes { lambda_re, lambda_im, eps } => {
            let lambda = Complex64::new(lambda_re.unwrap_or(cfg.lambda0), lambda_im);
            let path = out("stokes.json");
            let f = run_stokes(&cfg, lambda, eps, &path).map_err(|e| {
                eprintln!("error: {e:#}");
                ExitCode::from(NUMERICAL_FAILURE)
            })?;
            let mut counts = std::collections::BTreeMap::new();
            for c in &f.graph.curves {
                *counts.entry(c.termination.as_str()).or_insert(0) += 1;
            }
            println!(
                "{} curves, {} connecting, terminations {:?}, written to {}",
                f.graph.curves.len(),
                f.graph.connecting_curves().count(),
                counts,
                path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse()).unwrap_or_else(|code| code)
}
