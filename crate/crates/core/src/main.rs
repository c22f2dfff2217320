use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use rotalign::harness::{self, output, ExperimentConfig};

/// Laser alignment and orientation of rigid linear rotors.
#[derive(Parser)]
#[command(name = "rotalign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single ensemble run; writes <name>_series.csv and <name>_meta.json.
    Run {
        config: PathBuf,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter sweep; writes <name>_sweep.csv and <name>_meta.json.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a built-in figure preset (fig1 to fig11).
    Preset {
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Coarse sweep grids for a quick look.
        #[arg(long)]
        fast: bool,
    },
    /// Parses and checks a config without running it.
    Validate { config: PathBuf },
}

fn load(path: &Path, out: Option<PathBuf>) -> Result<ExperimentConfig> {
    let mut cfg =
        ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?;
    if out.is_some() {
        cfg.output_dir = out;
    }
    if cfg.output_dir.is_none() {
        cfg.output_dir = Some(PathBuf::from("."));
    }
    Ok(cfg)
}

fn run_config(cfg: &ExperimentConfig) -> Result<()> {
    if let Some(sweep) = &cfg.sweep {
        let rows = harness::run_sweep(cfg)?;
        let failed = rows.iter().filter(|r| r.error.is_some()).count();
        println!("{}: {} points, {} failed", cfg.name, rows.len(), failed);
        for r in rows.iter().filter(|r| r.error.is_some()) {
            eprintln!(
                "  {} = {}: {}",
                sweep.parameter,
                r.param,
                r.error.as_deref().unwrap_or("")
            );
        }
    } else {
        let out = harness::run_single(cfg)?;
        let e = &out.extrema;
        println!(
            "{}: align during {:.4}, after {:.4}; orient after +{:.4} / {:.4}",
            cfg.name,
            e.max_align_during,
            e.max_align_after,
            e.max_orient_pos_after,
            e.max_orient_neg_after
        );
    }
    Ok(())
}

fn main_inner() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, out } => {
            let cfg = load(&config, out)?;
            anyhow::ensure!(
                cfg.sweep.is_none(),
                "config has a [sweep] section; use `rotalign sweep`"
            );
            run_config(&cfg)
        }
        Command::Sweep { config, out } => {
            let cfg = load(&config, out)?;
            anyhow::ensure!(
                cfg.sweep.is_some(),
                "config has no [sweep] section; use `rotalign run`"
            );
            run_config(&cfg)
        }
        Command::Preset { name, out, fast } => {
            let mut p = harness::preset(&name)?.with_output_dir(&out);
            if fast {
                p = p.fast();
            }
            println!("{}: {}", p.name, p.description);
            for cfg in &p.configs {
                run_config(cfg)?;
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_file(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            print!("{}", output::header(&cfg)?);
            println!("ok");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
