//! Command-line front-end: one TOML config describes one experiment.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{apply_override, parse_config, Diagnostic, SCHEMA};
use run::RunError;

#[derive(Parser)]
#[command(name = "cayley-spectra", version, about = "Spectral experiments on Cayley graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (TOML).
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config field, e.g. `--set params.eps=0.002`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(short, long)]
    output: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "CAYLEY_SPECTRA_VERTEX_CAP")]
    vertex_cap: Option<usize>,
    /// Print only the path of the run report.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task named in the config.
    Run(Common),
    /// Check a config without running it.
    Validate(Common),
    /// Print the config schema.
    Schema,
    /// Build a patch around a region.
    Patch(Common),
    /// Search for (or derive from a height) a one-by-one exhaustion.
    Exhaust(Common),
    /// Decide λ-uniqueness on a region.
    Uniqueness(Common),
    /// Find eigenfunctions supported in a region.
    Eigensearch(Common),
    /// Empirical integrated density of states.
    Ids(Common),
    /// Jump candidates along a Følner sequence.
    Jumps(Common),
    /// Boundary bound on eigenvalue mass.
    Bounds(Common),
    /// Certify a height function and check its axioms.
    Heightcheck(Common),
    /// Følner sets and their isoperimetric ratios.
    Folner(Common),
    /// Von Neumann trace moments over transversals.
    Moments(Common),
}

fn load(common: &Common, task: Option<&str>) -> Result<config::ExperimentConfig, RunError> {
    let mut doc = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<toml::Table>(&text).map_err(|e| {
                RunError::Validation(vec![Diagnostic { path: path.display().to_string(), message: e.message().to_string() }])
            })?
        }
        None => toml::Table::new(),
    };
    let mut diags = Vec::new();
    for s in &common.sets {
        if let Err(d) = apply_override(&mut doc, s) {
            diags.push(d);
        }
    }
    if let Some(t) = task {
        doc.insert("task".into(), toml::Value::String(t.into()));
    }
    if let Some(o) = &common.output {
        doc.insert("output".into(), toml::Value::String(o.clone()));
    }
    if let Some(s) = common.seed {
        doc.insert("seed".into(), toml::Value::Integer(s as i64));
    }
    match parse_config(&doc) {
        Ok(c) if diags.is_empty() => Ok(c),
        Ok(_) => Err(RunError::Validation(diags)),
        Err(more) => {
            diags.extend(more);
            Err(RunError::Validation(diags))
        }
    }
}

fn execute(common: &Common, task: Option<&str>) -> Result<(), RunError> {
    let cfg = load(common, task)?;
    let report = run::run(&cfg, common.vertex_cap)?;
    let path = PathBuf::from(&cfg.output).join("run_report.json");
    if common.quiet {
        println!("{}", path.display());
    } else {
        println!("{}", output::to_json_text(&report.result).trim_end());
        println!("report: {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Schema => {
            print!("{}", SCHEMA);
            Ok(())
        }
        Command::Validate(c) => load(c, None).map(|cfg| println!("ok: task {} on {}", cfg.task, cfg.group.kind)),
        Command::Run(c) => execute(c, None),
        Command::Patch(c) => execute(c, Some("patch")),
        Command::Exhaust(c) => execute(c, Some("exhaust")),
        Command::Uniqueness(c) => execute(c, Some("uniqueness")),
        Command::Eigensearch(c) => execute(c, Some("eigensearch")),
        Command::Ids(c) => execute(c, Some("ids")),
        Command::Jumps(c) => execute(c, Some("jumps")),
        Command::Bounds(c) => execute(c, Some("bounds")),
        Command::Heightcheck(c) => execute(c, Some("heightcheck")),
        Command::Folner(c) => execute(c, Some("folner")),
        Command::Moments(c) => execute(c, Some("moments")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", e);
            if !matches!(e, RunError::Validation(_)) {
                eprintln!();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
