//! Command-line front end: config parsing, command dispatch, CSV and manifest output.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::config::Command;
use crate::output::{config_hash, write_manifest, write_report, Manifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable fixing the worker count; `--threads` overrides it.
pub const THREADS_ENV: &str = "ANDERSON_CHAOS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "anderson-chaos", version, about = "Chaos bounds, continuity gaps and Monte Carlo ensembles")]
pub struct Cli {
    /// bounds | gap | converge | holder | simulate
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run configuration
    #[arg(long, short)]
    pub config: PathBuf,
    /// Output directory (overrides output.dir; default ".")
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    pub threads: Option<usize>,
    /// Added to every seed in the configuration
    #[arg(long, default_value_t = 0)]
    pub seed_offset: u64,
}

fn thread_count(cli: &Cli) -> Result<usize, String> {
    if let Some(n) = cli.threads {
        return if n == 0 { Err("--threads must be positive".into()) } else { Ok(n) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{THREADS_ENV}={s:?} is not a positive integer")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Runs one command and returns the process exit code. Errors go to stderr.
pub fn run(cli: Cli) -> i32 {
    let started = Instant::now();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("configuration error: cannot read {}: {e}", cli.config.display());
            return EXIT_CONFIG;
        }
    };
    let threads = match thread_count(&cli) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return EXIT_CONFIG;
        }
    };
    let cfg = match config::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let validated = match config::validate(&cfg, cli.command, cli.seed_offset) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let dir = cli.out.clone().or_else(|| cfg.output.dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("configuration error: cannot create {}: {e}", dir.display());
        return EXIT_CONFIG;
    }
    // a second global init in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();

    let hash = config_hash(&text, cli.seed_offset);
    let outcome = commands::execute(&cfg, &validated);
    let mut outputs = Vec::new();
    for r in &outcome.reports {
        match write_report(&dir, r, &hash) {
            Ok(p) => outputs.push(p.file_name().unwrap().to_string_lossy().into_owned()),
            Err(e) => {
                eprintln!("error: writing {}: {e}", r.file);
                return EXIT_NUMERICAL;
            }
        }
    }
    let code = if outcome.failure.is_some() { EXIT_NUMERICAL } else { EXIT_OK };
    if let Some(msg) = &outcome.failure {
        eprintln!("numerical failure: {msg}");
    }
    let manifest = Manifest {
        tool: "anderson-chaos",
        version: env!("CARGO_PKG_VERSION"),
        core_version: anderson_chaos::VERSION,
        command: cli.command.to_string(),
        config_hash: hash,
        config: serde_json::to_value(&cfg).unwrap_or(serde_json::Value::Null),
        seed_offset: cli.seed_offset,
        threads,
        status: if code == EXIT_OK { "ok".into() } else { "numerical-failure".into() },
        message: outcome.failure.clone(),
        outputs,
        summary: outcome.summary,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    if let Err(e) = write_manifest(&dir, &manifest) {
        eprintln!("error: writing manifest: {e}");
        return EXIT_NUMERICAL;
    }
    code
}
