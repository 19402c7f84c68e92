use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffdyn_cli::config::{read_config, ExperimentConfig};
use ffdyn_cli::experiments::{find, RunError, EXPERIMENTS};
use ffdyn_cli::selftest::selftest;
use ffdyn_cli::{emit_table, provenance, render_table, run_experiment, Hooks};

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "ffdyn", version, about = "Exact experiments on diagonal orbits of lattices over F_q(Y)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment and write its table.
    Run {
        experiment: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run every invariant suite at small parameters.
    Selftest {
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// List the experiments.
    List,
}

#[derive(Args)]
struct Opts {
    /// Config file of key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Extra key=value overrides, applied after the other flags.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Replace an existing output file.
    #[arg(long)]
    overwrite: bool,
}

fn build_config(opts: &Opts) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::default();
    if let Some(p) = &opts.config {
        cfg.apply_text(&read_config(p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    }
    let flags = [
        ("seed", opts.seed.map(|x| x.to_string())),
        ("jobs", opts.jobs.map(|x| x.to_string())),
        ("q", opts.q.map(|x| x.to_string())),
        ("n", opts.n.map(|x| x.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v).map_err(|e| e.to_string())?;
        }
    }
    for kv in &opts.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set {}: expected KEY=VALUE", kv))?;
        cfg.set(k.trim(), v).map_err(|e| e.to_string())?;
    }
    if let Some(o) = &opts.out {
        cfg.out = Some(o.clone());
    }
    cfg.overwrite |= opts.overwrite;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn run(name: &str, opts: &Opts) -> u8 {
    if find(name).is_none() {
        eprintln!("error: {}", RunError::UnknownName(name.to_string()));
        return USAGE;
    }
    let cfg = match build_config(opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            return USAGE;
        }
    };
    let rows = match run_experiment(name, &cfg) {
        Ok(r) => r,
        Err(e @ (RunError::Config(_) | RunError::UnknownName(_))) => {
            eprintln!("error: {}", e);
            return USAGE;
        }
        Err(e) => {
            eprintln!("error: {}", e);
            return FAIL;
        }
    };
    let prov = provenance(name, &cfg);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = emit_table(&rows, &prov, path, cfg.overwrite) {
                eprintln!("error: {}", e);
                return FAIL;
            }
        }
        None => print!("{}", render_table(&rows, &prov)),
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!("experiment={} rows={} passed={} failed={}", name, rows.len(), rows.len() - failed, failed);
    if failed == 0 {
        PASS
    } else {
        FAIL
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.cmd {
        Cmd::List => {
            for e in EXPERIMENTS {
                println!("{}\t{}\t{}", e.name, e.anchor, e.summary);
            }
            PASS
        }
        Cmd::Selftest { jobs } => {
            let s = selftest(&Hooks::default(), (*jobs).max(1));
            for c in &s.checks {
                println!("{}\t{}\t{}\t{}\t{}", if c.passed { "ok" } else { "FAIL" }, c.experiment, c.config, c.anchor, c.detail);
            }
            match s.first_failure() {
                None => PASS,
                Some(c) => {
                    eprintln!("first failure: {} [{}] {}", c.experiment, c.anchor, c.detail);
                    FAIL
                }
            }
        }
        Cmd::Run { experiment, opts } => run(experiment, opts),
    };
    ExitCode::from(code)
}
