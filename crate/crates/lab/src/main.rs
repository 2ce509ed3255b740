use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use escape_lab::config::{parse_config_with, Kind};
use escape_lab::run::run;

/// Run escape experiments and write their CSV tables.
#[derive(Parser, Debug)]
#[command(name = "escape", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// `key = value` config file
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Master seed, overriding the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory [default: config `out`, then $ESCAPE_OUT_DIR, then ./out]
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    replicas: Option<u64>,

    /// Worker threads; outputs are identical for any value
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Extra `key=value` overrides, applied last
    #[arg(long = "set", short = 's', global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Scale ladder, chain geometry, trigger and density recursions
    Ladder,
    /// Survival curves, strangling and density monotonicity
    Escape,
    /// Crossing probabilities in Bernoulli fields
    Crossing,
    /// Crossing failure estimates and the recursion ledger
    Pk,
    /// Domination coupling failure rates and pair meeting
    Couple,
    /// Space-time covariance and stationarity
    Cov,
    /// Decoupling of box events
    Decouple,
    /// Exact checks of tail and heat-kernel bounds
    Bounds,
    /// Every experiment above
    All,
}

impl Command {
    fn kind(self) -> Kind {
        match self {
            Command::Ladder => Kind::Ladder,
            Command::Escape => Kind::Escape,
            Command::Crossing => Kind::Crossing,
            Command::Pk => Kind::Pk,
            Command::Couple => Kind::Couple,
            Command::Cov => Kind::Cov,
            Command::Decouple => Kind::Decouple,
            Command::Bounds => Kind::Bounds,
            Command::All => Kind::All,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
        None => String::new(),
    };
    let mut overrides: Vec<(String, String)> = vec![("kind".into(), cli.command.kind().name().into())];
    if let Some(s) = cli.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    if let Some(r) = cli.replicas {
        overrides.push(("replicas".into(), r.to_string()));
    }
    if let Some(t) = cli.threads {
        overrides.push(("threads".into(), t.to_string()));
    }
    for kv in &cli.set {
        match kv.split_once('=') {
            Some((k, v)) => overrides.push((k.trim().into(), v.trim().into())),
            None => {
                eprintln!("error: --set expects KEY=VALUE, got {kv:?}");
                return ExitCode::from(1);
            }
        }
    }
    let borrowed: Vec<(&str, String)> = overrides.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let config = match parse_config_with(&text, &borrowed) {
        Ok(c) => c,
        Err(errors) => {
            eprintln!("invalid configuration:\n{errors}");
            return ExitCode::from(1);
        }
    };
    let dir = cli
        .out
        .or_else(|| config.out.clone())
        .or_else(|| std::env::var_os("ESCAPE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match run(&config, &dir) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
