use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use conelab::cli::{run, Command, ConfigFile, RunConfig, EXIT_USAGE, KEYS};

/// Model-manifold laboratory: metrics, barriers, cone stability and
/// equivariant area minimization.
#[derive(Debug, Parser)]
#[command(name = "conelab", version, after_help = keys_help())]
struct Args {
    /// Command to run; overrides `command` in the config file.
    command: Option<String>,

    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Path for machine-readable tables.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for randomized suites.
    #[arg(long)]
    seed: Option<u64>,

    /// Also print tables to standard output.
    #[arg(long)]
    verbose: bool,

    /// Extra `key=value` overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn keys_help() -> String {
    let mut s = String::from("Commands:\n");
    for c in Command::ALL {
        s.push_str(&format!("  {}\n", c.name()));
    }
    s.push_str("\nConfiguration keys (default in brackets):\n");
    for k in KEYS {
        s.push_str(&format!("  {:<13} [{}] {}\n", k.name, k.default, k.help));
    }
    s
}

fn resolve(args: &Args) -> Result<RunConfig, String> {
    let file = match &args.config {
        Some(p) => ConfigFile::read(p).map_err(|e| e.to_string())?,
        None => ConfigFile::default(),
    };
    let command = match &args.command {
        Some(name) => Some(
            name.parse::<Command>()
                .map_err(|_| format!("unknown command `{name}`"))?,
        ),
        None => None,
    };
    let mut overrides = Vec::new();
    for item in &args.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("--set expects KEY=VALUE, got `{item}`"))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(out) = &args.out {
        overrides.push(("out".into(), out.display().to_string()));
    }
    if let Some(seed) = args.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if args.verbose {
        overrides.push(("verbose".into(), "true".into()));
    }
    RunConfig::resolve(&file, command, &overrides).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let config = match resolve(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("conelab: {msg}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let code = run(&config, &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
