use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use oddsym::cli::run::{COMMANDS, INPUT_ERROR};
use oddsym::cli::{run, Manifest};

/// Exact computations on odd symplectic charts driven by JSON manifests.
#[derive(Parser, Debug)]
#[command(name = "oddsym", version)]
struct Args {
    /// One of: bracket, delta0, delta-vol, delta-sharp, berezinian, darboux, flow,
    /// hamiltonian-from-map, tau-sharp, tau-sharp-inv, shift, star, pullback-surface,
    /// dual-density, densities-p, verify.
    subcommand: String,
    /// Suite for `verify` given positionally, e.g. `oddsym verify jacobi`.
    suite_arg: Option<String>,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    suite: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Machine-readable report.
    #[arg(long)]
    json: bool,
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("oddsym: {msg}");
    ExitCode::from(INPUT_ERROR as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !COMMANDS.contains(&args.subcommand.as_str()) {
        return fail(&format!("unknown subcommand `{}`", args.subcommand));
    }
    let text = match std::fs::read_to_string(&args.manifest) {
        Ok(t) => t,
        Err(e) => return fail(&format!("{}: {e}", args.manifest.display())),
    };
    let manifest = match Manifest::from_json(&text) {
        Ok(m) => m,
        Err(e) => return fail(&e.to_string()),
    };
    let suite = args.suite.as_deref().or(args.suite_arg.as_deref());
    let report = match run(manifest, Some(&args.subcommand), suite) {
        Ok(r) => r,
        Err(e) => return fail(&e.to_string()),
    };
    let body = if args.json { report.to_json() } else { report.to_text() };
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                return fail(&format!("{}: {e}", p.display()));
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
