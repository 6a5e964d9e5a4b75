use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use skinlayer_cli::config::{parse_list, OUT_ENV};
use skinlayer_cli::{commands, Outcome, Overrides, RunConfig};

/// Verification harness for impedance boundary conditions on a conducting sphere.
#[derive(Parser)]
#[command(name = "skinlayer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file; flags take precedence over it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory. The SKINLAYER_OUT environment variable overrides it.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Comma-separated skin depths.
    #[arg(long, global = true, value_name = "LIST", allow_hyphen_values = true)]
    delta: Option<String>,
    /// Comma-separated GIBC orders, 0 to 3.
    #[arg(long, global = true, value_name = "LIST")]
    orders: Option<String>,
    /// Comma-separated spherical-harmonic degrees.
    #[arg(long, global = true, value_name = "LIST")]
    modes: Option<String>,
    /// Seed of the randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the JSON summary instead of the text report.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// GIBC and truncated-expansion convergence rates.
    Rates,
    /// Layer profiles against golden tables and closed forms.
    ProfilesCheck,
    /// Impedance symbol bounds and the order-3 remainder.
    SymbolCheck,
    /// Curvature identities and the local-coordinate curl.
    CurlCheck,
    /// Interior field decay rate.
    DecayCheck,
}

fn run(cli: &Cli) -> Result<Outcome> {
    let overrides = Overrides {
        out: cli.out.clone(),
        deltas: cli.delta.as_deref().map(parse_list).transpose()?,
        orders: cli.orders.as_deref().map(parse_list).transpose()?,
        modes: cli.modes.as_deref().map(parse_list).transpose()?,
        seed: cli.seed,
    };
    let cfg = RunConfig::resolve(cli.config.as_deref(), &overrides, std::env::var(OUT_ENV).ok())?;
    let outcome = match cli.command {
        Command::Rates => commands::cmd_rates(&cfg)?,
        Command::ProfilesCheck => commands::cmd_profiles_check(&cfg)?,
        Command::SymbolCheck => commands::cmd_symbol_check(&cfg)?,
        Command::CurlCheck => commands::cmd_curl_check(&cfg)?,
        Command::DecayCheck => commands::cmd_decay_check(&cfg)?,
    };
    outcome.write(&cfg.out)?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            let report = if cli.json {
                serde_json::to_string_pretty(&o.summary).unwrap_or_default()
            } else {
                let mut t = o.lines.join("\n");
                t.push_str(&format!("\n{}: {}", o.command, if o.pass { "PASS" } else { "FAIL" }));
                t
            };
            // a closed pipe (e.g. `| head`) is not an error of the run
            let _ = writeln!(std::io::stdout().lock(), "{report}");
            if o.pass { ExitCode::SUCCESS } else { ExitCode::from(1) }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
