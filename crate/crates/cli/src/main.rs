use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use puiseux::claims::Grid;
use puiseux::families::Mutation;
use puiseux::props::Property;
use puiseux_cli::commands::{self, Output, AFFIRMATIVE, NEGATIVE, UNKNOWN};
use puiseux_cli::config::{self, Overrides};
use puiseux_cli::report;
use puiseux_cli::spec::parse_spec;

/// Membership, divisibility, atoms and Furstenberg-type properties of
/// Puiseux monoids, in exact arithmetic.
///
/// Exit codes: 0 yes / pass, 1 no / fail, 2 unknown or error.
#[derive(Parser)]
#[command(name = "puiseux", version)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// TOML file with suite settings (depth, seed, grid, ...); flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every randomized sample.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether ELEMENT (a/b, or x,y for the lexcone) is in SPEC.
    Member {
        spec: String,
        #[arg(allow_hyphen_values = true)]
        element: String,
        /// Also search the truncation of this depth by brute force.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Decide whether A divides B, i.e. B - A is in SPEC.
    Divides {
        spec: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// List atoms: all of them for fg:, the first COUNT for a family.
    Atoms {
        spec: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Classify every property, re-verify the evidence and audit the implications.
    Props {
        spec: String,
        #[arg(long)]
        depth: Option<usize>,
        /// Report one property; the exit code is its verdict.
        #[arg(long)]
        property: Option<Property>,
    },
    /// Run the full claim suite.
    Report {
        #[arg(long)]
        depth: Option<usize>,
        /// Directory for report.json and report.md.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// a_max,b_pool for the crosscheck records.
        #[arg(long)]
        grid: Option<Grid>,
        #[arg(long, hide = true)]
        mutation: Option<String>,
    },
    /// Compare the family oracle with brute force on its truncations.
    Crosscheck {
        spec: String,
        /// a_max,b_pool: numerators up to a_max, denominators over powers of
        /// 2, 3 and the first b_pool private primes.
        #[arg(long)]
        grid: Option<Grid>,
        /// Largest truncation depth; a third and two thirds of it are checked too.
        #[arg(long)]
        depth: Option<usize>,
    },
}

fn parse_mutation(name: &str) -> Result<Mutation> {
    Mutation::ALL
        .into_iter()
        .chain([Mutation::None])
        .find(|m| m.name() == name)
        .ok_or_else(|| anyhow!("unknown mutation {name:?}"))
}

fn run(cli: Cli) -> Result<Output> {
    let overrides = |depth, grid| Overrides {
        depth,
        seed: cli.seed,
        grid,
    };
    let suite = |depth, grid| config::resolve(cli.config.as_deref(), &overrides(depth, grid));
    match cli.cmd {
        Cmd::Member { spec, element, depth } => commands::member(&parse_spec(&spec)?, &element, depth),
        Cmd::Divides { spec, a, b } => commands::divides(&parse_spec(&spec)?, &a, &b),
        Cmd::Atoms { spec, count } => commands::atoms(&parse_spec(&spec)?, count),
        Cmd::Props { spec, depth, property } => {
            let cfg = suite(depth, None)?;
            commands::props(&parse_spec(&spec)?, cfg.depth, property)
        }
        Cmd::Crosscheck { spec, grid, depth } => {
            let cfg = suite(None, grid)?;
            let depths = depth.map_or(cfg.crosscheck_depths.clone(), commands::crosscheck_depths);
            commands::run_crosscheck(&parse_spec(&spec)?, &cfg.grid, &depths)
        }
        Cmd::Report {
            depth,
            out,
            grid,
            mutation,
        } => {
            let mut cfg = suite(depth, grid)?;
            if let Some(m) = mutation {
                cfg.mutation = parse_mutation(&m)?;
            }
            let doc = report::build(&cfg)?;
            if let Some(dir) = &out {
                report::write(&doc, dir)?;
            }
            Ok(Output {
                code: if doc.passed { AFFIRMATIVE } else { NEGATIVE },
                text: report::markdown(&doc),
                json: serde_json::to_value(&doc).context("serializing the report")?,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            let body = if json {
                serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
            } else {
                out.text
            };
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(UNKNOWN)
        }
    }
}
