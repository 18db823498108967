use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lagrange_weyl::cli;
use lagrange_weyl::verify::{self, VerifyConfig};
use lagrange_weyl::{Error, FiniteAbelianGroup, Result};

#[derive(Parser)]
#[command(
    name = "lagrange-weyl",
    version,
    about = "Weyl representations and Lagrangian commutants on finite phase spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Cyclic orders, e.g. "2", "2x2"
    #[arg(long, short)]
    group: String,
    /// standard | standard-conj | file:<path>
    #[arg(long, default_value = "standard")]
    multiplier: String,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Phase space order and multiplier validation
    Describe(Common),
    /// Enumerate Lagrangian subgroups
    Lagrangians(Common),
    /// Commutant of a subgroup, its spectrum and matrix form
    Algebra {
        #[command(flatten)]
        common: Common,
        /// Index into the Lagrangian listing, or generators like "1,0;0,1"
        #[arg(long)]
        subgroup: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the Φ table (element index → exponent pair)
        #[arg(long)]
        dump_phi: bool,
    },
    /// Run the invariant battery
    Verify {
        /// Group specs, or "battery"
        #[arg(default_value = "battery")]
        groups: Vec<String>,
        #[arg(long)]
        multiplier: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "tensor-k", value_delimiter = ',', default_value = "2")]
        tensor_k: Vec<usize>,
        #[arg(long, default_value_t = verify::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", text(value));
    }
    Ok(())
}

fn parse_group(spec: &str) -> Result<FiniteAbelianGroup> {
    spec.parse()
}

fn run(args: Cli) -> Result<i32> {
    match args.command {
        Command::Describe(c) => {
            let g = parse_group(&c.group)?;
            let m = cli::parse_multiplier(&c.multiplier, &g)?;
            emit(c.json, &cli::describe(&g, &m)?, |r| r.text())?;
        }
        Command::Lagrangians(c) => {
            let g = parse_group(&c.group)?;
            let m = cli::parse_multiplier(&c.multiplier, &g)?;
            emit(c.json, &cli::lagrangians(&g, &m)?, |r| r.text())?;
        }
        Command::Algebra {
            common: c,
            subgroup,
            seed,
            dump_phi,
        } => {
            let g = parse_group(&c.group)?;
            let m = cli::parse_multiplier(&c.multiplier, &g)?;
            emit(c.json, &cli::algebra(&g, &m, &subgroup, seed, dump_phi)?, |r| r.text())?;
        }
        Command::Verify {
            groups,
            multiplier,
            seed,
            tensor_k,
            samples,
            json,
        } => {
            if tensor_k.contains(&0) {
                return Err(Error::Input("--tensor-k values must be positive".into()));
            }
            let battery = groups.iter().any(|g| g == "battery");
            let list = if battery {
                verify::battery_groups()
            } else {
                groups.iter().map(|g| parse_group(g)).collect::<Result<Vec<_>>>()?
            };
            let mut config = VerifyConfig::for_groups(list.clone(), seed);
            if let Some(spec) = multiplier {
                config.spaces = list
                    .into_iter()
                    .map(|g| cli::parse_multiplier(&spec, &g).map(|m| (g, m)))
                    .collect::<Result<_>>()?;
            }
            config.tensor_k = tensor_k;
            config.samples = samples;
            let started = std::time::Instant::now();
            let report = verify::run(&config);
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.text_summary());
                println!("elapsed: {:.2}s", started.elapsed().as_secs_f64());
            }
            return Ok(report.exit_code());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let args = Cli::try_parse().unwrap_or_else(|e| {
        let _ = e.print();
        std::process::exit(if e.use_stderr() { 2 } else { 0 });
    });
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
