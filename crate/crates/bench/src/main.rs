use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rigidity_bench::config::{FamilyKind, ScenarioConfig};
use rigidity_bench::report::{emit_report, Format};
use rigidity_bench::{run_scenario, steps, BenchError};

#[derive(Parser)]
#[command(name = "bench", version, about = "Runs rigidity scenarios and writes reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write `report.json` or `report.csv`.
    Run {
        #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
        config: Option<PathBuf>,
        /// A built-in family, run with default settings.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
    },
    /// List the built-in scenarios.
    List,
    /// Explain one pipeline step.
    Describe { step: String },
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::List => {
            for f in FamilyKind::ALL {
                println!("{:<24} {}", f.name(), f.summary());
            }
            Ok(())
        }
        Command::Describe { step } => {
            println!("{step}: {}", steps::describe(&step)?);
            Ok(())
        }
        Command::Run { config, scenario, out, format } => {
            let cfg = match (config, scenario) {
                (Some(path), _) => ScenarioConfig::from_path(&path)?,
                (None, Some(name)) => ScenarioConfig::builtin(name.parse()?),
                (None, None) => unreachable!("clap requires one of --config, --scenario"),
            };
            let format = match format {
                OutFormat::Json => Format::Json,
                OutFormat::Csv => Format::Csv,
            };
            match run_scenario(&cfg) {
                Ok(report) => {
                    let path = emit_report(&report, &out, format)?;
                    let v = report.verdict.as_ref().map_or("none", |v| v.result.as_str());
                    println!("verdict: {v}");
                    println!("N_r: {}", report.n_r.map_or("none".into(), |n| n.to_string()));
                    println!("hash: {}", report.hash);
                    println!("wrote {}", path.display());
                    Ok(())
                }
                Err(e) => {
                    if let Some(report) = e.report() {
                        let path = emit_report(report, &out, format)?;
                        eprintln!("wrote partial report {}", path.display());
                    }
                    Err(e)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
