//! Command-line driver for the specflow experiments.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use specflow::Error;

use commands::Report;
use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "specflow", version, about = "Special flows over rotations: exact checks and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for stochastic subcommands; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// (P1), (P2) and the weak-mixing verdict of a roof.
    CheckProps,
    /// Denjoy–Koksma audit and cocycle identity.
    BirkhoffAudit,
    /// Shadowing-lemma witnesses for close pairs.
    RatnerWitness,
    /// Monte Carlo R-property experiment.
    RProperty,
    /// Distribution of Birkhoff sums along denominators and rigidity correlations.
    RigidityScan,
    /// Exact eigenvalue criterion for listed `r`.
    EigenTest,
    /// Solve `u(x + α) − u(x) = ζ(x)` for a trigonometric polynomial `ζ`.
    Coboundary,
    /// Return-time profile of a Hamiltonian flow on a transversal.
    HamSection,
    /// Area identity of a Hamiltonian flow.
    HamArea,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::CheckProps => "check-props",
            Command::BirkhoffAudit => "birkhoff-audit",
            Command::RatnerWitness => "ratner-witness",
            Command::RProperty => "r-property",
            Command::RigidityScan => "rigidity-scan",
            Command::EigenTest => "eigen-test",
            Command::Coboundary => "coboundary",
            Command::HamSection => "ham-section",
            Command::HamArea => "ham-area",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Svg,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidRoof(_) => 2,
        Error::Precondition(_)
        | Error::InsufficientStructure(_)
        | Error::DigitsExhausted { .. }
        | Error::PrecisionExhausted { .. } => 3,
        Error::LemmaViolation(_) | Error::Numerical(_) => 1,
    }
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    let seed = cli.seed.or(cfg.seed);
    match cli.command {
        Command::CheckProps => commands::check_props(&cfg),
        Command::BirkhoffAudit => commands::birkhoff_audit(&cfg),
        Command::RatnerWitness => commands::ratner_witness(&cfg, seed),
        Command::RProperty => commands::r_property(&cfg, seed),
        Command::RigidityScan => commands::rigidity_scan(&cfg, seed),
        Command::EigenTest => commands::eigen_test(&cfg),
        Command::Coboundary => commands::coboundary(&cfg),
        Command::HamSection => commands::ham_section(&cfg),
        Command::HamArea => commands::ham_area(&cfg, seed),
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<(), Error> {
    let json = serde_json::to_string_pretty(&report.json).map_err(|e| Error::Numerical(e.to_string()))? + "\n";
    let chosen = match cli.format {
        Format::Json => Some(json.clone()),
        Format::Csv => report.csv.clone(),
        Format::Svg => report.svg.clone(),
    };
    let Some(chosen) = chosen else {
        return Err(Error::Config(format!("{} has no output in the requested format", cli.command.name())));
    };
    match &cli.out {
        None => print!("{chosen}"),
        Some(dir) => {
            let io = |e: std::io::Error| Error::Config(format!("{}: {e}", dir.display()));
            std::fs::create_dir_all(dir).map_err(io)?;
            let stem = cli.command.name();
            std::fs::write(dir.join(format!("{stem}.json")), &json).map_err(io)?;
            if let Some(csv) = &report.csv {
                std::fs::write(dir.join(format!("{stem}.csv")), csv).map_err(io)?;
            }
            if let Some(svg) = &report.svg {
                std::fs::write(dir.join(format!("{stem}.svg")), svg).map_err(io)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        emit(&cli, &report)?;
        Ok(report.failure)
    });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
