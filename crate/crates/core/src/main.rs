use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use abflux::io::{parse_config, parse_rotor_config, write_output_dir, write_timeseries, ScenarioConfig};
use abflux::scenario::{rotor_series, run_scenario, ScenarioKind};
use abflux::{selftest, Error, Result};

#[derive(Parser)]
#[command(name = "abflux", version, about = "Aharonov-Bohm lattice scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report, CSV series and snapshots.
    Run {
        scenario: String,
        /// key=value configuration; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory, overriding the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the scenario names.
    ListScenarios,
    /// Run the quick example checks.
    Selftest,
    /// Rotor spectrum and entanglement-entropy series.
    Rotor {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(scenario: &str, config: Option<&Path>, out: Option<&Path>) -> Result<bool> {
    let kind = ScenarioKind::parse(scenario).ok_or_else(|| Error::config(format!("unknown scenario '{scenario}'")))?;
    let cfg = match config {
        Some(p) => parse_config(&read(p)?)?,
        None => ScenarioConfig::defaults(kind),
    };
    if cfg.scenario != kind {
        return Err(Error::config(format!("config is for '{}', not '{scenario}'", cfg.scenario.name())));
    }
    let output = run_scenario(&cfg)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&cfg.out));
    write_output_dir(&cfg, &output, &dir)?;
    for v in &output.report.verdicts {
        println!(
            "{} {:<28} {:<36} measured {:.3e} {} {:.1e}",
            if v.passed { "PASS" } else { "FAIL" },
            v.invariant,
            v.subject,
            v.measured,
            match v.relation {
                abflux::scenario::Relation::Below => "<",
                abflux::scenario::Relation::Above => ">",
            },
            v.tolerance
        );
    }
    println!("wrote {}", dir.display());
    Ok(output.report.all_passed())
}

fn rotor(config: Option<&Path>, out: Option<&Path>) -> Result<bool> {
    let cfg = match config {
        Some(p) => parse_rotor_config(&read(p)?)?,
        None => parse_rotor_config("")?,
    };
    let result = rotor_series(&cfg)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&cfg.out));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    write_timeseries(&result.spectrum, &dir.join("rotor.spectrum.csv"))?;
    write_timeseries(&result.entropy, &dir.join("rotor.entropy.csv"))?;
    println!("wrote {}", dir.display());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { scenario, config, out } => run(scenario, config.as_deref(), out.as_deref()),
        Command::ListScenarios => {
            for k in ScenarioKind::ALL {
                println!("{}", k.name());
            }
            Ok(true)
        }
        Command::Selftest => {
            let results = selftest::run_all();
            for r in &results {
                println!("{} {} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            Ok(results.iter().all(|r| r.passed))
        }
        Command::Rotor { config, out } => rotor(config.as_deref(), out.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("abflux: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
