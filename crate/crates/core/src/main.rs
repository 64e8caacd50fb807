use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use hasel_joint::control::{command_trace, validate_schedule};
use hasel_joint::design::{size_design, DesignInputs};
use hasel_joint::harness::{self, io, Scenario, SweepSpec};

/// Simulate, control and size antagonistic HASEL-clutch joints.
#[derive(Parser)]
#[command(name = "hasel-joint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Size the clutch and muscle from a design-input JSON file.
    Size {
        #[arg(long)]
        input: PathBuf,
        /// Print only the JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Run one scenario and write trace, commands, summary and plot.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run both the slack-only and the clutch arrangement.
        #[arg(long)]
        compare: bool,
    },
    /// Range of motion over a list of gait frequencies.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit actuator models from characterization CSVs.
    Fit {
        #[arg(long)]
        clutch: Option<PathBuf>,
        #[arg(long)]
        hasel: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check clutch/HASEL synchronization of a gait or a command file.
    CheckSchedule(CheckArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CheckArgs {
    /// Scenario JSON whose gait is checked.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Command CSV to check against the default clutch timing.
    #[arg(long)]
    commands: Option<PathBuf>,
}

/// Bad input gives exit status 1, a failure while running gives 2.
enum Failure {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<hasel_joint::Error> for Failure {
    fn from(e: hasel_joint::Error) -> Self {
        if e.is_validation() {
            Failure::Input(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

fn read_input<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Input)?;
    serde_json::from_str(&text)
        .with_context(|| format!("invalid JSON in {}", path.display()))
        .map_err(Failure::Input)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Size { input, json } => {
            let inputs: DesignInputs = read_input(&input)?;
            let report = size_design(&inputs)?;
            let text =
                serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.into()))?;
            println!("{text}");
            if !json {
                println!();
                print!("{report}");
            }
        }
        Command::Simulate {
            config,
            out,
            compare,
        } => {
            let scenario: Scenario = read_input(&config)?;
            scenario.validate()?;
            if compare {
                let report = harness::run_comparison(&scenario, &out)?;
                for s in &report.scenarios {
                    println!("{:<16} ROM {:8.2} deg", s.mode.as_str(), s.rom_deg);
                }
                if let Some(r) = report.rom_ratio_clutch_over_slack {
                    println!("ROM ratio clutch/slack {r:.3}");
                }
            } else {
                let s = harness::run_scenario(&scenario, &out)?;
                println!("{:<16} ROM {:8.2} deg", s.mode.as_str(), s.rom_deg);
            }
        }
        Command::Sweep { config, out } => {
            let spec: SweepSpec = read_input(&config)?;
            let summary = harness::run_sweep(&spec, &out)?;
            println!(
                "peak {:.2} deg at {:.2} Hz (linearized natural frequency {:.2} Hz)",
                summary.peak_rom_deg,
                summary.peak_frequency_hz,
                summary.linearized_natural_frequency_hz
            );
        }
        Command::Fit { clutch, hasel, out } => {
            let doc = harness::fit_models(clutch.as_deref(), hasel.as_deref())?;
            io::write_json(&out, &doc).map_err(|e| Failure::Runtime(e.into()))?;
        }
        Command::CheckSchedule(args) => {
            let (trace, spec) = match (args.config, args.commands) {
                (Some(config), _) => {
                    let scenario: Scenario = read_input(&config)?;
                    scenario.validate()?;
                    let trace = command_trace(
                        &scenario.command_source(),
                        scenario.duration_s,
                        scenario.sample_period_s,
                    )?;
                    (trace, scenario.models.clutch.spec)
                }
                (None, Some(path)) => {
                    let file = File::open(&path)
                        .with_context(|| format!("cannot read {}", path.display()))
                        .map_err(Failure::Input)?;
                    let trace = io::read_commands(&path.display().to_string(), file)?;
                    (trace, Default::default())
                }
                (None, None) => unreachable!("clap requires one of the inputs"),
            };
            let violations = validate_schedule(&trace, &spec);
            // A closed pipe (e.g. `| head`) just ends the listing.
            let mut out = std::io::stdout().lock();
            let _ = violations
                .iter()
                .try_for_each(|v| writeln!(out, "{:.6} s  {:?}  {:?}", v.time_s, v.side, v.kind))
                .and_then(|()| writeln!(out, "{} violation(s)", violations.len()));
            if !violations.is_empty() {
                return Err(Failure::Input(anyhow::anyhow!("schedule has violations")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
