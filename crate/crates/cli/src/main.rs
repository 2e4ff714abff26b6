use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use isp_gimbal::sim::{preset, PRESET_NAMES};
use isp_gimbal_cli::{
    cmd_compare, cmd_run, cmd_verify, format_comparison, parse_source, RunConfig, Source, Suite,
    DEFAULT_LEMMA1_SAMPLES,
};

/// Two-axis gimbal LOS stabilization and tracking simulator.
#[derive(Parser)]
#[command(name = "gimbal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a preset or config file and write trace.csv and scenario.resolved.
    Run {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory, written directly. Defaults to $GIMBAL_OUT_DIR/<scenario name>.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(
            long,
            env = "GIMBAL_OUT_DIR",
            default_value = "gimbal-out",
            hide_env_values = true
        )]
        out_root: PathBuf,
        /// Noise seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Integration step override, s.
        #[arg(long)]
        step_size: Option<f64>,
        /// Also write SVG charts.
        #[arg(long)]
        plots: bool,
    },
    /// Run verification suites; exits nonzero if any check fails.
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Random samples for the lemma1 suite.
        #[arg(long, default_value_t = DEFAULT_LEMMA1_SAMPLES)]
        samples: usize,
    },
    /// Compare settling time, peak error and integrated error of two scenarios.
    Compare {
        /// Preset name or config file.
        a: String,
        /// Preset name or config file.
        b: String,
        /// Seeds averaged for scenarios with noise.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
    },
    /// List presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lemma1,
    Decay,
    Oracle,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Lemma1 => Suite::Lemma1,
            SuiteArg::Decay => Suite::Decay,
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::All => Suite::All,
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Run {
            preset,
            config,
            out,
            out_root,
            seed,
            step_size,
            plots,
        } => {
            let source = match (preset, config) {
                (Some(p), _) => Source::Preset(p),
                (None, Some(c)) => Source::Config(c),
                (None, None) => unreachable!("clap requires one source"),
            };
            let run = cmd_run(&RunConfig {
                source,
                out,
                out_root,
                plots,
                seed,
                step_size,
            })?;
            println!(
                "{}: {} rows, t_end = {} s",
                run.scenario.name,
                run.record.rows.len(),
                run.record.last().map_or(0.0, |r| r.t)
            );
            for f in &run.files {
                println!("wrote {}", f.display());
            }
            Ok(true)
        }
        Command::Verify { suite, samples } => {
            let reports = cmd_verify(suite.into(), samples)?;
            for r in &reports {
                println!("{r}");
            }
            Ok(reports.iter().all(|r| r.passed()))
        }
        Command::Compare { a, b, seeds } => {
            let summaries = cmd_compare(&parse_source(&a)?, &parse_source(&b)?, seeds)?;
            print!("{}", format_comparison(&summaries));
            Ok(true)
        }
        Command::Presets => {
            for name in PRESET_NAMES {
                let s = preset(name)?;
                println!(
                    "{name:<16} {:<10} noise={} duration={} s",
                    s.controller.kind(),
                    if s.noise.enabled { "on" } else { "off" },
                    s.duration
                );
            }
            Ok(true)
        }
    }
}
