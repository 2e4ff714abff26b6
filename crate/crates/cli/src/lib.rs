//! Command implementations behind the `gimbal` binary.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use isp_gimbal::config::{parse_scenario, render_scenario};
use isp_gimbal::metrics::{channel_metrics, Channel, ChannelMetrics};
use isp_gimbal::sim::{integrate, preset, Scenario, SimRecord, PRESET_NAMES};
use isp_gimbal::trace::write_trace;
use isp_gimbal::verify::{self, SuiteReport};

pub mod plot;

/// Where a scenario comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset(String),
    Config(PathBuf),
}

/// Resolved `run` options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: Source,
    /// Written to directly when set.
    pub out: Option<PathBuf>,
    /// Parent of `<scenario name>/` when `out` is unset.
    pub out_root: PathBuf,
    pub plots: bool,
    pub seed: Option<u64>,
    pub step_size: Option<f64>,
}

pub fn load_scenario(source: &Source) -> Result<Scenario> {
    match source {
        Source::Preset(name) => Ok(preset(name)?),
        Source::Config(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_scenario(&text).with_context(|| format!("in {}", path.display()))
        }
    }
}

/// Applies seed and step overrides, then revalidates.
pub fn apply_overrides(
    mut s: Scenario,
    seed: Option<u64>,
    step_size: Option<f64>,
) -> Result<Scenario> {
    if let Some(seed) = seed {
        s.noise.seed = seed;
    }
    if let Some(h) = step_size {
        s.step_size = h;
    }
    s.validate()?;
    Ok(s)
}

pub struct RunOutput {
    pub dir: PathBuf,
    pub scenario: Scenario,
    pub record: SimRecord,
    pub files: Vec<PathBuf>,
}

pub fn cmd_run(config: &RunConfig) -> Result<RunOutput> {
    let scenario = apply_overrides(
        load_scenario(&config.source)?,
        config.seed,
        config.step_size,
    )?;
    for w in scenario.warnings() {
        eprintln!("warning: {w}");
    }
    let dir = config
        .out
        .clone()
        .unwrap_or_else(|| config.out_root.join(&scenario.name));
    fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;

    let record = integrate(&scenario).with_context(|| format!("simulating {}", scenario.name))?;

    let mut files = Vec::new();
    let trace_path = dir.join("trace.csv");
    let file = fs::File::create(&trace_path)
        .with_context(|| format!("writing {}", trace_path.display()))?;
    write_trace(&record, BufWriter::new(file))?;
    files.push(trace_path);

    let resolved = dir.join("scenario.resolved");
    write_file(&resolved, &render_scenario(&scenario))?;
    files.push(resolved);

    if config.plots {
        for (stem, chart) in plot::figures(&scenario, &record) {
            let path = dir.join(format!("{stem}.svg"));
            write_file(&path, &chart.to_svg())?;
            files.push(path);
        }
    }
    Ok(RunOutput {
        dir,
        scenario,
        record,
        files,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Decay,
    Oracle,
    All,
}

pub const DEFAULT_LEMMA1_SAMPLES: usize = 10_000;
const LEMMA1_SEED: u64 = 7;

pub fn cmd_verify(suite: Suite, samples: usize) -> Result<Vec<SuiteReport>> {
    let mut reports = Vec::new();
    if matches!(suite, Suite::Lemma1 | Suite::All) {
        reports.push(verify::lemma1(samples, LEMMA1_SEED));
    }
    if matches!(suite, Suite::Decay | Suite::All) {
        reports.push(verify::decay()?);
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        reports.push(verify::oracle()?);
    }
    Ok(reports)
}

/// Metrics of one side of a comparison, averaged over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub name: String,
    pub runs: usize,
    pub channels: [ChannelMetrics; 2],
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Runs a scenario once, or once per seed when noise is enabled, and
/// averages the metrics. Settling time is `None` if any run fails to settle.
pub fn summarize(scenario: &Scenario, seeds: u64) -> Result<Summary> {
    let runs: Vec<Scenario> = if scenario.noise.enabled {
        (0..seeds.max(1))
            .map(|k| {
                let mut s = scenario.clone();
                s.noise.seed = scenario.noise.seed + k;
                s
            })
            .collect()
    } else {
        vec![scenario.clone()]
    };
    let metrics = runs
        .iter()
        .map(|s| {
            let rec = integrate(s)?;
            Ok(Channel::BOTH.map(|ch| channel_metrics(s, &rec, ch)))
        })
        .collect::<Result<Vec<_>>>()?;
    let channels = [0, 1].map(|i| {
        let settling: Option<Vec<f64>> = metrics.iter().map(|m| m[i].settling_time).collect();
        ChannelMetrics {
            settling_time: settling.map(|v| mean(v.into_iter())),
            peak_error: mean(metrics.iter().map(|m| m[i].peak_error)),
            integrated_abs_error: mean(metrics.iter().map(|m| m[i].integrated_abs_error)),
        }
    });
    Ok(Summary {
        name: scenario.name.clone(),
        runs: runs.len(),
        channels,
    })
}

pub fn cmd_compare(a: &Source, b: &Source, seeds: u64) -> Result<[Summary; 2]> {
    let (sa, sb) = (load_scenario(a)?, load_scenario(b)?);
    Ok([summarize(&sa, seeds)?, summarize(&sb, seeds)?])
}

pub fn format_comparison(summaries: &[Summary; 2]) -> String {
    let settle = |m: &ChannelMetrics| {
        m.settling_time
            .map_or("-".to_string(), |t| format!("{t:.3}"))
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20} {:<10} {:>5} {:>12} {:>12} {:>12}",
        "scenario", "channel", "runs", "settling_s", "peak_error", "iae"
    );
    for s in summaries {
        for (ch, m) in Channel::BOTH.iter().zip(&s.channels) {
            let _ = writeln!(
                out,
                "{:<20} {:<10} {:>5} {:>12} {:>12.4e} {:>12.4e}",
                s.name,
                ch.name(),
                s.runs,
                settle(m),
                m.peak_error,
                m.integrated_abs_error
            );
        }
    }
    out
}

/// Preset name or path to a config file. Preset names take precedence.
pub fn parse_source(arg: &str) -> Result<Source> {
    if PRESET_NAMES.contains(&arg) {
        return Ok(Source::Preset(arg.to_string()));
    }
    let path = PathBuf::from(arg);
    if path.is_file() {
        return Ok(Source::Config(path));
    }
    bail!(
        "'{arg}' is neither a preset nor a readable config file (presets: {})",
        PRESET_NAMES.join(", ")
    )
}
