//! Command-line front end: compile circuit files into surgery schedules,
//! execute schedules on either simulation tier, run the named
//! verification suites, and render schedules as ASCII or SVG frames.
//!
//! Output discipline: everything on stdout is machine-readable (JSON
//! lines, CSV, or a requested artifact); prose diagnostics go to stderr.
//! Exit codes: 0 success, 1 domain error (parse, schedule, execution, or
//! verification failure), 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use latsurg::compiler::{
    compile_circuit, execute_schedule, ExecConfig, ExecutionReport, ScheduleConfig,
    SurgerySchedule, Tier,
};
use latsurg::render::{render_ascii, render_svg};
use latsurg::suites::{run_suite, SUITE_NAMES};

/// Environment variable supplying the default seed when --seed is absent.
const SEED_ENV: &str = "LATSURG_SEED";

#[derive(Parser)]
#[command(
    name = "latsurg",
    version,
    about = "Surface-code lattice-surgery toolkit",
    after_help = "Seeds default to the LATSURG_SEED environment variable, then 0. \
                  Multi-trial runs derive trial t's seed as seed + t."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a circuit file into a surgery-schedule JSON document.
    Compile {
        /// Path to the circuit source.
        circuit: PathBuf,
        /// Code distance of every tile.
        #[arg(long, default_value_t = 2)]
        distance: usize,
        /// Canvas size as ROWSxCOLS (defaults to the tightest fit).
        #[arg(long)]
        grid: Option<String>,
        /// Number of transitional tiles for joint measurements.
        #[arg(long, default_value_t = 1)]
        trn: usize,
        /// Write the schedule here; without it the schedule goes to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Execute a schedule and report per-trial logs plus a summary.
    Simulate {
        /// Path to a schedule JSON document.
        schedule: PathBuf,
        /// Simulation tier: exact statevector or stabilizer patches.
        #[arg(long, value_parser = ["logical", "physical"], default_value = "physical")]
        tier: String,
        /// Base random seed (default: LATSURG_SEED, then 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Independent runs; trial t uses seed + t.
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
    /// Run one named verification suite.
    Verify {
        /// Which suite to run.
        #[arg(long, value_parser = SUITE_NAMES)]
        suite: String,
        /// Seed for the randomized harnesses (default: LATSURG_SEED, then 2718).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render a schedule as frames.
    Render {
        /// Path to a schedule JSON document.
        schedule: PathBuf,
        /// Output format.
        #[arg(long, value_parser = ["ascii", "svg"], default_value = "ascii")]
        format: String,
        /// Write the rendering here; without it the frames go to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Compile { circuit, distance, grid, trn, output } => {
            cmd_compile(&circuit, distance, grid.as_deref(), trn, output.as_deref())
        }
        Cmd::Simulate { schedule, tier, seed, trials } => {
            cmd_simulate(&schedule, &tier, resolve_seed(seed, 0)?, trials)
        }
        Cmd::Verify { suite, seed } => cmd_verify(&suite, resolve_seed(seed, 2718)?),
        Cmd::Render { schedule, format, output } => {
            cmd_render(&schedule, &format, output.as_deref())
        }
    }
}

fn resolve_seed(flag: Option<u64>, fallback: u64) -> anyhow::Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("{SEED_ENV} must be an unsigned integer, got '{text}'")),
        Err(_) => Ok(fallback),
    }
}

fn parse_grid(text: &str) -> anyhow::Result<(usize, usize)> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() == 2 {
        if let (Ok(r), Ok(c)) = (parts[0].parse(), parts[1].parse()) {
            return Ok((r, c));
        }
    }
    anyhow::bail!("--grid expects ROWSxCOLS, got '{text}'")
}

fn load_schedule(path: &std::path::Path) -> anyhow::Result<SurgerySchedule> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_compile(
    circuit: &std::path::Path,
    distance: usize,
    grid: Option<&str>,
    trn: usize,
    output: Option<&std::path::Path>,
) -> anyhow::Result<ExitCode> {
    let source = std::fs::read_to_string(circuit)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", circuit.display()))?;
    let mut cfg = ScheduleConfig { d: distance, trn_count: trn, ..ScheduleConfig::default() };
    if let Some(g) = grid {
        let (rows, cols) = parse_grid(g)?;
        cfg.rows = Some(rows);
        cfg.cols = Some(cols);
    }
    let schedule = compile_circuit(&source, &cfg)?;
    let json = serde_json::to_string(&schedule)?;
    match output {
        Some(path) => {
            std::fs::write(path, format!("{json}\n"))
                .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
        }
        None => println!("{json}"),
    }
    println!("{}", serde_json::to_string(&schedule.metrics)?);
    Ok(ExitCode::SUCCESS)
}

/// One per-trial stdout line.
#[derive(Serialize)]
struct TrialLine<'a> {
    record: &'static str,
    trial: u64,
    report: &'a ExecutionReport,
}

/// The closing stdout line of a simulate run.
#[derive(Serialize)]
struct SummaryLine {
    record: &'static str,
    tier: String,
    seed: u64,
    trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tags: Option<Vec<String>>,
    /// Whether every trial reported the same tag set.
    #[serde(skip_serializing_if = "Option::is_none")]
    tags_stable: Option<bool>,
    /// Smallest fidelity any trial reported, when the tier reports one.
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity: Option<f64>,
}

fn cmd_simulate(
    path: &std::path::Path,
    tier: &str,
    seed: u64,
    trials: u64,
) -> anyhow::Result<ExitCode> {
    let schedule = load_schedule(path)?;
    let tier = match tier {
        "logical" => Tier::Logical,
        _ => Tier::Physical,
    };
    if trials == 0 {
        anyhow::bail!("--trials must be at least 1");
    }

    // Fan the independent trials out across worker threads; each worker
    // owns a disjoint slice of the results so the printed order is the
    // trial order regardless of completion order.
    let mut results: Vec<Option<latsurg::error::Result<ExecutionReport>>> =
        (0..trials).map(|_| None).collect();
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let chunk = usize::max(1, results.len().div_ceil(workers));
    std::thread::scope(|scope| {
        for (w, slot) in results.chunks_mut(chunk).enumerate() {
            let schedule = &schedule;
            scope.spawn(move || {
                for (i, out) in slot.iter_mut().enumerate() {
                    let trial = (w * chunk + i) as u64;
                    let cfg = ExecConfig { tier, seed: seed.wrapping_add(trial) };
                    *out = Some(execute_schedule(schedule, &cfg));
                }
            });
        }
    });

    let mut reports = Vec::with_capacity(results.len());
    for (trial, slot) in results.into_iter().enumerate() {
        reports.push(slot.expect("worker filled every slot").map_err(|e| {
            anyhow::anyhow!("trial {trial}: {e}")
        })?);
    }
    for (trial, report) in reports.iter().enumerate() {
        let line = TrialLine { record: "trial", trial: trial as u64, report };
        println!("{}", serde_json::to_string(&line)?);
    }
    let tags0 = reports.first().map(|r| r.tags.clone());
    let summary = SummaryLine {
        record: "summary",
        tier: reports[0].tier.clone(),
        seed,
        trials,
        tags_stable: tags0
            .as_ref()
            .filter(|_| tier == Tier::Physical)
            .map(|t| reports.iter().all(|r| &r.tags == t)),
        tags: tags0.filter(|_| tier == Tier::Physical),
        fidelity: reports
            .iter()
            .filter_map(|r| r.fidelity)
            .min_by(|a, b| a.total_cmp(b)),
    };
    println!("{}", serde_json::to_string(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, seed: u64) -> anyhow::Result<ExitCode> {
    let report = run_suite(suite, seed)?;
    for check in &report.checks {
        println!("{}", serde_json::to_string(check)?);
    }
    for line in &report.csv {
        println!("{line}");
    }
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        eprintln!("suite {suite}: {failed} of {} checks failed", report.checks.len());
        Ok(ExitCode::from(1))
    }
}

/// How a render written to a file is reported on stdout.
#[derive(Serialize)]
struct RenderLine<'a> {
    record: &'static str,
    format: &'a str,
    frames: usize,
    bytes: usize,
    path: String,
}

fn cmd_render(
    path: &std::path::Path,
    format: &str,
    output: Option<&std::path::Path>,
) -> anyhow::Result<ExitCode> {
    let schedule = load_schedule(path)?;
    let rendered = match format {
        "svg" => render_svg(&schedule)?,
        _ => render_ascii(&schedule)?,
    };
    match output {
        Some(out) => {
            std::fs::write(out, &rendered)
                .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", out.display()))?;
            let line = RenderLine {
                record: "render",
                format,
                frames: schedule.steps.len() + 1,
                bytes: rendered.len(),
                path: out.display().to_string(),
            };
            println!("{}", serde_json::to_string(&line)?);
        }
        None => print!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}
