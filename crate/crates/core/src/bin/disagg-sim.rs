//! Command-line front end: single runs, sweeps, and baseline calibration.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 deadlock.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use disagg_sim::kernel::StopCondition;
use disagg_sim::platform::{simulate, PlatformConfig};
use disagg_sim::sweep::{default_jobs, parse_list, parse_seeds, run_sweep, SweepSpec};
use disagg_sim::workload::{load_profile, Calibrator, WorkloadProfile};
use disagg_sim::SimError;

#[derive(Parser)]
#[command(name = "disagg-sim", version, about = "Queue-model simulator for disaggregated memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Inputs {
    /// Platform config (JSON). Defaults to the built-in platform.
    #[arg(long)]
    platform: Option<PathBuf>,
    /// Workload profile (JSON).
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    max_instructions: u64,
    /// Stop admitting instructions after this many cycles instead.
    #[arg(long, conflicts_with = "max_instructions")]
    max_cycles: Option<u64>,
}

impl Inputs {
    fn stop(&self) -> StopCondition {
        match self.max_cycles {
            Some(c) => StopCondition::MaxCycles(c),
            None => StopCondition::MaxInstructions(self.max_instructions),
        }
    }

    fn load(&self) -> Result<(PlatformConfig, WorkloadProfile), SimError> {
        let platform = match &self.platform {
            Some(path) => PlatformConfig::from_json(&read(path)?).map_err(|e| in_file(path, e))?,
            None => PlatformConfig::default(),
        };
        let profile = load_profile(&read(&self.profile)?).map_err(|e| in_file(&self.profile, e))?;
        Ok((platform, profile))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its report.
    Simulate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Report output path (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep endpoint counts and latency scales.
    Sweep {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "1,2,4,8")]
        endpoints: String,
        #[arg(long, default_value = "1.0,0.5")]
        latency_scale: String,
        /// Comma list and/or inclusive ranges, e.g. `1..5`.
        #[arg(long, default_value = "1..5")]
        seeds: String,
        /// Also run the remote-free baseline and report overheads.
        #[arg(long)]
        baseline: bool,
        /// Per-run CSV; the summary goes next to it as `<stem>_summary.csv`.
        #[arg(long)]
        out: PathBuf,
        /// Parallel runs (default: $DISAGG_SIM_JOBS or the core count).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Tune dep_prob so the remote-free IPC hits a target.
    Calibrate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 1.37)]
        target_ipc: f64,
        /// Relative tolerance.
        #[arg(long, default_value_t = 0.045)]
        tol: f64,
        #[arg(long, default_value_t = 30)]
        max_iter: u32,
        #[arg(long, default_value = "1..5")]
        seeds: String,
        /// Where to write the calibrated profile (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in platform config.
    Defaults,
}

fn read(path: &Path) -> Result<String, SimError> {
    std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), SimError> {
    std::fs::write(path, contents).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn in_file(path: &Path, err: SimError) -> SimError {
    match err {
        SimError::Config(msg) => SimError::Config(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_summary.csv"))
}

fn run(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Simulate { inputs, seed, out } => {
            let (platform, profile) = inputs.load()?;
            let report = simulate(&platform, &profile, seed, inputs.stop())?;
            if let Some(out) = out {
                write(&out, &report.to_json())?;
            }
            println!("IPC {:.6}", report.ipc);
        }
        Command::Sweep {
            inputs,
            endpoints,
            latency_scale,
            seeds,
            baseline,
            out,
            jobs,
        } => {
            let (platform, profile) = inputs.load()?;
            let spec = SweepSpec {
                endpoints: parse_list(&endpoints)?,
                latency_scales: parse_list(&latency_scale)?,
                seeds: parse_seeds(&seeds)?,
                stop: inputs.stop(),
                baseline,
            };
            let result = run_sweep(&platform, &profile, &spec, jobs.unwrap_or_else(default_jobs))?;
            write(&out, &result.points_csv())?;
            write(&summary_path(&out), &result.summary_csv())?;
            print!("{}", result.summary_table());
        }
        Command::Calibrate {
            inputs,
            target_ipc,
            tol,
            max_iter,
            seeds,
            out,
        } => {
            let (platform, profile) = inputs.load()?;
            let calibrator = Calibrator {
                seeds: parse_seeds(&seeds)?,
                stop: inputs.stop(),
            };
            let outcome = calibrator.calibrate(&profile, &platform, target_ipc, tol, max_iter)?;
            eprintln!(
                "dep_prob {:.6}: IPC {:.4} after {} iterations ({})",
                outcome.profile.dep_prob,
                outcome.achieved_ipc,
                outcome.iterations,
                if outcome.converged { "converged" } else { "NOT converged" }
            );
            match out {
                Some(out) => write(&out, &outcome.profile.to_json())?,
                None => print!("{}", outcome.profile.to_json()),
            }
        }
        Command::Defaults => print!("{}", PlatformConfig::default().to_json()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_deadlock() { 2 } else { 1 })
        }
    }
}
