//! Endpoint x latency-scale sweeps with per-seed baselines.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::kernel::StopCondition;
use crate::metrics::{format_pct, overhead};
use crate::platform::{simulate, PlatformConfig};
use crate::workload::WorkloadProfile;

/// Environment variable overriding the default number of parallel jobs.
pub const JOBS_ENV: &str = "DISAGG_SIM_JOBS";

pub const POINTS_HEADER: &str = "endpoints,latencyScale,ipc,overheadPct,seed";
pub const SUMMARY_HEADER: &str = "endpoints,latencyScale,ipc,overheadPct,seeds";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub endpoints: Vec<usize>,
    pub latency_scales: Vec<f64>,
    pub seeds: Vec<u64>,
    pub stop: StopCondition,
    /// Also run the remote-free baseline once per seed.
    pub baseline: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.endpoints.is_empty() || self.latency_scales.is_empty() || self.seeds.is_empty() {
            return Err(SimError::config("sweep lists must be non-empty"));
        }
        if self.endpoints.contains(&0) {
            return Err(SimError::config("endpoint counts must be >= 1"));
        }
        if self.latency_scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(SimError::config("latency scales must be > 0"));
        }
        Ok(())
    }
}

/// One disaggregated run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub endpoints: usize,
    pub latency_scale: f64,
    pub seed: u64,
    pub ipc: f64,
    /// Against the baseline of the same seed, when baselines were run.
    pub overhead_pct: Option<f64>,
}

/// Mean over seeds for one (endpoints, scale) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub endpoints: usize,
    pub latency_scale: f64,
    pub mean_ipc: f64,
    pub overhead_pct: Option<f64>,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// `(seed, ipc)` of each baseline run, in seed order.
    pub baselines: Vec<(u64, f64)>,
    /// Grid order: endpoints outer, scale inner, seed innermost.
    pub points: Vec<SweepPoint>,
    pub summary: Vec<SummaryRow>,
}

enum Job {
    Baseline { seed: u64 },
    Point { endpoints: usize, latency_scale: f64, seed: u64 },
}

/// Number of parallel jobs: `DISAGG_SIM_JOBS` if set, else the core count.
pub fn default_jobs() -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every grid point. Results do not depend on `jobs` or on completion order.
pub fn run_sweep(
    platform: &PlatformConfig,
    profile: &WorkloadProfile,
    spec: &SweepSpec,
    jobs: usize,
) -> Result<SweepResult> {
    spec.validate()?;
    platform.validate()?;
    profile.validate()?;

    let mut grid = Vec::new();
    if spec.baseline {
        grid.extend(spec.seeds.iter().map(|&seed| Job::Baseline { seed }));
    }
    for &endpoints in &spec.endpoints {
        for &latency_scale in &spec.latency_scales {
            for &seed in &spec.seeds {
                grid.push(Job::Point { endpoints, latency_scale, seed });
            }
        }
    }

    let local = profile.without_remote();
    let run = |job: &Job| match *job {
        Job::Baseline { seed } => simulate(platform, &local, seed, spec.stop).map(|r| r.ipc),
        Job::Point { endpoints, latency_scale, seed } => {
            let p = platform.with_endpoints(endpoints).with_latency_scale(latency_scale);
            simulate(&p, profile, seed, spec.stop).map(|r| r.ipc)
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SimError::config(format!("thread pool: {e}")))?;
    let ipcs: Vec<f64> = pool.install(|| grid.par_iter().map(run).collect::<Result<Vec<_>>>())?;

    let mut baselines = Vec::new();
    let mut points = Vec::new();
    for (job, ipc) in grid.iter().zip(ipcs) {
        match *job {
            Job::Baseline { seed } => baselines.push((seed, ipc)),
            Job::Point { endpoints, latency_scale, seed } => {
                let overhead_pct = match baselines.iter().find(|(s, _)| *s == seed) {
                    Some(&(_, base)) => Some(overhead(base, ipc)?),
                    None => None,
                };
                points.push(SweepPoint {
                    endpoints,
                    latency_scale,
                    seed,
                    ipc,
                    overhead_pct,
                });
            }
        }
    }

    let baseline_mean = mean(baselines.iter().map(|b| b.1));
    let mut summary = Vec::new();
    for chunk in points.chunks(spec.seeds.len()) {
        let mean_ipc = mean(chunk.iter().map(|p| p.ipc)).expect("non-empty chunk");
        let overhead_pct = match baseline_mean {
            Some(base) => Some(overhead(base, mean_ipc)?),
            None => None,
        };
        summary.push(SummaryRow {
            endpoints: chunk[0].endpoints,
            latency_scale: chunk[0].latency_scale,
            mean_ipc,
            overhead_pct,
            seeds: chunk.len(),
        });
    }
    Ok(SweepResult {
        baselines,
        points,
        summary,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn opt_pct(p: Option<f64>) -> String {
    p.map(format_pct).unwrap_or_default()
}

impl SweepResult {
    pub fn baseline_mean(&self) -> Option<f64> {
        mean(self.baselines.iter().map(|b| b.1))
    }

    /// Per-run rows. Baseline runs appear first as `endpoints = 0`,
    /// `latencyScale = 0` (no remote path) with zero overhead.
    pub fn points_csv(&self) -> String {
        let mut out = String::from(POINTS_HEADER);
        out.push('\n');
        for &(seed, ipc) in &self.baselines {
            let _ = writeln!(out, "0,0.000,{ipc:.6},0.00,{seed}");
        }
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{:.3},{:.6},{},{}",
                p.endpoints,
                p.latency_scale,
                p.ipc,
                opt_pct(p.overhead_pct),
                p.seed
            );
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for r in &self.summary {
            let _ = writeln!(
                out,
                "{},{:.3},{:.6},{},{}",
                r.endpoints,
                r.latency_scale,
                r.mean_ipc,
                opt_pct(r.overhead_pct),
                r.seeds
            );
        }
        out
    }

    /// Endpoint rows, one IPC/overhead column pair per latency scale.
    pub fn summary_table(&self) -> String {
        let mut scales: Vec<f64> = Vec::new();
        for r in &self.summary {
            if !scales.contains(&r.latency_scale) {
                scales.push(r.latency_scale);
            }
        }
        let mut out = String::new();
        if let Some(base) = self.baseline_mean() {
            let _ = writeln!(out, "baseline IPC (no disaggregation): {base:.3}");
        }
        let _ = write!(out, "{:>9}", "endpoints");
        for s in &scales {
            let _ = write!(out, " | {:>10} {:>10}", format!("IPC x{s}"), "overhead%");
        }
        out.push('\n');
        let mut endpoints: Vec<usize> = Vec::new();
        for r in &self.summary {
            if !endpoints.contains(&r.endpoints) {
                endpoints.push(r.endpoints);
            }
        }
        for e in endpoints {
            let _ = write!(out, "{e:>9}");
            for s in &scales {
                match self.summary.iter().find(|r| r.endpoints == e && r.latency_scale == *s) {
                    Some(r) => {
                        let _ = write!(out, " | {:>10.3} {:>10}", r.mean_ipc, opt_pct(r.overhead_pct));
                    }
                    None => {
                        let _ = write!(out, " | {:>10} {:>10}", "-", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a comma-separated list, e.g. `1,2,4,8`.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| SimError::config(format!("cannot parse `{s}` in list `{text}`")))
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(SimError::config(format!("empty list `{text}`")))
            } else {
                Ok(v)
            }
        })
}

/// Parses integers given as a comma list and/or inclusive ranges: `1..5`, `1,3,7..9`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let bad = || SimError::config(format!("bad range `{part}`"));
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            seeds.extend(a..=b);
        } else {
            seeds.push(
                part.parse()
                    .map_err(|_| SimError::config(format!("cannot parse seed `{part}`")))?,
            );
        }
    }
    if seeds.is_empty() {
        return Err(SimError::config(format!("empty seed list `{text}`")));
    }
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list::<usize>("1,2,4,8").unwrap(), vec![1, 2, 4, 8]);
        assert_eq!(parse_list::<f64>("1.0, 0.5").unwrap(), vec![1.0, 0.5]);
        assert_eq!(parse_seeds("1..5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_seeds("1,3,7..9").unwrap(), vec![1, 3, 7, 8, 9]);
        assert!(parse_seeds("5..1").is_err());
        assert!(parse_list::<usize>("1,x").is_err());
        assert!(parse_list::<usize>("").is_err());
    }

    #[test]
    fn empty_or_invalid_grid_is_rejected() {
        let ok = SweepSpec {
            endpoints: vec![1],
            latency_scales: vec![1.0],
            seeds: vec![1],
            stop: StopCondition::MaxInstructions(10),
            baseline: false,
        };
        assert!(ok.validate().is_ok());
        assert!(SweepSpec { endpoints: vec![], ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { endpoints: vec![0], ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { latency_scales: vec![-1.0], ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { seeds: vec![], ..ok }.validate().is_err());
    }
}
