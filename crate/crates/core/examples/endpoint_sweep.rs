//! Endpoint-count by latency-scale grid with overheads against the local baseline.
//!
//! Shorter runs than the acceptance suite, so numbers wobble a little.

use disagg_sim::prelude::*;
use disagg_sim::sweep::default_jobs;

fn main() -> Result<()> {
    let spec = SweepSpec {
        endpoints: vec![1, 2, 4, 8],
        latency_scales: vec![1.0, 0.5],
        seeds: vec![1, 2, 3],
        stop: StopCondition::MaxInstructions(200_000),
        baseline: true,
    };
    let result = run_sweep(&PlatformConfig::default(), &WorkloadProfile::fermin_like(), &spec, default_jobs())?;
    print!("{}", result.summary_table());
    Ok(())
}
