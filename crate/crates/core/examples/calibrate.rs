//! Tunes dep_prob until the local-only IPC matches a target.
//!
//! `cargo run --release --example calibrate -- [target_ipc]`

use disagg_sim::prelude::*;

fn main() -> Result<()> {
    let target = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.37);
    let start = WorkloadProfile {
        dep_prob: 0.5,
        ..WorkloadProfile::fermin_like()
    };
    let calibrator = Calibrator {
        seeds: vec![1, 2, 3],
        stop: StopCondition::MaxInstructions(200_000),
    };
    let out = calibrator.calibrate(&start, &PlatformConfig::default(), target, 0.02, 30)?;
    println!(
        "dep_prob {:.6} -> IPC {:.4} after {} iterations (converged: {})",
        out.profile.dep_prob, out.achieved_ipc, out.iterations, out.converged
    );
    print!("{}", out.profile.to_json());
    Ok(())
}
