//! Loads a profile from JSON, edits the platform in code, and compares IPC.

use disagg_sim::prelude::*;

const PROFILE: &str = r#"{
  "name": "pointer-chase",
  "mix": { "int_alu": 0.3, "fp_alu": 0.0, "branch": 0.1, "load": 0.6, "store": 0.0, "nop": 0.0 },
  "p_l1": 0.85,
  "p_l2": 0.4,
  "p_l3": 0.3,
  "remote_fraction": 1.0,
  "dep_prob": 0.5,
  "dep_window": 2,
  "branch_miss_prob": 0.05
}"#;

fn main() -> Result<()> {
    let profile = load_profile(PROFILE)?;
    let stop = StopCondition::MaxInstructions(50_000);

    let stock = PlatformConfig::default();
    let mut fast = stock.with_latency_scale(0.25).with_endpoints(4);
    fast.compute.issue_width = 2;
    fast.compute.cache_levels[2] = QueueModuleSpec::new("l3", 32, 4, 20);

    for (label, platform) in [("stock", &stock), ("faster fabric", &fast)] {
        let r = simulate(platform, &profile, 1, stop)?;
        println!("{label:<14} IPC {:.4}  cycles {}", r.ipc, r.cycles);
    }
    Ok(())
}
