//! One simulation of the bundled profile on the default platform.
//!
//! `cargo run --release --example single_run -- [seed]`

use disagg_sim::prelude::*;

fn main() -> Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let platform = PlatformConfig::default();
    let profile = WorkloadProfile::fermin_like();
    let stop = StopCondition::MaxInstructions(200_000);

    let disagg = simulate(&platform, &profile, seed, stop)?;
    let local = simulate(&platform, &profile.without_remote(), seed, stop)?;
    println!("local IPC          {:.4}", local.ipc);
    println!("disaggregated IPC  {:.4}", disagg.ipc);
    println!("overhead           {}%", format_pct(overhead(local.ipc, disagg.ipc)?));

    println!("\nbusiest modules:");
    let mut busy: Vec<_> = disagg.per_module.iter().collect();
    busy.sort_by(|a, b| b.1.busy_fraction.total_cmp(&a.1.busy_fraction));
    for (name, s) in busy.into_iter().take(5) {
        println!("  {name:<28} busy {:.3}  mean wait {:.2}", s.busy_fraction, s.mean_wait);
    }
    Ok(())
}
