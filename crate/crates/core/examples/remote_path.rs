//! Latency budget of the remote memory path and the module chain built from it.

use disagg_sim::interconnect::{
    build_remote_pipeline, chain_latency, endpoint_service_cycles, ns_to_cycles, remote_path_latency_ns,
    InterconnectSpec,
};

fn main() -> disagg_sim::Result<()> {
    let clock_ghz = 2.3;
    for scale in [1.0, 0.5] {
        let spec = InterconnectSpec {
            latency_scale: scale,
            ..InterconnectSpec::default()
        };
        let ns = remote_path_latency_ns(&spec);
        println!("scale {scale}: {ns} ns = {} cycles", ns_to_cycles(ns, clock_ghz));
        let chain = build_remote_pipeline(&spec, clock_ghz)?;
        for m in &chain {
            println!("  {:<26} serv {:>3}  delay {:>4}  servers {}", m.name, m.serv_time, m.delay, m.server_count);
        }
        println!(
            "  uncontended total {} cycles ({} of it endpoint serialization)\n",
            chain_latency(&chain),
            2 * endpoint_service_cycles(&spec, clock_ghz)
        );
    }
    Ok(())
}
