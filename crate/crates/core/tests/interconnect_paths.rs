use disagg_sim::interconnect::{build_remote_pipeline, chain_latency, InterconnectSpec};
use disagg_sim::kernel::{MemTarget, Recording, StopCondition};
use disagg_sim::platform::{assemble, simulate, PlatformConfig};
use disagg_sim::workload::{InstructionMix, WorkloadProfile};

fn all_remote(dep_prob: f64) -> WorkloadProfile {
    WorkloadProfile {
        name: "remote".into(),
        mix: InstructionMix {
            load: 1.0,
            ..Default::default()
        },
        p_l1: 0.0,
        p_l2: 0.0,
        p_l3: 0.0,
        remote_fraction: 1.0,
        dep_prob,
        ..WorkloadProfile::alu_only()
    }
}

/// Latency a lone remote load spends past the cache levels.
fn remote_transit(platform: &PlatformConfig) -> u64 {
    let (b, frontend) = assemble(platform, &all_remote(0.0), 1).unwrap();
    let mut engine = b.build(Recording::new(frontend)).unwrap();
    engine.run(StopCondition::MaxInstructions(1)).unwrap();
    let token = &engine.frontend().retired[0];
    assert_eq!(token.mem_target, MemTarget::RemoteMem);
    let caches: u64 = platform.compute.cache_levels.iter().map(|c| c.uncontended_latency()).sum();
    token.accumulated_latency - caches
}

fn endpoint_cycles() -> u64 {
    // 64 B at 16 Gb/s is 32 ns, at 2.3 GHz 73.6 cycles; once per direction
    2 * ((64.0 * 8.0 / 16.0) * 2.3_f64).round() as u64
}

#[test]
fn lone_remote_access_matches_path_budget() {
    assert_eq!(endpoint_cycles(), 148);
    for (scale, cycles) in [(1.0, 2882i64), (0.5, 1441)] {
        let platform = PlatformConfig::default().with_latency_scale(scale);
        let transit = remote_transit(&platform) as i64 - endpoint_cycles() as i64;
        assert!((transit - cycles).abs() <= 9, "scale {scale}: {transit}");
    }
}

#[test]
fn stage_order_does_not_change_uncontended_latency() {
    let base = PlatformConfig::default();
    let expected = remote_transit(&base);
    let mut reversed = base.clone();
    reversed.interconnect.stages.reverse();
    let mut rotated = base.clone();
    rotated.interconnect.stages.rotate_left(2);
    for p in [reversed, rotated] {
        assert_eq!(remote_transit(&p), expected);
        let chain = build_remote_pipeline(&p.interconnect, p.clock_ghz).unwrap();
        assert_eq!(chain_latency(&chain), expected);
    }
}

#[test]
fn more_endpoints_shorten_endpoint_queues() {
    let stop = StopCondition::MaxInstructions(20_000);
    let wait = |n: usize| {
        let p = PlatformConfig::default().with_endpoints(n);
        let r = simulate(&p, &all_remote(0.0), 3, stop).unwrap();
        r.per_module["endpoints.req"].mean_wait
    };
    let (one, eight) = (wait(1), wait(8));
    assert!(one > 0.0);
    assert!(eight < one, "1 endpoint {one}, 8 endpoints {eight}");
}

#[test]
fn remote_ipc_is_monotone_in_latency_and_endpoints() {
    let profile = WorkloadProfile::fermin_like();
    let stop = StopCondition::MaxInstructions(100_000);
    let mean_ipc = |p: &PlatformConfig| {
        (1..=5).map(|s| simulate(p, &profile, s, stop).unwrap().ipc).sum::<f64>() / 5.0
    };
    let mut prev = 0.0;
    for scale in [1.0, 0.75, 0.5, 0.25] {
        let ipc = mean_ipc(&PlatformConfig::default().with_latency_scale(scale));
        assert!(ipc > prev, "scale {scale}: {ipc} <= {prev}");
        prev = ipc;
    }
    let one = mean_ipc(&PlatformConfig::default().with_endpoints(1));
    let eight = mean_ipc(&PlatformConfig::default().with_endpoints(8));
    assert!(eight >= one, "{eight} < {one}");
}

#[test]
fn default_spec_layout() {
    let spec = InterconnectSpec::default();
    let chain = build_remote_pipeline(&spec, 2.3).unwrap();
    assert_eq!(chain.len(), 16);
    assert!(chain.iter().all(|m| m.serv_time >= 1));
    let endpoints: Vec<_> = chain.iter().filter(|m| m.name.starts_with("endpoints.")).collect();
    assert_eq!(endpoints.len(), 2);
    assert!(endpoints.iter().all(|m| m.server_count == 1 && m.serv_time == 74));
}
