//! Remote-memory path between a compute brick and a memory brick.
//!
//! Each stage of the path is a transceiver or memory block with a fixed
//! latency, crossed some number of times per remote request. Stages become
//! pure-delay modules (`serv_time` 1). The only bandwidth-limited resource is
//! the pool of link endpoints, one server per endpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::kernel::QueueModuleSpec;

/// Which brick(s) a stage belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Compute brick.
    #[serde(rename = "CB")]
    Compute,
    /// Memory brick.
    #[serde(rename = "MB")]
    Memory,
    /// Present on both bricks; crossings are split evenly between them.
    #[serde(rename = "Both")]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemotePathStage {
    pub name: String,
    pub latency_ns: f64,
    pub accesses_per_request: u32,
    pub side: Side,
}

impl RemotePathStage {
    pub fn new(name: &str, latency_ns: f64, accesses_per_request: u32, side: Side) -> Self {
        RemotePathStage {
            name: name.to_string(),
            latency_ns,
            accesses_per_request,
            side,
        }
    }
}

/// Stage latencies of the current hardware prototype: FPGA address translation on the compute
/// brick, ingress/egress, network-on-chip and PCS/PMA crossed twice on each
/// brick, and DDR4 on the memory brick.
pub fn current_prototype_stages() -> Vec<RemotePathStage> {
    vec![
        RemotePathStage::new("addr_transl", 72.0, 1, Side::Compute),
        RemotePathStage::new("ingress_egress", 6.25, 4, Side::Both),
        RemotePathStage::new("noc", 22.4, 4, Side::Both),
        RemotePathStage::new("pcs_pma", 251.0, 4, Side::Both),
        RemotePathStage::new("ddr4", 62.5, 1, Side::Memory),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterconnectSpec {
    pub stages: Vec<RemotePathStage>,
    pub num_endpoints: usize,
    pub endpoint_gbps: f64,
    pub cache_line_bytes: u32,
    /// Multiplier applied to every stage latency (0.5 halves the path).
    pub latency_scale: f64,
    /// Waiting slots of each stage module.
    pub stage_capacity: usize,
    /// Waiting slots of each endpoint pool.
    pub endpoint_capacity: usize,
}

impl Default for InterconnectSpec {
    fn default() -> Self {
        InterconnectSpec {
            stages: current_prototype_stages(),
            num_endpoints: 1,
            endpoint_gbps: 16.0,
            cache_line_bytes: 64,
            latency_scale: 1.0,
            stage_capacity: 64,
            endpoint_capacity: 64,
        }
    }
}

impl InterconnectSpec {
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(SimError::config("interconnect needs at least one stage"));
        }
        for s in &self.stages {
            if !(s.latency_ns.is_finite() && s.latency_ns > 0.0) {
                return Err(SimError::config(format!("stage `{}`: latency_ns must be > 0", s.name)));
            }
            if s.accesses_per_request == 0 {
                return Err(SimError::config(format!(
                    "stage `{}`: accesses_per_request must be >= 1",
                    s.name
                )));
            }
        }
        if self.num_endpoints < 1 {
            return Err(SimError::config("num_endpoints must be >= 1"));
        }
        if !(self.endpoint_gbps.is_finite() && self.endpoint_gbps > 0.0) {
            return Err(SimError::config("endpoint_gbps must be > 0"));
        }
        if self.cache_line_bytes == 0 {
            return Err(SimError::config("cache_line_bytes must be > 0"));
        }
        if !(self.latency_scale.is_finite() && self.latency_scale > 0.0) {
            return Err(SimError::config("latency_scale must be > 0"));
        }
        if self.stage_capacity < 1 || self.endpoint_capacity < 1 {
            return Err(SimError::config("stage and endpoint capacities must be >= 1"));
        }
        Ok(())
    }
}

/// Contention-free latency of one remote request, in nanoseconds.
pub fn remote_path_latency_ns(spec: &InterconnectSpec) -> f64 {
    let sum: f64 = spec
        .stages
        .iter()
        .map(|s| s.latency_ns * f64::from(s.accesses_per_request))
        .sum();
    spec.latency_scale * sum
}

/// Converts nanoseconds to cycles, rounding half up.
pub fn ns_to_cycles(ns: f64, clock_ghz: f64) -> u64 {
    // Snap away float noise so exact halves (14.375, 73.5, ...) round up.
    let cycles = (ns * clock_ghz * 1e9).round() / 1e9;
    (cycles + 0.5).floor() as u64
}

/// Cycles one endpoint needs to serialize a cache line.
pub fn endpoint_service_cycles(spec: &InterconnectSpec, clock_ghz: f64) -> u64 {
    let bits = f64::from(spec.cache_line_bytes) * 8.0;
    let ns = bits / spec.endpoint_gbps;
    ns_to_cycles(ns, clock_ghz).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Leg {
    Request,
    Response,
}

/// Crossings of `stage` on each side, as `(compute, memory)`.
fn side_split(stage: &RemotePathStage) -> (u32, u32) {
    let n = stage.accesses_per_request;
    match stage.side {
        Side::Compute => (n, 0),
        Side::Memory => (0, n),
        Side::Both => (n.div_ceil(2), n / 2),
    }
}

/// Crossings on one leg: the request leg takes the odd one out.
fn leg_count(total: u32, leg: Leg) -> u32 {
    match leg {
        Leg::Request => total.div_ceil(2),
        Leg::Response => total / 2,
    }
}

/// Module chain traversed by a remote memory request, in order.
///
/// Request: compute-brick stages outward, endpoint pool, memory-brick stages
/// inward down to memory-only stages. Response: the mirror image. Each stage
/// module has `serv_time` 1 and `delay` so that `serv_time + delay` equals
/// its scaled latency in cycles (at least one cycle).
pub fn build_remote_pipeline(spec: &InterconnectSpec, clock_ghz: f64) -> Result<Vec<QueueModuleSpec>> {
    spec.validate()?;
    if !(clock_ghz.is_finite() && clock_ghz > 0.0) {
        return Err(SimError::config("clock_ghz must be > 0"));
    }
    let stage_module = |stage: &RemotePathStage, side: &str, leg: Leg, k: u32| {
        let cycles = ns_to_cycles(stage.latency_ns * spec.latency_scale, clock_ghz).max(1);
        let dir = match leg {
            Leg::Request => "req",
            Leg::Response => "resp",
        };
        let suffix = if k == 0 { String::new() } else { format!(".{k}") };
        QueueModuleSpec::new(
            format!("{side}.{dir}.{}{suffix}", stage.name),
            spec.stage_capacity,
            1,
            cycles - 1,
        )
    };
    let endpoint = |leg: Leg| {
        let dir = match leg {
            Leg::Request => "req",
            Leg::Response => "resp",
        };
        QueueModuleSpec::new(
            format!("endpoints.{dir}"),
            spec.endpoint_capacity,
            endpoint_service_cycles(spec, clock_ghz),
            0,
        )
        .with_servers(spec.num_endpoints)
    };

    let mut chain = Vec::new();
    let push = |chain: &mut Vec<QueueModuleSpec>, stage: &RemotePathStage, side: &str, leg: Leg, count: u32| {
        for k in 0..count {
            chain.push(stage_module(stage, side, leg, k));
        }
    };
    let both_sided = |s: &&RemotePathStage| s.side == Side::Both;

    // request leg, compute brick: outward from the core
    for s in spec.stages.iter().filter(|s| s.side == Side::Compute) {
        push(&mut chain, s, "cb", Leg::Request, leg_count(side_split(s).0, Leg::Request));
    }
    for s in spec.stages.iter().filter(both_sided) {
        push(&mut chain, s, "cb", Leg::Request, leg_count(side_split(s).0, Leg::Request));
    }
    chain.push(endpoint(Leg::Request));
    // request leg, memory brick: inward from the link
    for s in spec.stages.iter().rev().filter(both_sided) {
        push(&mut chain, s, "mb", Leg::Request, leg_count(side_split(s).1, Leg::Request));
    }
    for s in spec.stages.iter().filter(|s| s.side == Side::Memory) {
        push(&mut chain, s, "mb", Leg::Request, leg_count(side_split(s).1, Leg::Request));
    }
    // response leg, memory brick: outward
    for s in spec.stages.iter().filter(|s| s.side == Side::Memory) {
        push(&mut chain, s, "mb", Leg::Response, leg_count(side_split(s).1, Leg::Response));
    }
    for s in spec.stages.iter().filter(both_sided) {
        push(&mut chain, s, "mb", Leg::Response, leg_count(side_split(s).1, Leg::Response));
    }
    chain.push(endpoint(Leg::Response));
    // response leg, compute brick: inward to the core
    for s in spec.stages.iter().rev().filter(both_sided) {
        push(&mut chain, s, "cb", Leg::Response, leg_count(side_split(s).0, Leg::Response));
    }
    for s in spec.stages.iter().rev().filter(|s| s.side == Side::Compute) {
        push(&mut chain, s, "cb", Leg::Response, leg_count(side_split(s).0, Leg::Response));
    }
    Ok(chain)
}

/// Contention-free transit through a module chain.
pub fn chain_latency(chain: &[QueueModuleSpec]) -> u64 {
    chain.iter().map(QueueModuleSpec::uncontended_latency).sum()
}
