//! Run reports, per-module statistics, and the disaggregation overhead metric.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SimError};
use crate::kernel::{Engine, Frontend, QueueModule};

/// Statistics for one module, sampled once per cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleStats {
    pub mean_occupancy: f64,
    pub max_occupancy: usize,
    /// Fraction of server-cycles spent serving, in [0, 1].
    pub busy_fraction: f64,
    /// Mean cycles between acceptance and start of service.
    pub mean_wait: f64,
    pub accepted: u64,
    /// Offers refused because the queue was full (each retry counts).
    pub rejected: u64,
}

impl ModuleStats {
    fn of(module: &QueueModule) -> Self {
        let c = &module.counters;
        let spec = module.spec();
        let mean_occupancy = if c.samples == 0 {
            0.0
        } else {
            c.occupancy_sum as f64 / c.samples as f64
        };
        let server_cycles = c.samples as f64 * spec.server_count as f64;
        let busy_fraction = if server_cycles == 0.0 {
            0.0
        } else {
            (c.busy_cycles as f64 / server_cycles).min(1.0)
        };
        let mean_wait = if c.started == 0 {
            0.0
        } else {
            c.total_wait as f64 / c.started as f64
        };
        ModuleStats {
            mean_occupancy,
            max_occupancy: c.max_occupancy,
            busy_fraction,
            mean_wait,
            accepted: c.accepted,
            rejected: c.rejected,
        }
    }

    /// Mean cycles from acceptance to delivery, for a module with the given
    /// service time and delay.
    pub fn mean_transit(&self, serv_time: u64, delay: u64) -> f64 {
        self.mean_wait + (serv_time + delay) as f64
    }
}

/// Per-module statistics keyed by module name.
pub fn module_stats<F: Frontend>(engine: &Engine<F>) -> BTreeMap<String, ModuleStats> {
    engine
        .modules()
        .iter()
        .map(|m| (m.name().to_string(), ModuleStats::of(m)))
        .collect()
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub cycles: u64,
    pub injected: u64,
    pub retired: u64,
    pub in_flight: u64,
    pub ipc: f64,
    pub per_module: BTreeMap<String, ModuleStats>,
    pub seed: u64,
    pub config_fingerprint: String,
}

impl SimReport {
    pub fn from_engine<F: Frontend>(engine: &Engine<F>) -> Self {
        let cycles = engine.clock();
        let retired = engine.retired();
        SimReport {
            cycles,
            injected: engine.injected(),
            retired,
            in_flight: engine.in_flight(),
            ipc: if cycles == 0 { 0.0 } else { retired as f64 / cycles as f64 },
            per_module: module_stats(engine),
            seed: engine.seed(),
            config_fingerprint: engine.fingerprint().to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Relative IPC loss of the disaggregated system, in percent.
pub fn overhead(ipc_baseline: f64, ipc_disagg: f64) -> Result<f64> {
    if ipc_baseline.is_nan() || ipc_baseline <= 0.0 {
        return Err(SimError::Domain(format!(
            "baseline IPC must be positive, got {ipc_baseline}"
        )));
    }
    if ipc_disagg.is_nan() || ipc_disagg < 0.0 {
        return Err(SimError::Domain(format!(
            "disaggregated IPC must be non-negative, got {ipc_disagg}"
        )));
    }
    Ok((ipc_baseline - ipc_disagg) / ipc_baseline * 100.0)
}

/// Formats a percentage the way result tables print it.
pub fn format_pct(pct: f64) -> String {
    format!("{pct:.2}")
}

/// SHA-256 over the canonical JSON form of `value`, hex encoded.
pub fn fingerprint<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}
