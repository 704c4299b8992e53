//! Full-system assembly: compute brick, local memory, and the remote path.
//!
//! Module order (upstream to downstream): `int_alu`, `fp_alu`, `l1`, `l2`,
//! `l3`, `local_mem`, then the remote chain. Memory instructions walk the
//! cache levels down to the level that serves them; remote accesses skip
//! local memory and continue through the interconnect.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::interconnect::{build_remote_pipeline, InterconnectSpec};
use crate::kernel::{Engine, EngineBuilder, InstructionKind, MemTarget, StopCondition, DEFAULT_DEADLOCK_WINDOW};
use crate::metrics::{fingerprint, SimReport};
use crate::microarch::{ComputeBrickSpec, CoreFrontend, RouteTable};
use crate::workload::WorkloadProfile;

pub const DEFAULT_PLATFORM_JSON: &str = include_str!("../configs/platform-default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlatformConfig {
    /// Core clock; 2.3 GHz matches the Xeon E5-2630 the defaults model.
    pub clock_ghz: f64,
    pub compute: ComputeBrickSpec,
    pub interconnect: InterconnectSpec,
    pub deadlock_window: u64,
}

impl Default for PlatformConfig {
    fn default() -> Self {
        PlatformConfig {
            clock_ghz: 2.3,
            compute: ComputeBrickSpec::default(),
            interconnect: InterconnectSpec::default(),
            deadlock_window: DEFAULT_DEADLOCK_WINDOW,
        }
    }
}

impl PlatformConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clock_ghz.is_finite() && self.clock_ghz > 0.0) {
            return Err(SimError::config("clock_ghz must be > 0"));
        }
        if self.deadlock_window == 0 {
            return Err(SimError::config("deadlock_window must be > 0"));
        }
        self.compute.validate()?;
        self.interconnect.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let platform: PlatformConfig =
            serde_json::from_str(text).map_err(|e| SimError::config(format!("platform: {e}")))?;
        platform.validate()?;
        Ok(platform)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("platform serializes");
        s.push('\n');
        s
    }

    pub fn with_endpoints(&self, num_endpoints: usize) -> Self {
        let mut p = self.clone();
        p.interconnect.num_endpoints = num_endpoints;
        p
    }

    pub fn with_latency_scale(&self, latency_scale: f64) -> Self {
        let mut p = self.clone();
        p.interconnect.latency_scale = latency_scale;
        p
    }
}

/// Content hash of a fully resolved platform and profile.
pub fn config_fingerprint(platform: &PlatformConfig, profile: &WorkloadProfile) -> String {
    fingerprint(&(platform, profile))
}

/// Builds a ready-to-run engine for `profile` on `platform`.
pub fn build_engine(platform: &PlatformConfig, profile: &WorkloadProfile, seed: u64) -> Result<Engine<CoreFrontend>> {
    let (builder, frontend) = assemble(platform, profile, seed)?;
    builder.build(frontend)
}

/// The module graph and issue frontend for `profile` on `platform`, not yet
/// joined, so callers can wrap the frontend (e.g. in [`Recording`](crate::kernel::Recording)).
pub fn assemble(platform: &PlatformConfig, profile: &WorkloadProfile, seed: u64) -> Result<(EngineBuilder, CoreFrontend)> {
    platform.validate()?;
    profile.validate()?;
    let brick = &platform.compute;
    let mut b = EngineBuilder::new(seed)
        .deadlock_window(platform.deadlock_window)
        .fingerprint(config_fingerprint(platform, profile));

    let int_alu = b.add_module(brick.int_alu_module())?;
    let fp_alu = b.add_module(brick.fp_alu_module())?;
    let mut levels = Vec::new();
    for spec in &brick.cache_levels {
        levels.push(b.add_module(spec.clone())?);
    }
    let local = b.add_module(brick.local_memory.clone())?;
    let mut remote = Vec::new();
    for spec in build_remote_pipeline(&platform.interconnect, platform.clock_ghz)? {
        remote.push(b.add_module(spec)?);
    }

    let mut routes = RouteTable::default();
    let alu_route = b.add_route(&[int_alu])?;
    routes.insert(InstructionKind::IntAlu, MemTarget::None, alu_route);
    routes.insert(InstructionKind::Branch, MemTarget::None, alu_route);
    routes.insert(InstructionKind::FpAlu, MemTarget::None, b.add_route(&[fp_alu])?);
    routes.insert(InstructionKind::Nop, MemTarget::None, b.add_route(&[])?);

    let targets = [
        (MemTarget::L1, levels[..1].to_vec()),
        (MemTarget::L2, levels[..2].to_vec()),
        (MemTarget::L3, levels.clone()),
        (MemTarget::LocalMem, [levels.as_slice(), &[local]].concat()),
        (MemTarget::RemoteMem, [levels.as_slice(), &remote].concat()),
    ];
    for (target, hops) in targets {
        let route = b.add_route(&hops)?;
        routes.insert(InstructionKind::Load, target, route);
        routes.insert(InstructionKind::Store, target, route);
    }

    Ok((b, CoreFrontend::new(profile.clone(), brick, routes)))
}

/// Runs one simulation and returns its report.
pub fn simulate(platform: &PlatformConfig, profile: &WorkloadProfile, seed: u64, stop: StopCondition) -> Result<SimReport> {
    build_engine(platform, profile, seed)?.run(stop)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_default_platform_matches_code_defaults() {
        assert_eq!(PlatformConfig::from_json(DEFAULT_PLATFORM_JSON).unwrap(), PlatformConfig::default());
        assert_eq!(PlatformConfig::default().to_json(), DEFAULT_PLATFORM_JSON);
    }

    #[test]
    fn missing_keys_take_defaults_and_unknown_keys_fail() {
        let p = PlatformConfig::from_json(r#"{"clock_ghz": 3.0}"#).unwrap();
        assert_eq!(p.clock_ghz, 3.0);
        assert_eq!(p.compute, ComputeBrickSpec::default());
        let err = PlatformConfig::from_json(r#"{"clock_hz": 3.0}"#).unwrap_err().to_string();
        assert!(err.contains("clock_hz"), "{err}");
    }

    #[test]
    fn alu_only_run_is_bounded_by_issue_width() {
        let platform = PlatformConfig::default();
        let r = simulate(&platform, &WorkloadProfile::alu_only(), 7, StopCondition::MaxInstructions(20_000)).unwrap();
        assert!(r.ipc > 0.0 && r.ipc <= platform.compute.issue_width as f64);
        assert_eq!(r.retired, 20_000);
        assert_eq!(r.in_flight, 0);
    }

    #[test]
    fn fingerprint_tracks_resolved_config() {
        let p = PlatformConfig::default();
        let w = WorkloadProfile::alu_only();
        assert_eq!(config_fingerprint(&p, &w), config_fingerprint(&p.clone(), &w.clone()));
        assert_ne!(config_fingerprint(&p, &w), config_fingerprint(&p.with_endpoints(2), &w));
    }
}
