//! Cycle-driven queue-model simulator for disaggregated-memory systems.
//!
//! Instructions are generated from a statistical [`workload::WorkloadProfile`],
//! issued in order by a compute-brick frontend, and routed through
//! queue/server/delay modules for ALUs, caches, local memory, and the optical
//! remote-memory path to a memory brick. The figure of merit is IPC; the
//! disaggregation overhead compares a run against its remote-free baseline.
//!
//! ```no_run
//! use disagg_sim::prelude::*;
//!
//! let platform = PlatformConfig::default();
//! let profile = WorkloadProfile::fermin_like();
//! let base = simulate(&platform, &profile.without_remote(), 1, StopCondition::default()).unwrap();
//! let disagg = simulate(&platform, &profile, 1, StopCondition::default()).unwrap();
//! println!("overhead {:.2}%", overhead(base.ipc, disagg.ipc).unwrap());
//! ```

pub mod error;
pub mod interconnect;
pub mod kernel;
pub mod metrics;
pub mod microarch;
pub mod platform;
pub mod sweep;
pub mod workload;

pub use error::{Result, SimError};

pub mod prelude {
    pub use crate::error::{Result, SimError};
    pub use crate::interconnect::{
        build_remote_pipeline, endpoint_service_cycles, ns_to_cycles, remote_path_latency_ns, InterconnectSpec,
        RemotePathStage, Side,
    };
    pub use crate::kernel::{
        BernoulliSource, Engine, EngineBuilder, FixedIntervalSource, Frontend, InstructionKind, InstructionToken,
        IssuePort, MemTarget, Offer, QueueModule, QueueModuleSpec, Recording, StopCondition,
    };
    pub use crate::metrics::{format_pct, overhead, ModuleStats, SimReport};
    pub use crate::microarch::{ComputeBrickSpec, CoreFrontend};
    pub use crate::platform::{assemble, build_engine, simulate, PlatformConfig};
    pub use crate::sweep::{run_sweep, SweepResult, SweepSpec};
    pub use crate::workload::{calibrate_baseline, load_profile, Calibrator, InstructionMix, WorkloadProfile};
}
